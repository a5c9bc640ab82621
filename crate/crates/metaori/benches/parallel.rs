use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use metaori::config::{preset, run_sweep};
use metaori::integrate::build_meta_ori;
use metaori::mesh::count_self_intersections;
use metaori::par::Exec;
use std::hint::black_box;

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn self_intersections(c: &mut Criterion) {
    let cfg = preset("paper").unwrap();
    let mesh = build_meta_ori(&cfg.metashell, &cfg.kresling_params(), &cfg.integration).unwrap().mesh;
    let mut g = c.benchmark_group("self_intersections");
    g.sample_size(10);
    for (name, exec) in STRATEGIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| count_self_intersections(black_box(&mesh), exec))
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let cfg = preset("paper").unwrap();
    let values: Vec<f64> = (0..4).map(|k| 6.0 + 2.0 * k as f64).collect();
    let mut g = c.benchmark_group("sweep_h");
    g.sample_size(10);
    for (name, exec) in STRATEGIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_sweep(black_box(&cfg), "metashell.h", &values, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, self_intersections, sweep);
criterion_main!(benches);
