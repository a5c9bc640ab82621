//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use metaori::config::{preset, Analysis};
use metaori::integrate::build_meta_ori;
use metaori::kresling::{assemble_origami, kinematic_state, solve_closure, thicken_faces, KreslingParams};
use metaori::mechanics::{
    combined_fd, elastica_oracle, metashell_fd, metashell_fd_on, predict_elongation, segments_of, simulate_sequence,
    volume_ramp, Branch, MaterialParams, OrigamiModel, SegmentResponse, SequenceResult,
};
use metaori::mesh::{export_mesh, read_mesh, validate_mesh, MeshFormat, TriMesh};
use metaori::metashell::{assemble_metashell, MetashellParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

type Outcome = Result<String, String>;
/// Name, runtime budget in seconds, check.
type Criterion = (&'static str, f64, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("geometry closure", 30.0, geometry_closure),
        ("mesh validity", 60.0, mesh_validity),
        ("STL contract", f64::INFINITY, stl_contract),
        ("bistability", 300.0, bistability),
        ("superposition", f64::INFINITY, superposition),
        ("pressure-volume", f64::INFINITY, pressure_volume),
        ("elongation", f64::INFINITY, elongation),
        ("sequencing", 120.0, sequencing),
        ("numerical hygiene", f64::INFINITY, numerical_hygiene),
    ];
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(_) if secs > budget => Err(format!("took {secs:.1} s, budget {budget} s")),
            o => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({secs:.2} s) {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({secs:.2} s) {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

fn origami() -> KreslingParams {
    preset("paper").unwrap().kresling_params()
}

fn symmetry_residual(points: &[[f64; 3]], angle: f64) -> f64 {
    let (s, c) = angle.sin_cos();
    points
        .iter()
        .map(|p| {
            let q = [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]];
            points
                .iter()
                .map(|r| ((q[0] - r[0]).powi(2) + (q[1] - r[1]).powi(2) + (q[2] - r[2]).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn geometry_closure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b72_6573);
    let (mut worst_sym, mut worst_twist) = (0.0f64, 0.0f64);
    let mut cases = 0;
    while cases < 100 {
        let b = rng.random_range(8.0..25.0);
        let h = rng.random_range(5.0..25.0);
        let phi = rng.random_range(10.0f64..50.0).to_radians();
        let levels = rng.random_range(1..=3);
        let Ok(p) = KreslingParams::design(6, b, h, phi, rng.random_range(0.4..1.5), levels) else {
            continue;
        };
        cases += 1;
        let o = assemble_origami(&p).map_err(|e| e.to_string())?;
        worst_sym = worst_sym.max(symmetry_residual(&o.state.vertex_coords, PI / 3.0));
        let frac = rng.random_range(0.05..1.0);
        let closure = solve_closure(&p).map_err(|e| e.to_string())?;
        let s = kinematic_state(&p, frac * closure.height).map_err(|e| e.to_string())?;
        worst_twist = worst_twist.max(o.state.net_twist().abs()).max(s.net_twist().abs());
    }
    ensure!(worst_sym <= 1e-6, "symmetry residual {worst_sym:.3e} mm");
    ensure!(worst_twist <= 1e-9, "net twist {worst_twist:.3e} rad");
    Ok(format!("100 designs, symmetry residual {worst_sym:.1e} mm, net twist {worst_twist:.1e} rad"))
}

fn mesh_validity() -> Outcome {
    let cfg = preset("paper").unwrap();
    let a = build_meta_ori(&cfg.metashell, &cfg.kresling_params(), &cfg.integration).map_err(|e| e.to_string())?;
    let r = validate_mesh(&a.mesh);
    ensure!(r.closed_manifold && r.winding_consistent, "{:?}", r.problems());
    ensure!(r.signed_volume > 0.0, "volume {}", r.signed_volume);
    let hits = r.self_intersections.unwrap_or(usize::MAX);
    ensure!(hits <= 10, "{hits} self-intersecting pairs");
    let windows = 2 * cfg.metashell.cols * cfg.metashell.rows;
    let expected = 2 - 2 * windows as i64;
    ensure!(r.shells == 1, "{} shells", r.shells);
    ensure!(r.euler_characteristic == expected, "chi {} vs {expected}", r.euler_characteristic);
    ensure!(a.cavity_volume() > 0.0, "empty cavity");
    Ok(format!(
        "{} triangles, chi {} (one body, {windows} windows), {hits} intersecting pairs, cavity {:.2} mL",
        r.triangle_count,
        r.euler_characteristic,
        a.cavity_volume() / 1000.0
    ))
}

fn stl_contract() -> Outcome {
    let cube = export_mesh(&TriMesh::unit_cube(), MeshFormat::StlBinary).map_err(|e| e.to_string())?;
    ensure!(cube.len() == 684, "cube exports to {} bytes", cube.len());

    let cfg = preset("paper").unwrap();
    let two = preset("paper-bisegment").unwrap();
    let mut solids: Vec<(String, TriMesh)> = Vec::new();
    let o = assemble_origami(&cfg.kresling_params()).map_err(|e| e.to_string())?;
    let t = thicken_faces(&o.state, cfg.kresling.t_face).map_err(|e| e.to_string())?;
    solids.push(("origami outer".into(), t.outer_mesh));
    solids.push(("origami cavity".into(), t.cavity_mesh));
    solids.push(("origami wall".into(), t.wall_mesh));
    for c in [&cfg, &two] {
        let shell = assemble_metashell(&c.metashell).map_err(|e| e.to_string())?;
        solids.push((format!("shell rows={}", c.metashell.rows), shell.mesh));
        let a = build_meta_ori(&c.metashell, &c.kresling_params(), &c.integration).map_err(|e| e.to_string())?;
        let [bottom, top] = a.lid_meshes.clone();
        solids.push(("bottom lid".into(), bottom));
        solids.push(("top lid".into(), top));
        solids.push((format!("assembly rows={}", c.metashell.rows), a.mesh));
    }
    for (name, m) in &solids {
        for f in [MeshFormat::StlBinary, MeshFormat::ObjAscii] {
            let a = export_mesh(m, f).map_err(|e| format!("{name}: {e}"))?;
            let back = read_mesh(&a, f).map_err(|e| format!("{name}: {e}"))?;
            let b = export_mesh(&back, f).map_err(|e| format!("{name}: {e}"))?;
            ensure!(a == b, "{name} {f:?} re-export differs");
        }
    }
    Ok(format!("cube 684 bytes, {} solids round-trip in STL and OBJ", solids.len()))
}

fn bistability() -> Outcome {
    let p = MetashellParams::paper();
    let mat = MaterialParams::default();
    let q = p.h / p.t;
    let c = metashell_fd(&p, &mat).map_err(|e| e.to_string())?;
    let z = c.zero_crossings();
    let stable = c.stable_zeros();
    let rises = c.samples[1].1 > 0.0;
    ensure!(rises && z.len() == 2 && stable.len() == 1, "zero crossings {z:?}");

    let ds: Vec<f64> = (1..=50).map(|k| 2.0 * p.h * k as f64 / 51.0).collect();
    let rom = metashell_fd_on(&p, &mat, &ds).map_err(|e| e.to_string())?.forces();
    let ora = elastica_oracle(&p, &mat, &ds).map_err(|e| e.to_string())?;
    let mismatched = rom.iter().zip(&ora).filter(|(a, b)| a.signum() != b.signum()).count();
    let peak = rom.iter().map(|f| f.abs()).fold(0.0, f64::max);
    let rms = (rom.iter().zip(&ora).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / ds.len() as f64).sqrt();
    ensure!(mismatched == 0, "{mismatched} of 50 samples disagree in sign");
    ensure!(rms <= 0.1 * peak, "RMS {rms:.3} N vs peak {peak:.3} N");
    Ok(format!(
        "Q = {q:.2}, stable at 0 and {:.2} mm, unstable at {:.2} mm, oracle RMS {:.1}% of peak",
        stable[0],
        z[0].0,
        100.0 * rms / peak
    ))
}

fn superposition() -> Outcome {
    let a = Analysis::run(&preset("paper").unwrap()).map_err(|e| e.to_string())?;
    let c = combined_fd(&a.fd_meta, &a.fd_ori).map_err(|e| e.to_string())?;
    let exact = c.samples.iter().all(|&(d, f)| f == a.fd_meta.at(d).unwrap() + a.fd_ori.at(d).unwrap());
    ensure!(exact, "sum is not exact");
    let slopes: Vec<f64> = c.samples.windows(2).map(|w| w[1].1 - w[0].1).collect();
    ensure!(slopes.iter().any(|&s| s > 0.0) && slopes.iter().any(|&s| s < 0.0), "combined curve is monotone");
    Ok(format!("{} shared samples, {} force extrema", c.samples.len(), a.fd_events.extrema.len()))
}

fn pressure_volume() -> Outcome {
    let a = Analysis::run(&preset("paper").unwrap()).map_err(|e| e.to_string())?;
    let (max, min) = (a.pv.max_pressure(), a.pv.min_pressure());
    ensure!((50.0..=450.0).contains(&max), "peak {max:.1} mbar");
    ensure!(min < 0.0, "no negative pressure (min {min:.1} mbar)");
    let up = a.pv.events.iter().filter(|e| e.branch == Branch::Inflation).count();
    let down = a.pv.events.iter().filter(|e| e.branch == Branch::Deflation).count();
    ensure!(up >= 1 && down >= 1, "{up} inflation and {down} deflation events");
    Ok(format!("peak {max:.1} mbar, minimum {min:.1} mbar"))
}

fn elongation() -> Outcome {
    let e = predict_elongation(&MetashellParams::paper(), &MaterialParams::default()).map_err(|e| e.to_string())?;
    ensure!((e - 43.0).abs() <= 15.0, "{e:.1}%");
    Ok(format!("{e:.1}%"))
}

fn run_sequence(infill: [f64; 2], steps: usize) -> Result<SequenceResult, String> {
    let cfg = preset("paper-bisegment").unwrap();
    let shell = MetashellParams { infill_per_row: infill.to_vec(), ..cfg.metashell.clone() };
    let mat = &cfg.material;
    let segs = segments_of(&shell, &cfg.kresling_params())
        .and_then(|s| s.iter().map(|s| SegmentResponse::build(s, mat)).collect::<Result<Vec<_>, _>>())
        .map_err(|e| e.to_string())?;
    let ramp = volume_ramp(&segs, steps).map_err(|e| e.to_string())?;
    simulate_sequence(&segs, &ramp).map_err(|e| e.to_string())
}

/// Step and pressure of the first inflation snap of each segment.
fn first_snaps(r: &SequenceResult) -> Result<[(usize, f64); 2], String> {
    let of = |i: usize| {
        r.events_on(Branch::Inflation)
            .into_iter()
            .find(|e| e.segment == i)
            .map(|e| (e.step, e.pressure))
            .ok_or(format!("segment {} never snaps", i + 1))
    };
    Ok([of(0)?, of(1)?])
}

fn sequencing() -> Outcome {
    let steps = 400;
    let [stiff, soft] = first_snaps(&run_sequence([0.99, 0.60], steps)?)?;
    ensure!(soft.0 < stiff.0 && soft.1 < stiff.1, "0.60 at {soft:?}, 0.99 at {stiff:?}");
    let [soft2, stiff2] = first_snaps(&run_sequence([0.60, 0.99], steps)?)?;
    ensure!(soft2.0 < stiff2.0 && soft2.1 < stiff2.1, "swapped: 0.60 at {soft2:?}, 0.99 at {stiff2:?}");
    let [a, b] = first_snaps(&run_sequence([0.80, 0.80], steps)?)?;
    ensure!(a.0.abs_diff(b.0) <= 1, "identical segments snap at steps {} and {}", a.0, b.0);
    Ok(format!(
        "0.60 snaps at {:.1} mbar (step {}), 0.99 at {:.1} mbar (step {}); swap reverses; identical segments {} steps apart",
        soft.1,
        soft.0,
        stiff.1,
        stiff.0,
        a.0.abs_diff(b.0)
    ))
}

fn numerical_hygiene() -> Outcome {
    let m = OrigamiModel::new(&origami(), &MaterialParams::default()).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (a, b) in [(0.0, 6.0), (2.0, 14.0), (5.0, 19.0)] {
        let xs: Vec<f64> = (0..=400).map(|k| a + (b - a) * k as f64 / 400.0).collect();
        let fs = xs.iter().map(|&d| m.force(d, 1e-3)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
        let work: f64 = xs.windows(2).zip(fs.windows(2)).map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1])).sum();
        let du = m.energy(b).map_err(|e| e.to_string())? - m.energy(a).map_err(|e| e.to_string())?;
        worst = worst.max((work / du - 1.0).abs());
    }
    ensure!(worst < 0.01, "energy mismatch {:.3}%", 100.0 * worst);
    let mut orders = Vec::new();
    for d in [4.0, 9.0, 15.0] {
        let f = [0.4, 0.2, 0.1].map(|s| m.force(d, s));
        let [f0, f1, f2] = [&f[0], &f[1], &f[2]].map(|x| x.clone().unwrap_or(f64::NAN));
        let order = ((f0 - f1) / (f1 - f2)).abs().log2();
        ensure!((1.8..=2.2).contains(&order), "order {order:.3} at d = {d}");
        orders.push(order);
    }
    Ok(format!("energy within {:.3}%, orders {orders:.2?}", 100.0 * worst))
}
