use metaori::config::{preset, Analysis};
use metaori::kresling::KreslingParams;
use metaori::mechanics::elastica::Elastica;
use metaori::mechanics::{
    combined_fd, detect_events, elastica_oracle, metashell_fd, metashell_fd_on, origami_fd_on, predict_elongation,
    segments_of, simulate_sequence, stroke_grid, volume_ramp, Branch, CurveRole, ExtremumKind, FDCurve, MaterialParams,
    OrigamiModel, SegmentResponse, SequenceResult,
};
use metaori::metashell::MetashellParams;
use proptest::prelude::*;

fn origami() -> KreslingParams {
    KreslingParams::design(6, 15.0, 19.25, 20f64.to_radians(), 1.0, 1).unwrap()
}

fn bisegment_origami() -> KreslingParams {
    KreslingParams::design(6, 15.0, 14.625, 30f64.to_radians(), 1.0, 2).unwrap()
}

fn slopes(c: &FDCurve) -> Vec<f64> {
    c.samples.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect()
}

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2).zip(ys.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

#[test]
fn origami_force_integrates_to_energy() {
    let m = OrigamiModel::new(&origami(), &MaterialParams::default()).unwrap();
    for (a, b) in [(0.0, 6.0), (2.0, 14.0), (5.0, 19.0)] {
        let xs: Vec<f64> = (0..=400).map(|k| a + (b - a) * k as f64 / 400.0).collect();
        let fs: Vec<f64> = xs.iter().map(|&d| m.force(d, 1e-3).unwrap()).collect();
        let work = trapezoid(&xs, &fs);
        let du = m.energy(b).unwrap() - m.energy(a).unwrap();
        assert!((work / du - 1.0).abs() < 0.01, "[{a}, {b}]: {work} vs {du}");
    }
}

#[test]
fn central_difference_is_second_order() {
    let m = OrigamiModel::new(&origami(), &MaterialParams::default()).unwrap();
    for d in [4.0, 9.0, 15.0] {
        let f: Vec<f64> = [0.4, 0.2, 0.1].iter().map(|&s| m.force(d, s).unwrap()).collect();
        let order = ((f[0] - f[1]) / (f[1] - f[2])).abs().log2();
        assert!((1.8..=2.2).contains(&order), "d = {d}: order {order}");
    }
}

#[test]
fn superposition_is_exact_and_nonmonotone() {
    let cfg = preset("paper").unwrap();
    let a = Analysis::run(&cfg).unwrap();
    for &(d, f) in &a.fd_combined.samples {
        assert_eq!(f, a.fd_meta.at(d).unwrap() + a.fd_ori.at(d).unwrap());
    }
    let s = slopes(&a.fd_combined);
    assert!(s.iter().any(|&k| k > 0.0) && s.iter().any(|&k| k < 0.0));

    let zero = FDCurve::new(CurveRole::Ori, a.fd_meta.displacements().into_iter().map(|d| (d, 0.0)).collect()).unwrap();
    assert_eq!(combined_fd(&a.fd_meta, &zero).unwrap().samples, a.fd_meta.samples);
}

#[test]
fn elastica_agrees_with_beam_model() {
    let p = MetashellParams::paper();
    let mat = MaterialParams::default();
    let ds: Vec<f64> = (1..=50).map(|k| 2.0 * p.h * k as f64 / 51.0).collect();
    let rom = metashell_fd_on(&p, &mat, &ds).unwrap().forces();
    let ora = elastica_oracle(&p, &mat, &ds).unwrap();
    let peak = rom.iter().map(|f| f.abs()).fold(0.0, f64::max);
    for (k, (a, b)) in rom.iter().zip(&ora).enumerate() {
        assert_eq!(a.signum(), b.signum(), "d = {}: {a} vs {b}", ds[k]);
    }
    let rms = (rom.iter().zip(&ora).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / ds.len() as f64).sqrt();
    assert!(rms < 0.1 * peak, "rms {rms} vs peak {peak}");
}

#[test]
fn elastica_examples() {
    let p = MetashellParams::paper();
    let chain = Elastica::new(p.l, p.h, p.t, p.depth, 12.0, 200);
    let ds: Vec<f64> = (0..=40).map(|k| 2.0 * p.h * k as f64 / 40.0).collect();
    let s = chain.trace(&ds).unwrap();
    let peak = s.iter().map(|x| x.force.abs()).fold(0.0, f64::max);
    assert!(s[0].force.abs() < 1e-9);
    let stable = s.windows(2).filter(|w| w[0].force < 0.0 && w[1].force >= 0.0).map(|w| w[1].d).collect::<Vec<_>>();
    assert_eq!(stable.len(), 1);
    assert!(stable[0] > 1.5 * p.h && stable[0] < 2.0 * p.h, "{stable:?}");
    assert!(s[40].force > 0.0 && s[40].force <= peak);
}

#[test]
fn shell_examples() {
    let mat = MaterialParams::default();
    let paper = metashell_fd(&MetashellParams::paper(), &mat).unwrap();
    let z = paper.zero_crossings();
    assert_eq!(z.len(), 2);
    assert!(z.iter().all(|c| c.0 > 0.0 && c.0 < 2.0 * 9.4));
    assert_eq!(paper.stable_zeros().len(), 1);

    let stiff = MaterialParams { youngs_modulus: 24.0, ..mat.clone() };
    let doubled = metashell_fd(&MetashellParams::paper(), &stiff).unwrap();
    for (a, b) in paper.samples.iter().zip(&doubled.samples) {
        assert!((2.0 * a.1 - b.1).abs() <= 1e-9 * (1.0 + b.1.abs()));
    }
    for (a, b) in z.iter().zip(doubled.zero_crossings()) {
        assert!((a.0 - b.0).abs() < 1e-9);
    }

    let shallow = MetashellParams { h: 1.25, ..MetashellParams::paper() };
    let c = metashell_fd(&shallow, &mat).unwrap();
    assert!(c.zero_crossings().is_empty());
    assert!(slopes(&c).iter().all(|&k| k > 0.0));
}

#[test]
fn origami_is_softer_and_linear_in_bar_stiffness() {
    let mat = MaterialParams::default();
    let meta = metashell_fd(&MetashellParams::paper(), &mat).unwrap();
    let reach = 0.95 * OrigamiModel::new(&origami(), &mat).unwrap().rest_height();
    let ds: Vec<f64> = meta.displacements().into_iter().filter(|&d| d <= reach).collect();
    let ori = origami_fd_on(&origami(), &mat, &ds).unwrap();
    let shared =
        FDCurve::new(CurveRole::Meta, meta.samples.iter().copied().filter(|s| s.0 <= reach).collect()).unwrap();
    let stiffest = |c: &FDCurve| slopes(c).iter().map(|k| k.abs()).fold(0.0, f64::max);
    assert!(stiffest(&ori) < stiffest(&shared));
    assert!(ori.samples[0].1.abs() < 1e-3);

    let area = 0.5 * 1.0 * 15.0;
    let double = MaterialParams { bar_area: Some(2.0 * area), ..mat };
    let ori2 = origami_fd_on(&origami(), &double, &ds).unwrap();
    for (a, b) in ori.samples.iter().zip(&ori2.samples) {
        assert!((2.0 * a.1 - b.1).abs() <= 1e-6 * (1.0 + b.1.abs()), "{} vs {}", a.1, b.1);
    }
}

#[test]
fn cubic_extrema() {
    let xs: Vec<f64> = (0..=4000).map(|k| k as f64 / 1000.0).collect();
    let ys: Vec<f64> = xs.iter().map(|v| (v - 1.0) * (v - 2.0) * (v - 3.0)).collect();
    let r = detect_events(&xs, &ys);
    assert_eq!(r.extrema.len(), 2);
    let root = 1.0 / 3f64.sqrt();
    assert_eq!(r.extrema[0].kind, ExtremumKind::Maximum);
    assert!((r.extrema[0].x - (2.0 - root)).abs() <= 1e-3);
    assert_eq!(r.extrema[1].kind, ExtremumKind::Minimum);
    assert!((r.extrema[1].x - (2.0 + root)).abs() <= 1e-3);
    assert!(r.bistable);

    let mono: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let r = detect_events(&xs, &mono);
    assert!(r.extrema.is_empty() && !r.bistable);
}

#[test]
fn paper_pressure_volume() {
    let a = Analysis::run(&preset("paper").unwrap()).unwrap();
    let pv = &a.pv;
    assert!(pv.samples.windows(2).all(|w| w[0].0 < w[1].0));
    assert!((50.0..=450.0).contains(&pv.max_pressure()), "{}", pv.max_pressure());
    assert!(pv.min_pressure() < 0.0);
    assert!(pv.events.iter().any(|e| e.branch == Branch::Inflation && e.kind == ExtremumKind::Maximum));
    assert!(pv.events.iter().any(|e| e.branch == Branch::Deflation && e.kind == ExtremumKind::Minimum));
    for e in &pv.events {
        let k = pv.samples.iter().position(|s| s.0 == e.volume).unwrap();
        let (lo, mid, hi) = (pv.samples[k - 1].1, pv.samples[k].1, pv.samples[k + 1].1);
        match e.kind {
            ExtremumKind::Maximum => assert!(mid > lo && mid > hi),
            ExtremumKind::Minimum => assert!(mid < lo && mid < hi),
        }
    }
    assert!(pv.to_csv().starts_with("V_mL,P_mbar\n"));
}

#[test]
fn elongation_examples() {
    let mat = MaterialParams::default();
    let e = predict_elongation(&MetashellParams::paper(), &mat).unwrap();
    assert!((e - 43.0).abs() <= 15.0);
    let tall = MetashellParams { wall_height: 25.0, ..MetashellParams::paper() };
    assert!(predict_elongation(&tall, &mat).unwrap() < e);
}

fn run_sequence(infill: [f64; 2], steps: usize) -> SequenceResult {
    let shell = MetashellParams { rows: 2, infill_per_row: infill.to_vec(), ..MetashellParams::paper() };
    let mat = MaterialParams::default();
    let segs: Vec<SegmentResponse> = segments_of(&shell, &bisegment_origami())
        .unwrap()
        .iter()
        .map(|s| SegmentResponse::build(s, &mat).unwrap())
        .collect();
    let ramp = volume_ramp(&segs, steps).unwrap();
    simulate_sequence(&segs, &ramp).unwrap()
}

/// First inflation snap of each segment.
fn first_snaps(r: &SequenceResult) -> [(usize, f64); 2] {
    let of = |i: usize| {
        let e = r.events_on(Branch::Inflation).into_iter().find(|e| e.segment == i).unwrap();
        (e.step, e.pressure)
    };
    [of(0), of(1)]
}

#[test]
fn soft_segment_snaps_first() {
    let [bottom, top] = first_snaps(&run_sequence([0.99, 0.60], 400));
    assert!(top.0 < bottom.0 && top.1 < bottom.1, "top {top:?} bottom {bottom:?}");
    let [bottom, top] = first_snaps(&run_sequence([0.60, 0.99], 400));
    assert!(bottom.0 < top.0 && bottom.1 < top.1, "top {top:?} bottom {bottom:?}");
}

#[test]
fn identical_segments_snap_together() {
    let r = run_sequence([0.8, 0.8], 200);
    let [a, b] = first_snaps(&r);
    assert!(a.0.abs_diff(b.0) <= 1);
}

#[test]
fn sequence_is_deterministic() {
    let a = run_sequence([0.99, 0.60], 150);
    let b = run_sequence([0.99, 0.60], 150);
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), b.to_csv());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn stiffer_segment_needs_more_pressure(s1 in 0.05..0.95f64, gap in 0.02..0.5f64) {
        let s2 = (s1 + gap).min(1.0);
        let mat = MaterialParams::default();
        let shell = MetashellParams { rows: 2, infill_per_row: vec![s1, s2], ..MetashellParams::paper() };
        let segs = segments_of(&shell, &bisegment_origami()).unwrap();
        let snap = |k: usize| {
            let r = SegmentResponse::build(&segs[k], &mat).unwrap();
            r.pressure(r.inflation_limit)
        };
        prop_assert!(snap(0) <= snap(1));
    }

    #[test]
    fn increasing_curves_sum_to_increasing(
        a in proptest::collection::vec(0.01..5.0f64, 2..30),
        b in proptest::collection::vec(0.01..5.0f64, 2..30),
    ) {
        let ramp = |steps: &[f64]| {
            let mut f = 0.0;
            steps.iter().enumerate().map(|(k, s)| { f += s; (k as f64, f) }).collect::<Vec<_>>()
        };
        let x = FDCurve::new(CurveRole::Meta, ramp(&a)).unwrap();
        let y = FDCurve::new(CurveRole::Ori, ramp(&b)).unwrap();
        let c = combined_fd(&x, &y).unwrap();
        prop_assert!(slopes(&c).iter().all(|&k| k > 0.0));
    }
}

#[test]
fn stroke_grid_spans_the_range() {
    let g = stroke_grid(10.0, 4);
    assert_eq!(g, vec![0.0, 2.5, 5.0, 7.5, 10.0]);
}
