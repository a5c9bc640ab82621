use metaori::mesh::validate_mesh;
use metaori::metashell::{assemble_metashell, beam_profile, build_unit_cell_outline, MetashellError, MetashellParams};
use proptest::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;

type Grid = HashMap<[i64; 3], Vec<[f64; 3]>>;

const CELL: f64 = 1e-5;

fn key(p: [f64; 3]) -> [i64; 3] {
    p.map(|x| (x / CELL).floor() as i64)
}

fn grid(points: &[[f64; 3]]) -> Grid {
    let mut g: Grid = HashMap::new();
    for &p in points {
        g.entry(key(p)).or_default().push(p);
    }
    g
}

fn has_near(g: &Grid, p: [f64; 3], tol: f64) -> bool {
    let k = key(p);
    (-1..=1).any(|dx| {
        (-1..=1).any(|dy| {
            (-1..=1).any(|dz| {
                g.get(&[k[0] + dx, k[1] + dy, k[2] + dz])
                    .is_some_and(|v| v.iter().any(|q| (0..3).all(|i| (p[i] - q[i]).abs() <= tol)))
            })
        })
    })
}

fn rotate(p: [f64; 3], a: f64) -> [f64; 3] {
    let (s, c) = a.sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]]
}

#[test]
fn beam_profile_examples() {
    assert!(beam_profile(0.0, 9.4, 22.5).unwrap().abs() < 1e-15);
    assert!((beam_profile(-11.25, 9.4, 22.5).unwrap() - 9.4).abs() < 1e-12);
    assert!((beam_profile(-5.625, 9.4, 22.5).unwrap() - 4.7).abs() < 1e-12);
    assert!(matches!(beam_profile(1.0, 9.4, 22.5), Err(MetashellError::OutOfDomain { .. })));
}

#[test]
fn paper_cell_pitch() {
    let o = build_unit_cell_outline(&MetashellParams::paper()).unwrap();
    assert!((o.pitch - 35.0).abs() < 1e-12);
    assert!(!o.zero_clearance);
}

#[test]
fn outline_edge_cases() {
    let touching = MetashellParams { delta: 0.0, ..MetashellParams::paper() };
    assert!(build_unit_cell_outline(&touching).unwrap().zero_clearance);
    let thick = MetashellParams { t: 9.4, mesh_size: 0.5, ..MetashellParams::paper() };
    assert!(matches!(build_unit_cell_outline(&thick), Err(MetashellError::GeometryConflict(_))));
}

#[test]
fn paper_shell_matches_reference_size() {
    let s = assemble_metashell(&MetashellParams::paper()).unwrap();
    assert!((s.open_height - 42.5).abs() < 1e-9);
    assert!((2.0 * s.outer_radius / 46.25 - 1.0).abs() < 0.03);
    assert!((2.0 * s.inner_radius / 36.25 - 1.0).abs() < 0.03);
}

#[test]
fn two_rows_double_the_beam_extent() {
    let one = MetashellParams::paper();
    let two = MetashellParams { rows: 2, infill_per_row: vec![0.99, 0.6], ..one.clone() };
    let beams = |p: &MetashellParams| p.overall_height() - 2.0 * p.wall_height - (p.rows - 1) as f64 * p.band_height();
    assert!((beams(&two) - 2.0 * beams(&one)).abs() < 1e-12);
    let s = assemble_metashell(&two).unwrap();
    let r = validate_mesh(&s.mesh);
    assert!(r.closed_manifold && r.is_valid(), "{:?}", r.problems());
    assert_eq!(r.euler_characteristic, -2 * (2 * two.cols * two.rows) as i64);
}

#[test]
fn shell_is_deterministic() {
    let a = assemble_metashell(&MetashellParams::paper()).unwrap();
    let b = assemble_metashell(&MetashellParams::paper()).unwrap();
    let bits = |m: &metaori::mesh::TriMesh| m.vertices.iter().flatten().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.mesh), bits(&b.mesh));
    assert_eq!(a.mesh.triangles, b.mesh.triangles);
}

fn arb_shell() -> impl Strategy<Value = MetashellParams> {
    (8.0..16.0f64, 18.0..30.0f64, 0.9..1.6f64, 0.3..0.55f64, 2usize..6).prop_map(|(c, l, t, rise, cols)| {
        let p = MetashellParams::paper();
        let row = 0.5 * (l + c);
        MetashellParams {
            c,
            l,
            t,
            h: (rise * row).max(t + 0.5),
            r: 0.3 * c,
            delta: 0.5,
            wall_height: 6.0,
            cols,
            pitch_scale: 1.0,
            mesh_size: 0.5,
            ..p
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn wrapped_shell_properties(p in arb_shell()) {
        let s = match assemble_metashell(&p) {
            Ok(s) => s,
            Err(MetashellError::GeometryConflict(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let r = validate_mesh(&s.mesh);
        prop_assert!(r.closed_manifold && r.winding_consistent && r.signed_volume > 0.0, "{:?}", r.problems());
        let arc = p.mid_radius() * 2.0 * PI / p.cols as f64;
        prop_assert!((arc - p.pitch()).abs() < 1e-6);
        let g = grid(&s.mesh.vertices);
        let turn = 2.0 * PI / p.cols as f64;
        for &v in &s.mesh.vertices {
            prop_assert!(has_near(&g, rotate(v, turn), 1e-6));
        }
    }
}
