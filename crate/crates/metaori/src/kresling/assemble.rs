use super::{
    bar_lengths, build_flat_pattern, circumradius, fold_basic_unit, tier_unit, Chirality, FoldedUnit, KreslingError,
    KreslingParams,
};
use crate::geom::{self, P3};
use crate::mechanics::truss::TierTruss;
use crate::mesh::TriMesh;
use crate::numeric::scan_roots;
use serde::Serialize;
use std::f64::consts::PI;

const CLOSURE_TOL: f64 = 1e-6;

/// Ring closure of the folded unit: the fold angle at which `n` copies
/// rotated about a common axis close up exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Closure {
    pub requested_alpha: f64,
    pub alpha: f64,
    /// Height of one tier (mm).
    pub height: f64,
    /// Twist of a tier's top polygon against its bottom polygon.
    pub twist: f64,
    /// Worst mismatch after rotating the unit by `2π/n` about the axis (mm).
    pub residual: f64,
    pub unit: FoldedUnit,
}

/// Folded configuration of a mirrored stack.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KreslingState {
    pub n: usize,
    pub radius: f64,
    pub chirality: Chirality,
    /// Per tier (half of a mirrored pair), bottom to top.
    pub heights: Vec<f64>,
    /// Signed per-tier rotation of the upper polygon.
    pub twists: Vec<f64>,
    /// Polygon `j` occupies `j·n .. (j+1)·n`.
    pub vertex_coords: Vec<P3>,
}

impl KreslingState {
    pub fn new(n: usize, radius: f64, chirality: Chirality, heights: Vec<f64>, twists: Vec<f64>) -> Self {
        let sense = match chirality {
            Chirality::Right => 1.0,
            Chirality::Left => -1.0,
        };
        let step = 2.0 * PI / n as f64;
        let mut coords = Vec::with_capacity((heights.len() + 1) * n);
        let (mut z, mut offset) = (0.0, 0.0);
        for j in 0..=heights.len() {
            if j > 0 {
                z += heights[j - 1];
                offset += twists[j - 1];
            }
            for i in 0..n {
                let ang = sense * step * i as f64 + offset;
                coords.push([radius * ang.cos(), radius * ang.sin(), z]);
            }
        }
        KreslingState { n, radius, chirality, heights, twists, vertex_coords: coords }
    }

    /// Stack of `2·levels` tiers alternating `+twist` and `−twist`.
    pub fn stack(n: usize, radius: f64, chirality: Chirality, levels: usize, height: f64, twist: f64) -> Self {
        let sign = match chirality {
            Chirality::Right => 1.0,
            Chirality::Left => -1.0,
        };
        let twists = (0..2 * levels).map(|k| if k % 2 == 0 { sign * twist } else { -sign * twist }).collect();
        Self::new(n, radius, chirality, vec![height; 2 * levels], twists)
    }

    pub fn tiers(&self) -> usize {
        self.heights.len()
    }

    pub fn polygon(&self, j: usize) -> &[P3] {
        &self.vertex_coords[j * self.n..(j + 1) * self.n]
    }

    pub fn total_height(&self) -> f64 {
        self.heights.iter().sum()
    }

    pub fn net_twist(&self) -> f64 {
        self.twists.iter().sum()
    }

    /// Outward-facing triangles of the folded sheet, two per unit.
    pub fn faces(&self) -> Vec<[u32; 3]> {
        let n = self.n;
        let id = |j: usize, i: usize| (j * n + i % n) as u32;
        let mut out = Vec::with_capacity(self.tiers() * 2 * n);
        for k in 0..self.tiers() {
            for i in 0..n {
                if k % 2 == 0 {
                    let (b, t) = (k, k + 1);
                    out.push([id(b, i), id(b, i + 1), id(t, i + 1)]);
                    out.push([id(b, i), id(t, i + 1), id(t, i)]);
                } else {
                    let (b, t) = (k + 1, k);
                    out.push([id(b, i), id(t, i + 1), id(b, i + 1)]);
                    out.push([id(b, i), id(t, i), id(t, i + 1)]);
                }
            }
        }
        if self.chirality == Chirality::Left {
            out.iter_mut().for_each(|f| f.swap(1, 2));
        }
        out
    }

    /// Sheet faces closed by flat polygon caps at both ends.
    pub fn cavity_facets(&self) -> Vec<[u32; 3]> {
        let n = self.n as u32;
        let top = self.tiers() as u32 * n;
        let mut f = self.faces();
        for i in 1..n - 1 {
            let (mut lo, mut hi) = ([0, i + 1, i], [top, top + i, top + i + 1]);
            if self.chirality == Chirality::Left {
                lo.swap(1, 2);
                hi.swap(1, 2);
            }
            f.push(lo);
            f.push(hi);
        }
        f
    }

    /// The open folded sheet.
    pub fn sheet(&self) -> TriMesh {
        TriMesh::new(self.vertex_coords.clone(), self.faces())
    }

    /// Enclosed volume of the capped sheet (mm³).
    pub fn volume(&self) -> f64 {
        TriMesh::new(self.vertex_coords.clone(), self.cavity_facets()).signed_volume()
    }
}

/// Assembled ring and stack.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Origami {
    pub params: KreslingParams,
    pub closure: Closure,
    pub unit: FoldedUnit,
    pub state: KreslingState,
    pub faces: Vec<[u32; 3]>,
}

impl Origami {
    pub fn rest_height(&self) -> f64 {
        self.state.total_height()
    }
}

fn unit_residual(params: &KreslingParams, unit: &FoldedUnit) -> Option<(P3, P3, f64)> {
    let [p0, p1, p2, p3] = unit.vertices;
    let n = params.n;
    let r = circumradius(n, params.b);
    let eb = geom::sub(p1, p0);
    let et = geom::sub(p2, p3);
    let cr = geom::cross(eb, et);
    if geom::norm(cr) < 1e-12 * params.b * params.b {
        return None;
    }
    let mut u = geom::normalize(cr);
    if geom::dot(u, geom::sub(p2, p0)) < 0.0 {
        u = geom::scale(u, -1.0);
    }
    let n1 = geom::tri_normal(p0, p1, p2);
    let mut m = geom::normalize(geom::cross(u, eb));
    if geom::dot(m, n1) > 0.0 {
        m = geom::scale(m, -1.0);
    }
    let mid = geom::lerp(p0, p1, 0.5);
    let axis_pt = geom::add(mid, geom::scale(m, r * (PI / n as f64).cos()));
    let v = geom::sub(p2, axis_pt);
    let radial = geom::sub(v, geom::scale(u, geom::dot(v, u)));
    Some((axis_pt, u, geom::norm(radial) - r))
}

fn fold_raw(params: &KreslingParams, alpha: f64) -> FoldedUnit {
    let c = params.theta.cos();
    let s = params.theta.sin();
    let p0 = [0.0; 3];
    let p1 = [params.b, 0.0, 0.0];
    let p2 = [params.a * c, params.a * s, 0.0];
    let p3 = [p2[0] - params.b, p2[1], 0.0];
    let axis = geom::normalize(p2);
    let p3 = geom::rotate_about(p3, p0, axis, PI - alpha);
    FoldedUnit {
        vertices: [p0, p1, p2, p3],
        chirality: Chirality::Right,
        dihedral: geom::dihedral(p0, p2, p1, p3),
        t_face: params.t_face,
    }
}

/// Solves for the fold angle that closes the `n`-fold ring, taking the
/// root nearest the requested `alpha`, and reports the tier height and
/// twist it implies.
pub fn solve_closure(params: &KreslingParams) -> Result<Closure, KreslingError> {
    params.validate()?;
    let n = params.n;
    let r = circumradius(n, params.b);
    let g = |alpha: f64| unit_residual(params, &fold_raw(params, alpha)).map_or(f64::NAN, |x| x.2);
    let roots = scan_roots(g, 1e-6, PI - 1e-6, 2000, 1e-12);
    let mut best: Option<Closure> = None;
    for alpha in roots {
        if g(alpha).abs() >= CLOSURE_TOL {
            continue;
        }
        let unit = fold_raw(params, alpha);
        let Some((axis_pt, u, _)) = unit_residual(params, &unit) else { continue };
        let [p0, p1, p2, p3] = unit.vertices;
        let step = 2.0 * PI / n as f64;
        let residual = geom::dist(geom::rotate_about(p0, axis_pt, u, step), p1)
            .max(geom::dist(geom::rotate_about(p3, axis_pt, u, step), p2));
        if residual > CLOSURE_TOL {
            continue;
        }
        let height = geom::dot(geom::sub(p2, p0), u);
        let radial = |p: P3| {
            let v = geom::sub(p, axis_pt);
            geom::sub(v, geom::scale(u, geom::dot(v, u)))
        };
        let e1 = geom::normalize(radial(p0));
        let e2 = geom::cross(u, e1);
        let q = radial(p3);
        let twist = geom::dot(q, e2).atan2(geom::dot(q, e1));
        let Some((height, twist)) = polish(params, r, height, twist) else { continue };
        if !(height > 0.0 && twist > 0.0 && twist < PI - step) {
            continue;
        }
        let [b0, b1, t1, t0] = tier_unit(n, r, height, twist);
        let realized = geom::dihedral(b0, t1, b1, t0);
        let cand = Closure { requested_alpha: params.alpha, alpha: realized, height, twist, residual, unit };
        if best.as_ref().is_none_or(|b| (cand.alpha - params.alpha).abs() < (b.alpha - params.alpha).abs()) {
            best = Some(cand);
        }
    }
    best.ok_or(KreslingError::ClosureFailure { n })
}

/// Newton refinement of (height, twist) on the squared diagonal lengths.
fn polish(params: &KreslingParams, r: f64, mut h: f64, mut phi: f64) -> Option<(f64, f64)> {
    let step = 2.0 * PI / params.n as f64;
    let (a2, c2) = (params.a * params.a, params.c().powi(2));
    let rr = 2.0 * r * r;
    for _ in 0..50 {
        let f1 = h * h + rr * (1.0 - (step + phi).cos()) - a2;
        let f2 = h * h + rr * (1.0 - phi.cos()) - c2;
        if f1.abs().max(f2.abs()) < 1e-14 * a2 {
            break;
        }
        let (j11, j12) = (2.0 * h, rr * (step + phi).sin());
        let (j21, j22) = (2.0 * h, rr * phi.sin());
        let det = j11 * j22 - j12 * j21;
        if det.abs() < 1e-300 {
            return None;
        }
        h -= (j22 * f1 - j12 * f2) / det;
        phi -= (j11 * f2 - j21 * f1) / det;
    }
    let (a, c) = bar_lengths(params.n, r, h, phi);
    ((a - params.a).abs() < 1e-9 * params.a && (c - params.c()).abs() < 1e-9 * params.a).then_some((h, phi))
}

/// Closes the ring and builds the mirrored stack of `levels` pairs.
pub fn assemble_origami(params: &KreslingParams) -> Result<Origami, KreslingError> {
    let closure = solve_closure(params)?;
    let unit = fold_basic_unit(&build_flat_pattern(params)?, closure.alpha, params.t_face)?;
    let state = KreslingState::stack(
        params.n,
        circumradius(params.n, params.b),
        params.chirality,
        params.levels,
        closure.height,
        closure.twist,
    );
    let faces = state.faces();
    Ok(Origami { params: params.clone(), closure, unit, state, faces })
}

/// Tier heights at which every diagonal can still reach its rest length.
pub fn feasible_band(params: &KreslingParams) -> (f64, f64) {
    (0.0, params.a.min(params.c()))
}

/// Configuration with every tier at height `h`, each twisted to minimize
/// the bar energy of the pure bar model.
pub fn kinematic_state(params: &KreslingParams, h: f64) -> Result<KreslingState, KreslingError> {
    let closure = solve_closure(params)?;
    let r = circumradius(params.n, params.b);
    let truss = TierTruss::new(params.n, r, closure.height, closure.twist, 1.0, params.t_face * params.b / 2.0, 0.0);
    kinematic_state_with(params, &truss, h)
}

/// As [`kinematic_state`] with a caller-supplied tier truss.
pub fn kinematic_state_with(
    params: &KreslingParams,
    truss: &TierTruss,
    h: f64,
) -> Result<KreslingState, KreslingError> {
    let (min, max) = feasible_band(params);
    if !(h >= min && h <= max) {
        return Err(KreslingError::InfeasibleHeight { h, min, max });
    }
    let (twist, _) = truss.relax(h);
    Ok(KreslingState::stack(params.n, truss.radius, params.chirality, params.levels, h, twist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::validate_mesh;

    fn preset() -> KreslingParams {
        KreslingParams::design(6, 15.0, 19.25, 20f64.to_radians(), 1.0, 1).unwrap()
    }

    /// Height and twist straight from the diagonal lengths.
    fn analytic(p: &KreslingParams) -> (f64, f64) {
        let r = p.circumradius();
        let n = p.n as f64;
        let c = p.c();
        let s = (p.a * p.a - c * c) / (4.0 * r * r * (PI / n).sin());
        let phi = s.asin() - PI / n;
        let h = (c * c - 2.0 * r * r * (1.0 - phi.cos())).sqrt();
        (h, phi)
    }

    #[test]
    fn design_round_trips_through_closure() {
        let p = preset();
        let c = solve_closure(&p).unwrap();
        assert!((c.height - 19.25).abs() < 1e-9, "{}", c.height);
        assert!((c.twist - 20f64.to_radians()).abs() < 1e-9);
        assert!((c.alpha - p.alpha).abs() < 1e-9);
        assert!(c.residual < 1e-6);
        let (h, phi) = analytic(&p);
        assert!((c.height - h).abs() < 1e-9 && (c.twist - phi).abs() < 1e-9);
    }

    #[test]
    fn ring_is_cyclic() {
        let o = assemble_origami(&preset()).unwrap();
        let v = &o.state.vertex_coords;
        for p in v {
            let q = geom::rot_z(*p, PI / 3.0);
            let best = v.iter().map(|w| geom::dist(*w, q)).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-6);
        }
        assert_eq!(o.faces.len(), 2 * 2 * 6 * 2 / 2);
        assert_eq!(o.state.net_twist(), 0.0);
    }

    #[test]
    fn face_count_and_closed_cavity() {
        let mut p = preset();
        p.levels = 3;
        let o = assemble_origami(&p).unwrap();
        assert_eq!(o.faces.len(), 3 * 2 * 6 * 2);
        let cav = TriMesh::new(o.state.vertex_coords.clone(), o.state.cavity_facets());
        let r = validate_mesh(&cav);
        assert!(r.closed_manifold && r.winding_consistent, "{:?}", r.problems());
        assert!(r.signed_volume > 0.0);
    }

    #[test]
    fn isometric_tiers() {
        let p = preset();
        let o = assemble_origami(&p).unwrap();
        for f in &o.faces {
            let mut lens: Vec<f64> = (0..3)
                .map(|k| {
                    geom::dist(o.state.vertex_coords[f[k] as usize], o.state.vertex_coords[f[(k + 1) % 3] as usize])
                })
                .collect();
            lens.sort_by(f64::total_cmp);
            let mut want = [p.a, p.b, p.c()];
            want.sort_by(f64::total_cmp);
            for (l, w) in lens.iter().zip(want) {
                assert!((l - w).abs() <= 1e-9 * w);
            }
        }
    }

    #[test]
    fn left_handed_is_mirror_image() {
        let mut p = preset();
        let right = assemble_origami(&p).unwrap();
        p.chirality = Chirality::Left;
        let left = assemble_origami(&p).unwrap();
        for (r, l) in right.state.vertex_coords.iter().zip(&left.state.vertex_coords) {
            assert!((r[0] - l[0]).abs() < 1e-12 && (r[1] + l[1]).abs() < 1e-12 && r[2] == l[2]);
        }
        assert!(left.state.twists[0] < 0.0);
        let cav = TriMesh::new(left.state.vertex_coords.clone(), left.state.cavity_facets());
        assert!((cav.signed_volume() - right.state.volume()).abs() < 1e-9);
    }

    #[test]
    fn flat_folded_state() {
        let s = kinematic_state(&preset(), 0.0).unwrap();
        assert!(s.vertex_coords.iter().all(|v| v[2] == 0.0));
        assert!(s.volume().abs() < 1e-9);
    }

    #[test]
    fn rest_height_recovers_design_twist() {
        let s = kinematic_state(&preset(), 19.25).unwrap();
        assert!((s.twists[0] - 20f64.to_radians()).abs() < 1e-6);
    }

    #[test]
    fn outside_band_rejected() {
        let p = preset();
        let (_, max) = feasible_band(&p);
        assert!(matches!(kinematic_state(&p, max + 0.1), Err(KreslingError::InfeasibleHeight { .. })));
        assert!(matches!(kinematic_state(&p, -0.1), Err(KreslingError::InfeasibleHeight { .. })));
    }

    #[test]
    fn impossible_ring_fails() {
        let p = KreslingParams {
            n: 6,
            a: 10.0,
            b: 15.0,
            theta: 0.3,
            alpha: 2.0,
            t_face: 0.5,
            levels: 1,
            chirality: Chirality::Right,
        };
        assert!(matches!(solve_closure(&p), Err(KreslingError::ClosureFailure { .. })));
    }
}
