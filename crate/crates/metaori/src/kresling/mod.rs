//! Kresling origami: flat pattern, folded unit, mirrored stack, ring
//! closure, kinematic states and the thickened printable solid.
//!
//! Lengths are in millimetres and angles in radians. The bottom polygon of
//! the stack lies in the `z = 0` plane, centred on the origin, with vertex
//! `i` at polar angle `2πi/n`.

mod assemble;
mod solid;

pub use assemble::{
    assemble_origami, feasible_band, kinematic_state, kinematic_state_with, solve_closure, Closure, KreslingState,
    Origami,
};
pub use solid::{thicken_faces, thicken_surface, OrigamiSolid};

use crate::geom::{self, P3};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KreslingError {
    #[error("invalid Kresling parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate pattern: triangle area {area:.3e} mm² is below 1e-9")]
    DegeneratePattern { area: f64 },
    #[error("fold angle {alpha:.6} rad makes the {t_face} mm faces interpenetrate")]
    InfeasibleFold { alpha: f64, t_face: f64 },
    #[error("no fold angle in (0, π) closes an {n}-fold ring")]
    ClosureFailure { n: usize },
    #[error("height {h:.6} mm is outside the feasible band [{min:.6}, {max:.6}]")]
    InfeasibleHeight { h: f64, min: f64, max: f64 },
    #[error("offset surfaces cross at {} triangle pairs", pairs.len())]
    SelfIntersection { pairs: Vec<(u32, u32)> },
    #[error(transparent)]
    Solve(#[from] crate::numeric::SolveError),
}

/// Handedness of the diagonal creases.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chirality {
    #[default]
    Right,
    Left,
}

impl Chirality {
    pub fn mirrored(self) -> Self {
        match self {
            Chirality::Right => Chirality::Left,
            Chirality::Left => Chirality::Right,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KreslingParams {
    /// Polygon side count.
    pub n: usize,
    /// Diagonal crease length (mm).
    pub a: f64,
    /// Polygon edge length (mm).
    pub b: f64,
    /// Pattern inclination of the diagonal against the polygon edge (rad).
    pub theta: f64,
    /// Requested dihedral along the diagonal crease (rad).
    pub alpha: f64,
    pub t_face: f64,
    /// Mirrored pairs stacked vertically.
    pub levels: usize,
    #[serde(default)]
    pub chirality: Chirality,
}

impl KreslingParams {
    /// Parameters whose folded ring has half-unit height `h` and relative
    /// polygon twist `phi`: the inverse of the closure solve.
    pub fn design(n: usize, b: f64, h: f64, phi: f64, t_face: f64, levels: usize) -> Result<Self, KreslingError> {
        if n < 3 || !(b > 0.0) || !(h > 0.0) || !(phi > 0.0 && phi < PI - 2.0 * PI / n as f64) {
            return Err(KreslingError::InvalidParams(format!(
                "design needs n ≥ 3, b > 0, h > 0 and twist in (0, π − 2π/n); got n={n}, b={b}, h={h}, twist={phi}"
            )));
        }
        let r = circumradius(n, b);
        let (a, c) = bar_lengths(n, r, h, phi);
        let theta = ((a * a + b * b - c * c) / (2.0 * a * b)).clamp(-1.0, 1.0).acos();
        let [b0, b1, t1, t0] = tier_unit(n, r, h, phi);
        let alpha = geom::dihedral(b0, t1, b1, t0);
        let p = KreslingParams { n, a, b, theta, alpha, t_face, levels, chirality: Chirality::Right };
        p.validate()?;
        Ok(p)
    }

    /// Third side of the pattern triangles.
    pub fn c(&self) -> f64 {
        (self.a * self.a + self.b * self.b - 2.0 * self.a * self.b * self.theta.cos()).max(0.0).sqrt()
    }

    pub fn circumradius(&self) -> f64 {
        circumradius(self.n, self.b)
    }

    pub fn validate(&self) -> Result<(), KreslingError> {
        let bad = |m: String| Err(KreslingError::InvalidParams(m));
        if self.n < 3 {
            return bad(format!("n = {} must be at least 3", self.n));
        }
        for (name, v) in [("a", self.a), ("b", self.b), ("t_face", self.t_face)] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} = {v} must be positive"));
            }
        }
        if !(self.theta > 0.0 && self.theta < PI) {
            return bad(format!("theta = {} must lie in (0, π)", self.theta));
        }
        if !(self.alpha > 0.0 && self.alpha <= PI) {
            return bad(format!("alpha = {} must lie in (0, π]", self.alpha));
        }
        if self.levels < 1 {
            return bad("levels must be at least 1".into());
        }
        let area = 0.5 * self.a * self.b * self.theta.sin();
        if area < 1e-9 {
            return Err(KreslingError::DegeneratePattern { area });
        }
        let shortest = self.a.min(self.b).min(self.c());
        if self.t_face >= shortest {
            return bad(format!("t_face = {} must be below the shortest pattern edge {shortest}", self.t_face));
        }
        Ok(())
    }
}

pub(crate) fn circumradius(n: usize, b: f64) -> f64 {
    b / (2.0 * (PI / n as f64).sin())
}

/// Diagonal lengths `(a, c)` of a tier with height `h` and twist `phi`.
pub(crate) fn bar_lengths(n: usize, r: f64, h: f64, phi: f64) -> (f64, f64) {
    let step = 2.0 * PI / n as f64;
    let a2 = h * h + 2.0 * r * r * (1.0 - (step + phi).cos());
    let c2 = h * h + 2.0 * r * r * (1.0 - phi.cos());
    (a2.sqrt(), c2.sqrt())
}

/// `[B_0, B_1, T_1, T_0]` of the first tier in the stack frame.
pub(crate) fn tier_unit(n: usize, r: f64, h: f64, phi: f64) -> [P3; 4] {
    let step = 2.0 * PI / n as f64;
    let at = |ang: f64, z: f64| [r * ang.cos(), r * ang.sin(), z];
    [at(0.0, 0.0), at(step, 0.0), at(step + phi, h), at(phi, h)]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CreaseLabel {
    Mountain,
    Valley,
    Boundary,
}

/// Planar unit of the crease pattern: a parallelogram `P0 P1 P2 P3` split
/// along the diagonal `P0 P2` into `F1 = (P0, P1, P2)` and `F2 = (P0, P2, P3)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatPattern {
    pub vertices: [[f64; 2]; 4],
    pub triangles: [[usize; 3]; 2],
    pub creases: Vec<([usize; 2], CreaseLabel)>,
}

impl FlatPattern {
    pub fn edge_length(&self, e: [usize; 2]) -> f64 {
        let (p, q) = (self.vertices[e[0]], self.vertices[e[1]]);
        (p[0] - q[0]).hypot(p[1] - q[1])
    }

    pub fn label(&self, e: [usize; 2]) -> Option<CreaseLabel> {
        self.creases.iter().find(|(k, _)| *k == e || *k == [e[1], e[0]]).map(|&(_, l)| l)
    }
}

pub fn build_flat_pattern(params: &KreslingParams) -> Result<FlatPattern, KreslingError> {
    let KreslingParams { a, b, theta, .. } = *params;
    if !(a.is_finite() && a > 0.0 && b.is_finite() && b > 0.0 && theta.is_finite()) {
        return Err(KreslingError::InvalidParams(format!("pattern needs a, b > 0; got a={a}, b={b}")));
    }
    let area = 0.5 * a * b * theta.sin();
    if area < 1e-9 {
        return Err(KreslingError::DegeneratePattern { area });
    }
    let p2 = [a * theta.cos(), a * theta.sin()];
    Ok(FlatPattern {
        vertices: [[0.0, 0.0], [b, 0.0], p2, [p2[0] - b, p2[1]]],
        triangles: [[0, 1, 2], [0, 2, 3]],
        creases: vec![
            ([0, 2], CreaseLabel::Valley),
            ([1, 2], CreaseLabel::Mountain),
            ([0, 3], CreaseLabel::Mountain),
            ([3, 2], CreaseLabel::Valley),
            ([0, 1], CreaseLabel::Boundary),
        ],
    })
}

/// The two pattern triangles in 3-D. `F1` stays in the `z = 0` plane with
/// outward normal `+z`; `F2` is turned about the diagonal toward `+z`, so
/// the diagonal folds as a valley seen from outside.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoldedUnit {
    /// `[P0, P1, P2, P3]`, indices as in [`FlatPattern`].
    pub vertices: [P3; 4],
    pub chirality: Chirality,
    /// Realized dihedral along the diagonal.
    pub dihedral: f64,
    pub t_face: f64,
}

impl FoldedUnit {
    pub fn triangles(&self) -> [[usize; 3]; 2] {
        match self.chirality {
            Chirality::Right => [[0, 1, 2], [0, 2, 3]],
            Chirality::Left => [[0, 2, 1], [0, 3, 2]],
        }
    }

    /// Unit axis perpendicular to both polygon edges `P0P1` and `P3P2`,
    /// pointing from the bottom edge toward the top one.
    pub fn axis(&self) -> P3 {
        let [p0, p1, p2, p3] = self.vertices;
        let u = geom::normalize(geom::cross(geom::sub(p1, p0), geom::sub(p2, p3)));
        if geom::dot(u, geom::sub(p2, p0)) < 0.0 {
            geom::scale(u, -1.0)
        } else {
            u
        }
    }

    /// Height of the top edge above the bottom edge along [`Self::axis`].
    pub fn height(&self) -> f64 {
        geom::dot(geom::sub(self.vertices[2], self.vertices[0]), self.axis())
    }
}

pub fn fold_basic_unit(pattern: &FlatPattern, alpha: f64, t_face: f64) -> Result<FoldedUnit, KreslingError> {
    if !(alpha > 0.0 && alpha <= PI) {
        return Err(KreslingError::InvalidParams(format!("alpha = {alpha} must lie in (0, π]")));
    }
    if !(t_face > 0.0) {
        return Err(KreslingError::InvalidParams(format!("t_face = {t_face} must be positive")));
    }
    let lift = |p: [f64; 2]| [p[0], p[1], 0.0];
    let [p0, p1, p2, p3] = pattern.vertices.map(lift);
    // Both faces stay clear of each other while the inner offset corner at
    // the crease remains inside each triangle.
    let reach = point_line_distance(p1, p0, p2).min(point_line_distance(p3, p0, p2));
    if alpha < PI && 0.5 * t_face / (0.5 * alpha).tan() >= reach {
        return Err(KreslingError::InfeasibleFold { alpha, t_face });
    }
    let axis = geom::normalize(geom::sub(p2, p0));
    let p3 = if alpha == PI { p3 } else { geom::rotate_about(p3, p0, axis, PI - alpha) };
    let dihedral = geom::dihedral(p0, p2, p1, p3);
    Ok(FoldedUnit { vertices: [p0, p1, p2, p3], chirality: Chirality::Right, dihedral, t_face })
}

fn point_line_distance(p: P3, a: P3, b: P3) -> f64 {
    geom::norm(geom::cross(geom::sub(p, a), geom::normalize(geom::sub(b, a))))
}

/// The unit and its reflection through the plane of its top edge
/// perpendicular to [`FoldedUnit::axis`]. Top-edge vertices are shared
/// exactly.
pub fn mirror_and_stack(unit: &FoldedUnit) -> (FoldedUnit, FoldedUnit) {
    let u = unit.axis();
    let top = unit.vertices[2];
    let reflect = |p: P3| geom::sub(p, geom::scale(u, 2.0 * geom::dot(geom::sub(p, top), u)));
    let mut verts = unit.vertices.map(reflect);
    verts[2] = unit.vertices[2];
    verts[3] = unit.vertices[3];
    let copy = FoldedUnit {
        vertices: verts,
        chirality: unit.chirality.mirrored(),
        dihedral: geom::dihedral(verts[0], verts[2], verts[1], verts[3]),
        t_face: unit.t_face,
    };
    (unit.clone(), copy)
}
