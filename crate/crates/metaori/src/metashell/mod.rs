//! Bistable cylindrical metashell: rings of double-clamped cosine beams
//! carried by support columns, unrolled as a planar pattern and wrapped
//! onto a cylinder.
//!
//! In the planar pattern `u` runs along the circumference and `v` along the
//! axis. Each cell has one arch whose two halves are mirrored cosine beams
//! clamped to the columns on either side; a post of width `2t` joins the
//! apex to the band above, so pulling the bands together pushes the apex
//! down through its snap.

mod contour;
mod shell;

pub use shell::{assemble_metashell, assemble_metashell_with, MetashellSolid};

use contour::{solid_region, Field};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetashellError {
    #[error("invalid metashell parameters: {0}")]
    InvalidParams(String),
    #[error("x = {x} mm is outside the beam range [{min}, 0]")]
    OutOfDomain { x: f64, min: f64 },
    #[error("geometry conflict: {0}")]
    GeometryConflict(String),
    #[error("depth {depth} mm does not fit inside the mid-surface radius {radius} mm")]
    WrapFailure { depth: f64, radius: f64 },
}

/// Shape of the widened column foot under each beam clamp.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportProfile {
    /// Straight 45° taper of leg `r`.
    #[default]
    Linear,
    /// Concave quarter circle of radius `r`.
    Fillet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetashellParams {
    /// Support column width (mm).
    pub c: f64,
    /// Curved beam span (mm).
    pub l: f64,
    /// Beam thickness (mm).
    pub t: f64,
    /// Beam apex rise (mm).
    pub h: f64,
    /// Support widening radius (mm).
    pub r: f64,
    /// Clearance between the widened support and the beam (mm).
    pub delta: f64,
    /// Solid wall added below and above the beam rows (mm).
    pub wall_height: f64,
    pub rows: usize,
    pub cols: usize,
    /// Radial thickness (mm).
    pub depth: f64,
    pub infill_per_row: Vec<f64>,
    #[serde(default)]
    pub support: SupportProfile,
    /// Ratio of wrapped to planar cell pitch.
    #[serde(default = "one")]
    pub pitch_scale: f64,
    /// Target grid spacing of the planar mesh (mm).
    #[serde(default = "default_mesh_size")]
    pub mesh_size: f64,
}

fn one() -> f64 {
    1.0
}

fn default_mesh_size() -> f64 {
    0.5
}

impl MetashellParams {
    /// One row of four cells with the reference cell dimensions.
    pub fn paper() -> Self {
        MetashellParams {
            c: 12.5,
            l: 22.5,
            t: 1.25,
            h: 9.4,
            r: 7.6,
            delta: 0.63,
            wall_height: 12.5,
            rows: 1,
            cols: 4,
            depth: 5.0,
            infill_per_row: vec![0.99],
            support: SupportProfile::Linear,
            pitch_scale: PI * 41.25 / 140.0,
            mesh_size: 0.5,
        }
    }

    pub fn validate(&self) -> Result<(), MetashellError> {
        let bad = |m: String| Err(MetashellError::InvalidParams(m));
        for (name, v) in [
            ("c", self.c),
            ("l", self.l),
            ("t", self.t),
            ("h", self.h),
            ("r", self.r),
            ("wall_height", self.wall_height),
            ("depth", self.depth),
            ("pitch_scale", self.pitch_scale),
            ("mesh_size", self.mesh_size),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} = {v} must be a positive length"));
            }
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return bad(format!("delta = {} must be non-negative", self.delta));
        }
        if self.cols < 2 {
            return bad(format!("cols = {} must be at least 2", self.cols));
        }
        if self.rows < 1 {
            return bad("rows must be at least 1".into());
        }
        if self.infill_per_row.len() != self.rows {
            return bad(format!("{} infill values for {} rows", self.infill_per_row.len(), self.rows));
        }
        if let Some(f) = self.infill_per_row.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
            return bad(format!("infill {f} is outside (0, 1]"));
        }
        if self.mesh_size > self.t {
            return bad(format!("mesh_size {} cannot resolve beams of thickness {}", self.mesh_size, self.t));
        }
        Ok(())
    }

    /// Planar cell pitch `l + c`.
    pub fn pitch(&self) -> f64 {
        self.l + self.c
    }

    /// Axial extent of one beam row between its bands.
    pub fn row_height(&self) -> f64 {
        0.5 * self.pitch()
    }

    /// Solid band between consecutive rows.
    pub fn band_height(&self) -> f64 {
        2.0 * self.t
    }

    /// `v` of the bottom of row `k`.
    pub fn row_base(&self, k: usize) -> f64 {
        self.wall_height + k as f64 * (self.row_height() + self.band_height())
    }

    pub fn overall_height(&self) -> f64 {
        2.0 * self.wall_height + self.rows as f64 * self.row_height() + (self.rows - 1) as f64 * self.band_height()
    }

    /// Slenderness `h/t`.
    pub fn q(&self) -> f64 {
        self.h / self.t
    }

    pub fn mid_radius(&self) -> f64 {
        self.cols as f64 * self.pitch() * self.pitch_scale / (2.0 * PI)
    }

    /// Height of the beam clamps above the row base.
    pub fn clamp_line(&self) -> f64 {
        0.5 * (self.row_height() - self.h)
    }

    /// Top of the widened supports, `δ` below the beam at its clamp.
    pub fn support_top(&self) -> f64 {
        self.clamp_line() - 0.5 * self.t - self.delta
    }

    /// Apex travel at which the beam reaches the band below.
    pub fn travel_stop(&self) -> f64 {
        self.clamp_line() + self.h - 0.5 * self.t
    }

    pub fn infill(&self, row: usize) -> f64 {
        self.infill_per_row[row]
    }

    fn check_geometry(&self) -> Result<(), MetashellError> {
        let conflict = |m: String| Err(MetashellError::GeometryConflict(m));
        if self.t >= self.h {
            return conflict(format!("beam thickness {} is not below the rise {}", self.t, self.h));
        }
        if self.h + self.t >= self.row_height() {
            return conflict(format!(
                "arch of rise {} and thickness {} does not fit a row of {}",
                self.h,
                self.t,
                self.row_height()
            ));
        }
        let room = self.clamp_line() - 0.5 * self.t;
        if self.delta >= room {
            return conflict(format!(
                "clearance {} leaves no support below the beam (available {room:.4})",
                self.delta
            ));
        }
        if 2.0 * self.r >= self.l {
            return conflict(format!("supports of radius {} overlap across the span {}", self.r, self.l));
        }
        if 2.0 * self.t >= 0.5 * self.l {
            return conflict(format!("post of width {} crowds the span {}", 2.0 * self.t, self.l));
        }
        Ok(())
    }
}

/// Cosine beam `y = (h/2)(1 − cos(2πx/l))` on `x ∈ [−l/2, 0]`.
pub fn beam_profile(x: f64, h: f64, l: f64) -> Result<f64, MetashellError> {
    if !(x >= -0.5 * l && x <= 0.0) {
        return Err(MetashellError::OutOfDomain { x, min: -0.5 * l });
    }
    Ok(0.5 * h * (1.0 - (2.0 * PI * x / l).cos()))
}

/// Signed distance-like function of one beam row in cell coordinates:
/// `s = |u|` from the post axis and `w` above the row base. Negative in
/// material.
fn row_field(p: &MetashellParams, s: f64, w: f64) -> f64 {
    let half_pitch = 0.5 * p.pitch();
    let half_span = 0.5 * p.l;
    let vc = p.clamp_line();
    let apex = vc + p.h;
    let ht = 0.5 * p.t;

    let column = (half_span - s).max(w - (vc + ht));
    let post = (s - p.t).max(apex - w);
    let arch = centreline_distance(s.min(half_pitch), w, p) - ht;
    let top = p.support_top();
    let support = match p.support {
        SupportProfile::Linear => (((half_span - s) + w - p.r) * std::f64::consts::FRAC_1_SQRT_2).max(w - top),
        SupportProfile::Fillet => {
            let (cu, cv) = (half_span - p.r, p.r);
            let outside = p.r - (s - cu).hypot(w - cv);
            outside.max(cu - s).max(w - top).max(w - cv)
        }
    };
    column.min(post).min(arch).min(support)
}

/// Distance from `(s, w)` to the arch centreline, extended horizontally
/// across the column.
fn centreline_distance(s: f64, w: f64, p: &MetashellParams) -> f64 {
    let half_span = 0.5 * p.l;
    let vc = p.clamp_line();
    let k = 2.0 * PI / p.l;
    let curve = |x: f64| -> (f64, f64, f64) {
        if x >= half_span {
            (vc, 0.0, 0.0)
        } else {
            let (sn, cs) = (k * x).sin_cos();
            (vc + 0.5 * p.h * (1.0 + cs), -0.5 * p.h * k * sn, -0.5 * p.h * k * k * cs)
        }
    };
    let x_max = 0.5 * p.pitch();
    let mut x = s;
    for _ in 0..30 {
        let (y, dy, ddy) = curve(x);
        let g = (x - s) + (y - w) * dy;
        let hss = 1.0 + dy * dy + (y - w) * ddy;
        let step = if hss > 1e-6 { -g / hss } else { -0.5 * g };
        let xn = (x + step).clamp(0.0, x_max);
        if (xn - x).abs() < 1e-13 {
            x = xn;
            break;
        }
        x = xn;
    }
    let (y, _, _) = curve(x);
    (x - s).hypot(y - w)
}

/// Field of the whole planar pattern at cell coordinate `s = |u|` and
/// axial position `v`.
fn pattern_field(p: &MetashellParams, s: f64, v: f64) -> f64 {
    let hr = p.row_height();
    let mut band = f64::NEG_INFINITY;
    let mut best_row = 0;
    for k in 0..p.rows {
        let w = v - p.row_base(k);
        let inside = w.min(hr - w);
        if inside > band {
            band = inside;
            best_row = k;
        }
    }
    let w = v - p.row_base(best_row);
    band.min(row_field(p, s, w))
}

/// Planar outline of one cell and one beam row, with half bands above and
/// below. Coordinates are `(u, v)` with the post on `u = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellOutline {
    pub pitch: f64,
    pub row_height: f64,
    pub clamp_line: f64,
    pub apex: f64,
    pub post_width: f64,
    pub support_top: f64,
    /// The supports touch the beams.
    pub zero_clearance: bool,
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[u32; 3]>,
    /// Boundary loops of the material region.
    pub loops: Vec<Vec<u32>>,
}

impl CellOutline {
    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|k| self.vertices[k as usize]);
                0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
            })
            .sum()
    }
}

/// Cells per row sampled with an even node count so that each cell is
/// mirror-symmetric about its post.
fn cell_divisions(p: &MetashellParams) -> usize {
    let n = (p.pitch() / p.mesh_size).ceil() as usize;
    n + n % 2
}

/// Grid levels covering `[lo, hi]` with spacing at most `step`, passing
/// through every break inside the range.
fn levels(lo: f64, hi: f64, step: f64, breaks: &[f64]) -> Vec<f64> {
    let mut b: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
    b.push(lo);
    b.push(hi);
    b.sort_by(f64::total_cmp);
    b.dedup_by(|a, c| (*a - *c).abs() < 1e-9);
    let mut out = vec![b[0]];
    for w in b.windows(2) {
        let n = ((w[1] - w[0]) / step).ceil().max(1.0) as usize;
        for k in 1..=n {
            out.push(if k == n { w[1] } else { w[0] + (w[1] - w[0]) * k as f64 / n as f64 });
        }
    }
    out
}

pub fn build_unit_cell_outline(params: &MetashellParams) -> Result<CellOutline, MetashellError> {
    params.validate()?;
    params.check_geometry()?;
    let n = cell_divisions(params);
    let du = params.pitch() / n as f64;
    let us: Vec<f64> = (0..=n).map(|j| (j as f64 - (n / 2) as f64) * du).collect();
    let hr = params.row_height();
    let vs = levels(-params.t, hr + params.t, params.mesh_size, &[0.0, hr]);
    let single = MetashellParams { rows: 1, wall_height: params.t, infill_per_row: vec![1.0], ..params.clone() };
    let field = Field::sample(us.len(), vs.len(), false, |i, j| pattern_field(&single, us[i].abs(), vs[j] + params.t));
    let region = solid_region(&field);
    let vertices: Vec<[f64; 2]> = region
        .points
        .iter()
        .map(|g| {
            let (i, j) = (g.u.floor() as usize, g.v.floor() as usize);
            let u = us[i] + (g.u - i as f64) * du;
            let v = if g.v == j as f64 { vs[j] } else { vs[j] + (g.v - j as f64) * (vs[j + 1] - vs[j]) };
            [u, v]
        })
        .collect();
    let loops = chain_loops(&region.boundary_edges());
    Ok(CellOutline {
        pitch: params.pitch(),
        row_height: hr,
        clamp_line: params.clamp_line(),
        apex: params.clamp_line() + params.h,
        post_width: 2.0 * params.t,
        support_top: params.support_top(),
        zero_clearance: params.delta == 0.0,
        vertices,
        triangles: region.triangles,
        loops,
    })
}

/// Chains directed boundary edges into closed loops.
fn chain_loops(edges: &[(u32, u32)]) -> Vec<Vec<u32>> {
    let mut next: std::collections::BTreeMap<u32, Vec<u32>> = std::collections::BTreeMap::new();
    for &(a, b) in edges {
        next.entry(a).or_default().push(b);
    }
    let mut loops = Vec::new();
    while let Some((&start, _)) = next.iter().find(|(_, v)| !v.is_empty()) {
        let mut lp = vec![start];
        let mut cur = start;
        loop {
            let Some(nx) = next.get_mut(&cur).and_then(|v| v.pop()) else { break };
            if nx == start {
                break;
            }
            lp.push(nx);
            cur = nx;
        }
        loops.push(lp);
    }
    loops
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_values_and_domain() {
        assert_eq!(beam_profile(0.0, 9.4, 22.5).unwrap(), 0.0);
        assert!((beam_profile(-11.25, 9.4, 22.5).unwrap() - 9.4).abs() < 1e-12);
        assert!((beam_profile(-5.625, 9.4, 22.5).unwrap() - 4.7).abs() < 1e-12);
        assert!(matches!(beam_profile(0.1, 9.4, 22.5), Err(MetashellError::OutOfDomain { .. })));
        assert!(matches!(beam_profile(-11.3, 9.4, 22.5), Err(MetashellError::OutOfDomain { .. })));
    }

    #[test]
    fn paper_layout() {
        let p = MetashellParams::paper();
        p.validate().unwrap();
        assert_eq!(p.pitch(), 35.0);
        assert!((p.overall_height() - 42.5).abs() < 1e-12);
        assert!((p.q() - 7.52).abs() < 1e-12);
        assert!((2.0 * p.mid_radius() - 41.25).abs() < 1e-12);
    }

    #[test]
    fn centreline_distance_is_exact_on_samples() {
        let p = MetashellParams::paper();
        for k in 0..=20 {
            let x = 11.25 * k as f64 / 20.0;
            let y = p.clamp_line() + beam_profile(-11.25 + x, p.h, p.l).unwrap();
            let dy = 0.5 * p.h * (2.0 * PI / p.l) * (2.0 * PI * x / p.l).sin();
            let nrm = (1.0 + dy * dy).sqrt();
            let off = 0.3;
            let (s, w) = (x + off * dy / nrm, y + off / nrm);
            assert!((centreline_distance(s, w, &p) - off).abs() < 1e-9, "x = {x}");
        }
    }

    #[test]
    fn outline_pitch_area_and_symmetry() {
        let p = MetashellParams::paper();
        let o = build_unit_cell_outline(&p).unwrap();
        assert_eq!(o.pitch, 35.0);
        assert!(!o.zero_clearance);
        let xs: Vec<f64> = o.vertices.iter().map(|v| v[0]).collect();
        let (lo, hi) = xs.iter().fold((f64::MAX, f64::MIN), |a, &x| (a.0.min(x), a.1.max(x)));
        assert!((lo + 17.5).abs() < 1e-12 && (hi - 17.5).abs() < 1e-12);
        let mut keys: Vec<(i64, i64)> =
            o.vertices.iter().map(|v| ((v[0] * 1e7).round() as i64, (v[1] * 1e7).round() as i64)).collect();
        keys.sort();
        for v in &o.vertices {
            let m = ((-v[0] * 1e7).round() as i64, (v[1] * 1e7).round() as i64);
            assert!(
                keys.binary_search(&m).is_ok()
                    || keys.binary_search(&(m.0 + 1, m.1)).is_ok()
                    || keys.binary_search(&(m.0 - 1, m.1)).is_ok()
            );
        }
        let total = o.pitch * (o.row_height + 2.0 * p.t);
        assert!(o.area() > 0.3 * total && o.area() < 0.7 * total, "{}", o.area());
    }

    #[test]
    fn zero_clearance_is_flagged() {
        let p = MetashellParams { delta: 0.0, ..MetashellParams::paper() };
        assert!(build_unit_cell_outline(&p).unwrap().zero_clearance);
    }

    #[test]
    fn conflicts() {
        let base = MetashellParams::paper();
        for p in [
            MetashellParams { t: 9.4, ..base.clone() },
            MetashellParams { t: 10.0, mesh_size: 0.5, ..base.clone() },
            MetashellParams { delta: 3.5, ..base.clone() },
            MetashellParams { r: 11.5, ..base.clone() },
            MetashellParams { h: 16.5, ..base.clone() },
        ] {
            assert!(matches!(build_unit_cell_outline(&p), Err(MetashellError::GeometryConflict(_))), "{p:?}");
        }
        assert!(matches!(
            build_unit_cell_outline(&MetashellParams { cols: 1, ..base }),
            Err(MetashellError::InvalidParams(_))
        ));
    }

    #[test]
    fn levels_hit_breaks() {
        let l = levels(0.0, 10.0, 0.5, &[2.0, 3.3, 12.0]);
        assert!(l.contains(&2.0) && l.contains(&3.3) && l[0] == 0.0 && *l.last().unwrap() == 10.0);
        assert!(l.windows(2).all(|w| w[1] - w[0] <= 0.5 + 1e-12 && w[1] > w[0]));
    }
}
