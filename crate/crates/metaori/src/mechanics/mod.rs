//! Reduced-order mechanics of the actuator.
//!
//! Displacements `d` are axial compressions measured from the printed
//! (open) state, in mm. Forces are the force needed to hold a given
//! compression, so they are positive while the structure pushes back.
//! Internally everything is mm, N and MPa; volumes leave this module in
//! mL and pressures in mbar.

pub mod beam;
mod curves;
pub mod elastica;
mod events;
mod pv;
mod sequence;
pub mod truss;

pub use curves::{
    bistable_metashell_fd, combined_fd, elastica_oracle, metashell_fd, metashell_fd_on, origami_fd, origami_fd_on,
    predict_elongation, stroke_grid, OrigamiModel,
};
pub use events::{detect_events, EventReport, Extremum, ExtremumKind};
pub use pv::{cavity_volume, pv_curve, Branch, PVCurve, SnapEvent};
pub use sequence::{
    segments_of, simulate_sequence, volume_ramp, SegmentResponse, SegmentSpec, SequenceEvent, SequenceResult,
};

use crate::kresling::KreslingError;
use crate::metashell::MetashellError;
use crate::numeric::SolveError;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// mm³ per mL.
pub const MM3_PER_ML: f64 = 1000.0;
/// mbar per N/mm².
pub const MBAR_PER_MPA: f64 = 1e4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MechanicsError {
    #[error("invalid material parameters: {0}")]
    InvalidParams(String),
    #[error("equilibrium solve failed at d = {d:.6} mm: {source}")]
    NoConvergence { d: f64, source: SolveError },
    #[error("beam with h/t = {q:.3} is outside the bistable range of the beam model")]
    ModelDomain { q: f64 },
    #[error("the metashell is not bistable")]
    NotBistable,
    #[error("curves share no displacement range: [{a0}, {a1}] vs [{b0}, {b1}]")]
    DomainMismatch { a0: f64, a1: f64, b0: f64, b1: f64 },
    #[error("facet set is not closed: {boundary_edges} boundary edges")]
    OpenCavity { boundary_edges: usize },
    #[error("volume map is degenerate at d = {d:.6} mm (dV/dd = {slope:.3e} mL/mm)")]
    DegenerateVolumeMap { d: f64, slope: f64 },
    #[error("no equilibrium at V = {volume:.6} mL after {iterations} relaxation steps (residual {residual:.3e})")]
    NoEquilibrium { volume: f64, iterations: usize, residual: f64 },
    #[error("displacement samples must be finite and strictly increasing")]
    BadGrid,
    #[error(transparent)]
    Origami(#[from] KreslingError),
    #[error(transparent)]
    Shell(#[from] MetashellError),
}

/// Material model shared by the shell and the origami.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaterialParams {
    /// Young's modulus (MPa).
    pub youngs_modulus: f64,
    /// Stiffness scale at zero infill; the scale rises linearly to 1 at
    /// full infill.
    pub infill_floor: f64,
    /// Cross-section of the origami bars (mm²); `t_face·b/2` when unset.
    pub bar_area: Option<f64>,
    /// Crease hinge stiffness (N·mm/rad).
    pub hinge_stiffness: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        MaterialParams { youngs_modulus: 12.0, infill_floor: 0.3, bar_area: None, hinge_stiffness: 0.0 }
    }
}

impl MaterialParams {
    pub fn validate(&self) -> Result<(), MechanicsError> {
        let bad = |m: String| Err(MechanicsError::InvalidParams(m));
        if !(self.youngs_modulus.is_finite() && self.youngs_modulus > 0.0) {
            return bad(format!("youngs_modulus = {} must be positive", self.youngs_modulus));
        }
        if !(self.infill_floor > 0.0 && self.infill_floor <= 1.0) {
            return bad(format!("infill_floor = {} must lie in (0, 1]", self.infill_floor));
        }
        if let Some(a) = self.bar_area {
            if !(a.is_finite() && a > 0.0) {
                return bad(format!("bar_area = {a} must be positive"));
            }
        }
        if !(self.hinge_stiffness.is_finite() && self.hinge_stiffness >= 0.0) {
            return bad(format!("hinge_stiffness = {} must be non-negative", self.hinge_stiffness));
        }
        Ok(())
    }

    /// Stiffness scale for an infill fraction in `(0, 1]`.
    pub fn stiffness_scale(&self, infill: f64) -> f64 {
        self.infill_floor + (1.0 - self.infill_floor) * infill
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveRole {
    Meta,
    Ori,
    Combined,
}

/// Force against compression, sampled on strictly increasing `d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FDCurve {
    pub role: CurveRole,
    /// `(d, F)` pairs in mm and N.
    pub samples: Vec<(f64, f64)>,
}

impl FDCurve {
    pub fn new(role: CurveRole, samples: Vec<(f64, f64)>) -> Result<Self, MechanicsError> {
        check_grid(samples.iter().map(|s| s.0))?;
        Ok(FDCurve { role, samples })
    }

    pub fn displacements(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.0).collect()
    }

    pub fn forces(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.1).collect()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.samples[0].0, self.samples[self.samples.len() - 1].0)
    }

    /// Linear interpolation; exact at the samples. `None` outside the
    /// domain.
    pub fn at(&self, d: f64) -> Option<f64> {
        let (lo, hi) = self.domain();
        if !(d >= lo && d <= hi) {
            return None;
        }
        let k = self.samples.partition_point(|s| s.0 <= d);
        if k == 0 {
            return Some(self.samples[0].1);
        }
        let (d0, f0) = self.samples[k - 1];
        if d == d0 || k == self.samples.len() {
            return Some(f0);
        }
        let (d1, f1) = self.samples[k];
        Some(f0 + (d - d0) / (d1 - d0) * (f1 - f0))
    }

    /// Interpolated zero crossings past the first sample, each with the sign
    /// of the force slope there.
    pub fn zero_crossings(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for w in self.samples.windows(2) {
            let ((d0, f0), (d1, f1)) = (w[0], w[1]);
            if f0 != 0.0 && (f1 == 0.0 || f0.signum() != f1.signum()) {
                let d = d0 + f0 / (f0 - f1) * (d1 - d0);
                out.push((d, (f1 - f0).signum()));
            }
        }
        out
    }

    /// Zero crossings with rising force, where compression is resisted on
    /// both sides.
    pub fn stable_zeros(&self) -> Vec<f64> {
        self.zero_crossings().into_iter().filter(|z| z.1 > 0.0).map(|z| z.0).collect()
    }

    pub fn to_csv(&self) -> String {
        write_csv("d_mm,F_N", self.samples.iter().copied())
    }
}

pub(crate) fn check_grid(xs: impl IntoIterator<Item = f64>) -> Result<(), MechanicsError> {
    let mut prev = f64::NEG_INFINITY;
    let mut count = 0;
    for x in xs {
        if !x.is_finite() || x <= prev {
            return Err(MechanicsError::BadGrid);
        }
        prev = x;
        count += 1;
    }
    if count < 2 {
        return Err(MechanicsError::BadGrid);
    }
    Ok(())
}

/// Formats `x` with nine significant digits.
pub fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.8e}")
    }
}

pub(crate) fn write_csv(header: &str, rows: impl Iterator<Item = (f64, f64)>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for (a, b) in rows {
        let _ = writeln!(out, "{},{}", sig9(a), sig9(b));
    }
    out
}
