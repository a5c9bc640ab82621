use super::events::{detect_events, ExtremumKind};
use super::{sig9, write_csv, FDCurve, MechanicsError, MBAR_PER_MPA, MM3_PER_ML};
use crate::mesh::TriMesh;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt::Write;

/// Smallest usable volume change per mm of stroke (mL/mm).
const MIN_VOLUME_SLOPE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Inflation,
    Deflation,
}

/// A pressure limit point: under pressure control the actuator snaps
/// there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapEvent {
    pub kind: ExtremumKind,
    pub branch: Branch,
    /// mL.
    pub volume: f64,
    /// mbar.
    pub pressure: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PVCurve {
    /// `(V, P)` pairs in mL and mbar, by increasing volume.
    pub samples: Vec<(f64, f64)>,
    /// Compression of each sample (mm).
    pub stroke: Vec<f64>,
    pub events: Vec<SnapEvent>,
    pub bistable: bool,
}

impl PVCurve {
    pub fn to_csv(&self) -> String {
        write_csv("V_mL,P_mbar", self.samples.iter().copied())
    }

    pub fn events_csv(&self) -> String {
        let mut out = String::from("type,branch,V_mL,P_mbar\n");
        for e in &self.events {
            let kind = match e.kind {
                ExtremumKind::Maximum => "maximum",
                ExtremumKind::Minimum => "minimum",
            };
            let branch = match e.branch {
                Branch::Inflation => "inflation",
                Branch::Deflation => "deflation",
            };
            let _ = writeln!(out, "{kind},{branch},{},{}", sig9(e.volume), sig9(e.pressure));
        }
        out
    }

    pub fn max_pressure(&self) -> f64 {
        self.samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_pressure(&self) -> f64 {
        self.samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min)
    }
}

/// Volume enclosed by a closed facet set, in mL.
pub fn cavity_volume(mesh: &TriMesh) -> Result<f64, MechanicsError> {
    let mut edges: HashMap<(u32, u32), usize> = HashMap::new();
    for t in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *edges.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let boundary_edges = edges.values().filter(|&&c| c != 2).count();
    if boundary_edges > 0 || mesh.triangles.is_empty() {
        return Err(MechanicsError::OpenCavity { boundary_edges });
    }
    Ok(mesh.signed_volume().abs() / MM3_PER_ML)
}

/// Pressure against volume along the compression samples of `combined`.
/// `volume_map` gives the cavity volume (mm³) at a compression and is
/// differentiated centrally with a step of 1e-3 times the sampled range.
pub fn pv_curve<V>(combined: &FDCurve, volume_map: V) -> Result<PVCurve, MechanicsError>
where
    V: Fn(f64) -> Result<f64, MechanicsError>,
{
    let (lo, hi) = combined.domain();
    let step = 1e-3 * (hi - lo);
    let mut rows = Vec::with_capacity(combined.samples.len());
    let mut sense = 0.0;
    for &(d, f) in &combined.samples {
        let slope = (volume_map(d + step)? - volume_map(d - step)?) / (2.0 * step);
        let slope_ml = slope / MM3_PER_ML;
        if !(slope_ml.abs() >= MIN_VOLUME_SLOPE) || (sense != 0.0 && slope.signum() != sense) {
            return Err(MechanicsError::DegenerateVolumeMap { d, slope: slope_ml });
        }
        sense = slope.signum();
        rows.push((volume_map(d)? / MM3_PER_ML, f / slope * MBAR_PER_MPA, d));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let samples: Vec<(f64, f64)> = rows.iter().map(|r| (r.0, r.1)).collect();
    let (vs, ps): (Vec<f64>, Vec<f64>) = samples.iter().copied().unzip();
    let report = detect_events(&vs, &ps);
    let events = report
        .extrema
        .iter()
        .map(|e| SnapEvent {
            kind: e.kind,
            branch: match e.kind {
                ExtremumKind::Maximum => Branch::Inflation,
                ExtremumKind::Minimum => Branch::Deflation,
            },
            volume: e.x,
            pressure: e.y,
        })
        .collect();
    Ok(PVCurve { samples, stroke: rows.iter().map(|r| r.2).collect(), events, bistable: report.bistable })
}
