use super::DesignConfig;
use crate::mechanics::{
    combined_fd, detect_events, metashell_fd, origami_fd_on, predict_elongation, pv_curve, Branch, EventReport,
    FDCurve, MechanicsError, OrigamiModel, PVCurve,
};
use serde::Serialize;

/// Largest origami compression sampled, as a fraction of its rest height.
const MAX_FOLD: f64 = 0.95;

/// Force and pressure responses of one design.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Analysis {
    pub fd_meta: FDCurve,
    pub fd_ori: FDCurve,
    pub fd_combined: FDCurve,
    pub pv: PVCurve,
    /// Extrema of the combined force.
    pub fd_events: EventReport,
    /// Stable zeros of the shell force.
    pub stable_zeros: Vec<f64>,
    /// Open-to-closed elongation (%), when the shell is bistable.
    pub elongation: Option<f64>,
}

impl Analysis {
    pub fn run(cfg: &DesignConfig) -> Result<Self, MechanicsError> {
        let mat = &cfg.material;
        let origami = cfg.kresling_params();
        let fd_meta = metashell_fd(&cfg.metashell, mat)?;
        let model = OrigamiModel::new(&origami, mat)?;
        let reach = MAX_FOLD * model.rest_height();
        let ds: Vec<f64> = fd_meta.displacements().into_iter().filter(|&d| d <= reach).collect();
        let fd_ori = origami_fd_on(&origami, mat, &ds)?;
        let fd_combined = combined_fd(&fd_meta, &fd_ori)?;
        let pv = pv_curve(&fd_combined, |d| model.volume(d))?;
        let fd_events = detect_events(&fd_combined.displacements(), &fd_combined.forces());
        let elongation = match predict_elongation(&cfg.metashell, mat) {
            Ok(e) => Some(e),
            Err(MechanicsError::NotBistable) => None,
            Err(e) => return Err(e),
        };
        Ok(Analysis { stable_zeros: fd_meta.stable_zeros(), fd_meta, fd_ori, fd_combined, pv, fd_events, elongation })
    }

    /// Pressure of the first limit point met on inflation (mbar).
    pub fn snap_pressure(&self) -> Option<f64> {
        self.pv.events.iter().find(|e| e.branch == Branch::Inflation).map(|e| e.pressure)
    }

    /// The shell alone has a second stable state.
    pub fn bistable(&self) -> bool {
        !self.stable_zeros.is_empty()
    }
}
