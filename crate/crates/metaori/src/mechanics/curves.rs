use super::beam::BeamRom;
use super::elastica::{Elastica, DEFAULT_SEGMENTS};
use super::truss::TierTruss;
use super::{check_grid, CurveRole, FDCurve, MaterialParams, MechanicsError};
use crate::kresling::{feasible_band, solve_closure, KreslingError, KreslingParams, KreslingState};
use crate::metashell::MetashellParams;

/// Samples per row over the default metashell stroke.
const FD_SAMPLES: usize = 210;
/// Default metashell stroke per row, in units of the beam rise.
const STROKE_RISE: f64 = 2.1;

/// `samples + 1` evenly spaced displacements from 0 to `d_max`.
pub fn stroke_grid(d_max: f64, samples: usize) -> Vec<f64> {
    (0..=samples).map(|k| d_max * k as f64 / samples as f64).collect()
}

/// Force of the whole shell per unit force of one half beam. Rows in
/// series share the stroke equally and combine their infill scales as a
/// harmonic mean.
fn shell_scale(params: &MetashellParams, mat: &MaterialParams) -> f64 {
    let rows = params.rows as f64;
    let compliance: f64 = (0..params.rows).map(|k| 1.0 / mat.stiffness_scale(params.infill(k))).sum();
    2.0 * params.cols as f64 * rows / compliance
}

/// Metashell force over `[0, 2.1·h]` per row.
pub fn metashell_fd(params: &MetashellParams, mat: &MaterialParams) -> Result<FDCurve, MechanicsError> {
    let rows = params.rows.max(1);
    let grid = stroke_grid(STROKE_RISE * params.h * rows as f64, FD_SAMPLES * rows);
    metashell_fd_on(params, mat, &grid)
}

/// Metashell force at the given total compressions.
pub fn metashell_fd_on(params: &MetashellParams, mat: &MaterialParams, ds: &[f64]) -> Result<FDCurve, MechanicsError> {
    mat.validate()?;
    params.validate()?;
    check_grid(ds.iter().copied())?;
    let rows = params.rows as f64;
    let per_row: Vec<f64> = ds.iter().map(|d| d / rows).collect();
    let rom = BeamRom::for_shell(params, mat.youngs_modulus);
    let scale = shell_scale(params, mat);
    let trace = rom.trace(&per_row)?;
    FDCurve::new(CurveRole::Meta, ds.iter().zip(&trace).map(|(&d, s)| (d, scale * s.force)).collect())
}

/// [`metashell_fd`], failing with `ModelDomain` unless the curve shows
/// an unstable and a second stable zero crossing.
pub fn bistable_metashell_fd(params: &MetashellParams, mat: &MaterialParams) -> Result<FDCurve, MechanicsError> {
    let curve = metashell_fd(params, mat)?;
    let signs: Vec<f64> = curve.zero_crossings().iter().map(|z| z.1).collect();
    if signs.windows(2).any(|w| w[0] < 0.0 && w[1] > 0.0) {
        Ok(curve)
    } else {
        Err(MechanicsError::ModelDomain { q: params.q() })
    }
}

/// Shell force at the given compressions from the discrete elastica,
/// scaled like [`metashell_fd`].
pub fn elastica_oracle(params: &MetashellParams, mat: &MaterialParams, ds: &[f64]) -> Result<Vec<f64>, MechanicsError> {
    mat.validate()?;
    params.validate()?;
    let rows = params.rows as f64;
    let per_row: Vec<f64> = ds.iter().map(|d| d / rows).collect();
    let chain = Elastica::new(params.l, params.h, params.t, params.depth, mat.youngs_modulus, DEFAULT_SEGMENTS);
    let scale = shell_scale(params, mat);
    Ok(chain.trace(&per_row)?.iter().map(|s| scale * s.force).collect())
}

/// Bar-and-hinge model of a whole origami stack. All tiers share one
/// height; mirrored tiers take opposite twists of equal size.
#[derive(Clone, Debug)]
pub struct OrigamiModel {
    pub params: KreslingParams,
    pub tier: TierTruss,
    pub tiers: usize,
    /// Stress-free height of one tier (mm).
    pub tier_height: f64,
    max_tier_height: f64,
}

impl OrigamiModel {
    pub fn new(params: &KreslingParams, mat: &MaterialParams) -> Result<Self, MechanicsError> {
        mat.validate()?;
        let closure = solve_closure(params)?;
        let area = mat.bar_area.unwrap_or(0.5 * params.t_face * params.b);
        let tier = TierTruss::new(
            params.n,
            params.circumradius(),
            closure.height,
            closure.twist,
            mat.youngs_modulus,
            area,
            mat.hinge_stiffness,
        );
        Ok(OrigamiModel {
            params: params.clone(),
            tier,
            tiers: 2 * params.levels,
            tier_height: closure.height,
            max_tier_height: feasible_band(params).1,
        })
    }

    pub fn rest_height(&self) -> f64 {
        self.tiers as f64 * self.tier_height
    }

    /// Tier height at stack compression `d`.
    pub fn tier_height_at(&self, d: f64) -> Result<f64, MechanicsError> {
        let h = self.tier_height - d / self.tiers as f64;
        if !(h > 0.0 && h <= self.max_tier_height) {
            return Err(KreslingError::InfeasibleHeight { h, min: 0.0, max: self.max_tier_height }.into());
        }
        Ok(h)
    }

    /// Relaxed tier twist and total strain energy (N·mm) at compression `d`.
    pub fn relax(&self, d: f64) -> Result<(f64, f64), MechanicsError> {
        let h = self.tier_height_at(d)?;
        let (phi, u) = self.tier.relax(h);
        Ok((phi, self.tiers as f64 * u))
    }

    pub fn energy(&self, d: f64) -> Result<f64, MechanicsError> {
        Ok(self.relax(d)?.1)
    }

    /// Central-difference force with half step `step`.
    pub fn force(&self, d: f64, step: f64) -> Result<f64, MechanicsError> {
        Ok((self.energy(d + step)? - self.energy(d - step)?) / (2.0 * step))
    }

    /// Enclosed volume of the stack between flat end polygons (mm³).
    pub fn volume(&self, d: f64) -> Result<f64, MechanicsError> {
        let h = self.tier_height_at(d)?;
        let (phi, _) = self.tier.relax(h);
        Ok(self.tiers as f64 * self.tier.volume(h, phi))
    }

    pub fn state(&self, d: f64) -> Result<KreslingState, MechanicsError> {
        let h = self.tier_height_at(d)?;
        let (phi, _) = self.tier.relax(h);
        Ok(KreslingState::stack(self.params.n, self.tier.radius, self.params.chirality, self.params.levels, h, phi))
    }
}

/// Origami force over the first half of its height.
pub fn origami_fd(params: &KreslingParams, mat: &MaterialParams) -> Result<FDCurve, MechanicsError> {
    let model = OrigamiModel::new(params, mat)?;
    let grid = stroke_grid(0.5 * model.rest_height(), FD_SAMPLES);
    origami_curve(&model, &grid)
}

/// Origami force at the given stack compressions, differentiated with a
/// step of 1e-3 times the sampled range.
pub fn origami_fd_on(params: &KreslingParams, mat: &MaterialParams, ds: &[f64]) -> Result<FDCurve, MechanicsError> {
    origami_curve(&OrigamiModel::new(params, mat)?, ds)
}

fn origami_curve(model: &OrigamiModel, ds: &[f64]) -> Result<FDCurve, MechanicsError> {
    check_grid(ds.iter().copied())?;
    let step = 1e-3 * (ds[ds.len() - 1] - ds[0]);
    let samples = ds.iter().map(|&d| Ok((d, model.force(d, step)?))).collect::<Result<_, MechanicsError>>()?;
    FDCurve::new(CurveRole::Ori, samples)
}

/// Parallel springs: the two forces summed on the union of both sample
/// sets inside the shared range.
pub fn combined_fd(meta: &FDCurve, ori: &FDCurve) -> Result<FDCurve, MechanicsError> {
    let ((a0, a1), (b0, b1)) = (meta.domain(), ori.domain());
    let (lo, hi) = (a0.max(b0), a1.min(b1));
    if lo >= hi {
        return Err(MechanicsError::DomainMismatch { a0, a1, b0, b1 });
    }
    let mut grid: Vec<f64> =
        meta.samples.iter().chain(&ori.samples).map(|s| s.0).filter(|&d| d >= lo && d <= hi).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let samples = grid.into_iter().map(|d| (d, meta.at(d).unwrap_or(0.0) + ori.at(d).unwrap_or(0.0))).collect();
    FDCurve::new(CurveRole::Combined, samples)
}

/// Open-to-closed elongation in percent of the closed height. The closed
/// state puts every row at the second stable zero of the shell force, or
/// at the travel stop where the beam meets the band below if that comes
/// first.
pub fn predict_elongation(params: &MetashellParams, mat: &MaterialParams) -> Result<f64, MechanicsError> {
    let curve = metashell_fd(params, mat)?;
    let rows = params.rows as f64;
    let stroke = curve.stable_zeros().first().copied().ok_or(MechanicsError::NotBistable)? / rows;
    let open = params.overall_height();
    let closed = open - rows * stroke.min(params.travel_stop());
    Ok((open - closed) / closed * 100.0)
}
