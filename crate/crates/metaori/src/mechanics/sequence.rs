//! Volume-controlled inflation of segments stacked on one cavity.

use super::curves::{metashell_fd_on, origami_fd_on, OrigamiModel};
use super::pv::Branch;
use super::{sig9, MaterialParams, MechanicsError, MBAR_PER_MPA, MM3_PER_ML};
use crate::kresling::KreslingParams;
use crate::metashell::MetashellParams;
use crate::numeric::CubicSpline;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// Table spacing of the segment responses (mm).
const TABLE_STEP: f64 = 0.05;
/// Largest change of any stroke accepted from one Newton continuation
/// step before it counts as a jump (mm).
const JUMP: f64 = 1.0;
/// Zeros closer than this to the open state are the open state itself.
const REST_BAND: f64 = 2.0 * TABLE_STEP;
const NEWTON_ITERS: usize = 60;
const RELAX_ITERS: usize = 400_000;

/// One shell row with the origami levels it encloses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    /// Single-row shell.
    pub shell: MetashellParams,
    pub origami: KreslingParams,
    pub infill: f64,
}

/// Splits a multi-row design into one segment per row, each taking an
/// equal share of the origami levels.
pub fn segments_of(shell: &MetashellParams, origami: &KreslingParams) -> Result<Vec<SegmentSpec>, MechanicsError> {
    shell.validate()?;
    let rows = shell.rows;
    if origami.levels % rows != 0 {
        return Err(MechanicsError::InvalidParams(format!(
            "{} origami levels cannot be shared evenly by {rows} rows",
            origami.levels
        )));
    }
    Ok((0..rows)
        .map(|k| SegmentSpec {
            shell: MetashellParams { rows: 1, infill_per_row: vec![shell.infill(k)], ..shell.clone() },
            origami: KreslingParams { levels: origami.levels / rows, ..origami.clone() },
            infill: shell.infill(k),
        })
        .collect())
}

/// Tabulated force and cavity volume of one segment against its stroke.
#[derive(Clone, Debug)]
pub struct SegmentResponse {
    pub spec: SegmentSpec,
    /// Origami height at zero stroke (mm).
    pub rest_height: f64,
    force: CubicSpline,
    /// mm³.
    volume: CubicSpline,
    stiffness_bound: f64,
    /// Stroke of the closed stable state.
    pub closed: Option<f64>,
    /// Stroke of the pressure maximum met on inflation.
    pub inflation_limit: f64,
    /// Stroke of the pressure minimum met on deflation.
    pub deflation_limit: f64,
}

impl SegmentResponse {
    pub fn build(spec: &SegmentSpec, mat: &MaterialParams) -> Result<Self, MechanicsError> {
        if !(spec.infill > 0.0 && spec.infill <= 1.0) {
            return Err(MechanicsError::InvalidParams(format!("infill = {} must lie in (0, 1]", spec.infill)));
        }
        let row = MetashellParams { rows: 1, infill_per_row: vec![spec.infill], ..spec.shell.clone() };
        let (lo, hi) = (-0.25 * row.h, 2.1 * row.h);
        let n = ((hi - lo) / TABLE_STEP).ceil() as usize;
        let ds: Vec<f64> = (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
        let meta = metashell_fd_on(&row, mat, &ds)?;
        let ori = origami_fd_on(&spec.origami, mat, &ds)?;
        let model = OrigamiModel::new(&spec.origami, mat)?;
        let force: Vec<f64> = meta.samples.iter().zip(&ori.samples).map(|(a, b)| a.1 + b.1).collect();
        let volume = ds.iter().map(|&d| model.volume(d)).collect::<Result<Vec<_>, _>>()?;
        let stiffness_bound = force.windows(2).map(|w| (w[1] - w[0]).abs() / TABLE_STEP).fold(0.0, f64::max).max(1e-9);

        let closed = (1..ds.len())
            .rev()
            .filter(|&k| force[k - 1] < 0.0 && force[k] >= 0.0)
            .map(|k| ds[k - 1] - force[k - 1] * (ds[k] - ds[k - 1]) / (force[k] - force[k - 1]))
            .find(|&d| d > REST_BAND);
        let volume = CubicSpline::natural(ds.clone(), volume);
        let pressure: Vec<f64> = ds.iter().zip(&force).map(|(&d, f)| f / volume.eval(d).1).collect();
        let peak = argmax(&pressure, |k| ds[k] >= 0.0);
        let valley = argmax(&pressure.iter().map(|p| -p).collect::<Vec<_>>(), |k| ds[k] >= 0.0 && k < peak);
        Ok(SegmentResponse {
            spec: spec.clone(),
            rest_height: model.rest_height(),
            force: CubicSpline::natural(ds.clone(), force),
            volume,
            stiffness_bound,
            closed,
            inflation_limit: ds[peak],
            deflation_limit: ds[valley],
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        self.force.domain()
    }

    /// Force (N) and its slope.
    pub fn force(&self, d: f64) -> (f64, f64) {
        let (f, k, _) = self.force.eval(d);
        (f, k)
    }

    /// Volume (mm³) and its first two derivatives.
    pub fn volume(&self, d: f64) -> (f64, f64, f64) {
        self.volume.eval(d)
    }

    /// Pressure holding the segment at stroke `d` on its own (mbar).
    pub fn pressure(&self, d: f64) -> f64 {
        self.force(d).0 / self.volume(d).1 * MBAR_PER_MPA
    }
}

fn argmax(v: &[f64], keep: impl Fn(usize) -> bool) -> usize {
    (0..v.len())
        .filter(|&k| keep(k))
        .fold(None, |best: Option<usize>, k| match best {
            Some(b) if v[b] >= v[k] => Some(b),
            _ => Some(k),
        })
        .unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceEvent {
    pub segment: usize,
    pub branch: Branch,
    /// Index of the ramp step at which the segment passed its limit point.
    pub step: usize,
    /// Target volume of that step (mL).
    pub volume: f64,
    /// Cavity pressure just before (mbar).
    pub pressure: f64,
    /// The segment jumped rather than followed a continuous path.
    pub dynamic: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SequenceResult {
    /// mL.
    pub volumes: Vec<f64>,
    /// mbar.
    pub pressures: Vec<f64>,
    /// Per step, the stroke of every segment (mm).
    pub strokes: Vec<Vec<f64>>,
    /// Per step, the origami height of every segment (mm).
    pub heights: Vec<Vec<f64>>,
    pub events: Vec<SequenceEvent>,
}

impl SequenceResult {
    /// Events of one branch in order of occurrence.
    pub fn events_on(&self, branch: Branch) -> Vec<&SequenceEvent> {
        self.events.iter().filter(|e| e.branch == branch).collect()
    }

    pub fn to_csv(&self) -> String {
        let m = self.strokes.first().map_or(0, Vec::len);
        let mut out = String::from("V_mL,P_mbar");
        for i in 1..=m {
            let _ = write!(out, ",d{i}_mm");
        }
        for i in 1..=m {
            let _ = write!(out, ",H{i}_mm");
        }
        out.push('\n');
        for k in 0..self.volumes.len() {
            out.push_str(&sig9(self.volumes[k]));
            out.push(',');
            out.push_str(&sig9(self.pressures[k]));
            for x in self.strokes[k].iter().chain(&self.heights[k]) {
                out.push(',');
                out.push_str(&sig9(*x));
            }
            out.push('\n');
        }
        out
    }

    pub fn events_csv(&self) -> String {
        let mut out = String::from("segment,branch,step,V_mL,P_mbar,dynamic\n");
        for e in &self.events {
            let branch = match e.branch {
                Branch::Inflation => "inflation",
                Branch::Deflation => "deflation",
            };
            let _ = writeln!(
                out,
                "{},{branch},{},{},{},{}",
                e.segment + 1,
                e.step,
                sig9(e.volume),
                sig9(e.pressure),
                e.dynamic
            );
        }
        out
    }
}

/// Closed-to-open inflation in `steps` equal volume steps followed by the
/// same path back, in mL.
pub fn volume_ramp(segments: &[SegmentResponse], steps: usize) -> Result<Vec<f64>, MechanicsError> {
    let start = closed_state(segments)?;
    let v_closed: f64 = segments.iter().zip(&start).map(|(s, &d)| s.volume(d).0).sum::<f64>() / MM3_PER_ML;
    let v_open: f64 = segments.iter().map(|s| s.volume(0.0).0).sum::<f64>() / MM3_PER_ML;
    let steps = steps.max(1);
    let up = (0..=steps).map(|k| v_closed + (v_open - v_closed) * k as f64 / steps as f64);
    let down = (0..steps).rev().map(|k| v_closed + (v_open - v_closed) * k as f64 / steps as f64);
    Ok(up.chain(down).collect())
}

fn closed_state(segments: &[SegmentResponse]) -> Result<Vec<f64>, MechanicsError> {
    segments.iter().map(|s| s.closed.ok_or(MechanicsError::NotBistable)).collect()
}

/// Follows the quasi-static path through the target volumes (mL), starting
/// from every segment in its closed stable state. Each step continues from
/// the previous equilibrium with damped Newton on strokes and pressure;
/// when that fails or jumps, the step is relaxed by pseudo-dynamic descent
/// on the constant-volume manifold.
pub fn simulate_sequence(segments: &[SegmentResponse], ramp: &[f64]) -> Result<SequenceResult, MechanicsError> {
    if segments.is_empty() {
        return Err(MechanicsError::InvalidParams("at least one segment is required".into()));
    }
    let sys = System { segs: segments };
    let mut d = closed_state(segments)?;
    let mut p = 0.0;
    let mut out = SequenceResult::default();
    for (step, &v_ml) in ramp.iter().enumerate() {
        let target = v_ml * MM3_PER_ML;
        let prev = d.clone();
        let p_prev = p;
        let continued = sys
            .newton(prev.clone(), p, target)
            .filter(|(x, _)| x.iter().zip(&prev).all(|(a, b)| (a - b).abs() <= JUMP));
        let dynamic = continued.is_none();
        (d, p) = match continued {
            Some(sol) => sol,
            None => sys.relax(prev.clone(), target)?,
        };
        for (i, s) in segments.iter().enumerate() {
            let branch = if prev[i] > s.inflation_limit && d[i] <= s.inflation_limit {
                Branch::Inflation
            } else if prev[i] < s.deflation_limit && d[i] >= s.deflation_limit {
                Branch::Deflation
            } else {
                continue;
            };
            out.events.push(SequenceEvent {
                segment: i,
                branch,
                step,
                volume: v_ml,
                pressure: p_prev * MBAR_PER_MPA,
                dynamic,
            });
        }
        out.volumes.push(v_ml);
        out.pressures.push(p * MBAR_PER_MPA);
        out.heights.push(segments.iter().zip(&d).map(|(s, x)| s.rest_height - x).collect());
        out.strokes.push(d.clone());
    }
    Ok(out)
}

struct System<'a> {
    segs: &'a [SegmentResponse],
}

impl System<'_> {
    fn clamp(&self, d: &mut [f64]) {
        for (x, s) in d.iter_mut().zip(self.segs) {
            let (lo, hi) = s.domain();
            *x = x.clamp(lo, hi);
        }
    }

    fn force_scale(&self) -> f64 {
        self.segs.iter().map(|s| s.stiffness_bound).fold(0.0, f64::max)
    }

    /// Stroke residuals `F_i − p·V_i'` and the volume residual.
    fn residual(&self, d: &[f64], p: f64, target: f64) -> (Vec<f64>, f64) {
        let mut r = Vec::with_capacity(d.len());
        let mut vol = -target;
        for (s, &x) in self.segs.iter().zip(d) {
            let (v, v1, _) = s.volume(x);
            r.push(s.force(x).0 - p * v1);
            vol += v;
        }
        (r, vol)
    }

    fn converged(&self, r: &[f64], rv: f64, target: f64) -> bool {
        r.iter().all(|x| x.abs() < 1e-9 * (1.0 + self.force_scale())) && rv.abs() < 1e-10 * target.abs().max(1.0)
    }

    fn newton(&self, mut d: Vec<f64>, mut p: f64, target: f64) -> Option<(Vec<f64>, f64)> {
        let m = d.len();
        for _ in 0..NEWTON_ITERS {
            let (r, rv) = self.residual(&d, p, target);
            if self.converged(&r, rv, target) {
                return Some((d, p));
            }
            let mut j = DMatrix::zeros(m + 1, m + 1);
            let mut rhs = DVector::zeros(m + 1);
            for (i, (s, &x)) in self.segs.iter().zip(&d).enumerate() {
                let (_, k) = s.force(x);
                let (_, v1, v2) = s.volume(x);
                j[(i, i)] = k - p * v2;
                j[(i, m)] = -v1;
                j[(m, i)] = v1;
                rhs[i] = -r[i];
            }
            rhs[m] = -rv;
            let dx = j.lu().solve(&rhs)?;
            let biggest = dx.rows(0, m).amax();
            let damp = if biggest > 0.5 { 0.5 / biggest } else { 1.0 };
            for i in 0..m {
                d[i] += damp * dx[i];
            }
            p += damp * dx[m];
            self.clamp(&mut d);
            if !p.is_finite() {
                return None;
            }
        }
        None
    }

    /// Moves `d` along the volume gradient until the volume hits `target`.
    fn project(&self, d: &mut [f64], target: f64) {
        let dir: Vec<f64> = self.segs.iter().zip(d.iter()).map(|(s, &x)| s.volume(x).1).collect();
        let mut alpha = 0.0;
        for _ in 0..30 {
            let mut f = -target;
            let mut df = 0.0;
            for (i, s) in self.segs.iter().enumerate() {
                let (v, v1, _) = s.volume(d[i] + alpha * dir[i]);
                f += v;
                df += v1 * dir[i];
            }
            if df == 0.0 {
                break;
            }
            let da = f / df;
            alpha -= da;
            if da.abs() < 1e-15 * (1.0 + alpha.abs()) {
                break;
            }
        }
        for (x, g) in d.iter_mut().zip(&dir) {
            *x += alpha * g;
        }
        self.clamp(d);
    }

    /// Multiplier and gradient of the energy tangent to the volume
    /// constraint.
    fn tangent_gradient(&self, d: &[f64]) -> (f64, Vec<f64>) {
        let (mut num, mut den) = (0.0, 0.0);
        for (s, &x) in self.segs.iter().zip(d) {
            let v1 = s.volume(x).1;
            num += s.force(x).0 * v1;
            den += v1 * v1;
        }
        let p = num / den;
        (p, self.segs.iter().zip(d).map(|(s, &x)| s.force(x).0 - p * s.volume(x).1).collect())
    }

    /// Lowest curvature of the energy on the constant-volume tangent space,
    /// with its direction.
    fn lowest_mode(&self, d: &[f64], p: f64) -> Option<(f64, Vec<f64>)> {
        let m = d.len();
        if m < 2 {
            return None;
        }
        let c = DVector::from_iterator(m, self.segs.iter().zip(d).map(|(s, &x)| s.volume(x).1));
        let q = DMatrix::identity(m, m) - &c * c.transpose() / c.norm_squared();
        let k = DMatrix::from_diagonal(&DVector::from_iterator(
            m,
            self.segs.iter().zip(d).map(|(s, &x)| s.force(x).1 - p * s.volume(x).2),
        ));
        let eig = SymmetricEigen::new(&q * k * &q);
        (0..m)
            .filter(|&i| eig.eigenvectors.column(i).dot(&c).abs() < 1e-6 * c.norm())
            .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect::<Vec<_>>()))
            .min_by(|a, b| a.0.total_cmp(&b.0))
    }

    fn relax(&self, mut d: Vec<f64>, target: f64) -> Result<(Vec<f64>, f64), MechanicsError> {
        let tau = 0.25 / self.force_scale();
        let tol = 1e-7 * (1.0 + self.force_scale());
        let mut residual = f64::INFINITY;
        for it in 0..RELAX_ITERS {
            self.project(&mut d, target);
            let (p, g) = self.tangent_gradient(&d);
            residual = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if residual < tol {
                match self.lowest_mode(&d, p) {
                    Some((lam, dir)) if lam < 0.0 => {
                        let sign = if dir.iter().sum::<f64>() >= 0.0 { 1.0 } else { -1.0 };
                        d.iter_mut().zip(&dir).for_each(|(x, v)| *x += sign * 0.05 * v);
                        continue;
                    }
                    _ => {}
                }
                if let Some(sol) = self.newton(d.clone(), p, target) {
                    return Ok(sol);
                }
            }
            if !residual.is_finite() {
                return Err(MechanicsError::NoEquilibrium { volume: target / MM3_PER_ML, iterations: it, residual });
            }
            d.iter_mut().zip(&g).for_each(|(x, gi)| *x -= tau * gi);
        }
        Err(MechanicsError::NoEquilibrium { volume: target / MM3_PER_ML, iterations: RELAX_ITERS, residual })
    }
}
