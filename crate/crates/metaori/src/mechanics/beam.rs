//! Ritz model of one half of a clamped cosine arch under large rotation.
//!
//! The half beam runs from its clamp at `x = 0` to the apex at `x = l/2`
//! with rest shape `y = (h/2)(1 − cos(2πx/l))`. Its tangent angle is the
//! rest angle plus a sine series, which keeps both ends at zero slope, and
//! its axial strain is a cosine series. The apex is held `d` below its
//! rest height with no horizontal motion through an augmented Lagrangian.

use super::MechanicsError;
use crate::metashell::MetashellParams;
use crate::numeric::{escape_saddles, gauss_legendre, DenseSym, Newton, Objective, SolveError, SymSystem};
use nalgebra::DMatrix;
use std::f64::consts::PI;

const ROTATION_MODES: usize = 8;
const STRAIN_MODES: usize = 5;
const GAUSS_POINTS: usize = 96;
const PENALTY: f64 = 10.0;
/// Largest apex step between continuation stations (mm).
const STATION_STEP: f64 = 0.25;

#[derive(Clone, Debug)]
pub struct BeamRom {
    ei: f64,
    ea: f64,
    /// Gauss weight times `ds/dx`, and divided by it.
    w_stretch: Vec<f64>,
    w_bend: Vec<f64>,
    psi0: Vec<f64>,
    /// Mode values per Gauss point, row-major.
    rot: Vec<f64>,
    rot_dx: Vec<f64>,
    strain: Vec<f64>,
    x0: f64,
    y0: f64,
    pub rise: f64,
}

/// Equilibrium of the half beam at one apex displacement.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamSample {
    pub d: f64,
    /// Force needed to hold the apex (N), positive when pushing down.
    pub force: f64,
    /// Strain energy (N·mm).
    pub energy: f64,
    /// Lowest curvature of the constrained energy; negative at a saddle.
    pub stability: f64,
}

#[derive(Clone, Debug)]
struct State {
    z: Vec<f64>,
    lam: [f64; 2],
}

impl BeamRom {
    /// Half beam of span `l/2`, rise `h`, in-plane thickness `t` and
    /// radial depth `depth`, made of material with modulus `e` (MPa).
    pub fn new(l: f64, h: f64, t: f64, depth: f64, e: f64) -> Self {
        let (gx, gw) = gauss_legendre(GAUSS_POINTS);
        let half = 0.5 * l;
        let k = 2.0 * PI / l;
        let mut rom = BeamRom {
            ei: e * depth * t.powi(3) / 12.0,
            ea: e * depth * t,
            w_stretch: Vec::with_capacity(GAUSS_POINTS),
            w_bend: Vec::with_capacity(GAUSS_POINTS),
            psi0: Vec::with_capacity(GAUSS_POINTS),
            rot: Vec::with_capacity(GAUSS_POINTS * ROTATION_MODES),
            rot_dx: Vec::with_capacity(GAUSS_POINTS * ROTATION_MODES),
            strain: Vec::with_capacity(GAUSS_POINTS * STRAIN_MODES),
            x0: 0.0,
            y0: 0.0,
            rise: h,
        };
        for (xi, wi) in gx.iter().zip(&gw) {
            let xi = 0.5 * (xi + 1.0);
            let x = half * xi;
            let slope = 0.5 * h * k * (k * x).sin();
            let jac = slope.hypot(1.0);
            let w = 0.5 * wi * half;
            rom.w_stretch.push(w * jac);
            rom.w_bend.push(w / jac);
            rom.psi0.push(slope.atan());
            for m in 1..=ROTATION_MODES {
                let a = m as f64 * PI;
                rom.rot.push((a * xi).sin());
                rom.rot_dx.push(a / half * (a * xi).cos());
            }
            for m in 0..STRAIN_MODES {
                rom.strain.push((m as f64 * PI * xi).cos());
            }
        }
        let (x0, y0) = rom.ends(&vec![0.0; rom.dim()]);
        rom.x0 = x0;
        rom.y0 = y0;
        rom
    }

    pub fn for_shell(params: &MetashellParams, e: f64) -> Self {
        BeamRom::new(params.l, params.h, params.t, params.depth, e)
    }

    fn dim(&self) -> usize {
        ROTATION_MODES + STRAIN_MODES
    }

    /// Per Gauss point: angle change rate, total angle and strain.
    fn fields(&self, z: &[f64], g: usize) -> (f64, f64, f64) {
        let (q, p) = z.split_at(ROTATION_MODES);
        let r = &self.rot[g * ROTATION_MODES..(g + 1) * ROTATION_MODES];
        let rd = &self.rot_dx[g * ROTATION_MODES..(g + 1) * ROTATION_MODES];
        let c = &self.strain[g * STRAIN_MODES..(g + 1) * STRAIN_MODES];
        let kappa: f64 = q.iter().zip(rd).map(|(a, b)| a * b).sum();
        let psi = self.psi0[g] + q.iter().zip(r).map(|(a, b)| a * b).sum::<f64>();
        let eps: f64 = p.iter().zip(c).map(|(a, b)| a * b).sum();
        (kappa, psi, eps)
    }

    pub fn energy(&self, z: &[f64]) -> f64 {
        (0..GAUSS_POINTS)
            .map(|g| {
                let (kappa, _, eps) = self.fields(z, g);
                0.5 * self.ei * self.w_bend[g] * kappa * kappa + 0.5 * self.ea * self.w_stretch[g] * eps * eps
            })
            .sum()
    }

    /// Apex position relative to the clamp.
    fn ends(&self, z: &[f64]) -> (f64, f64) {
        (0..GAUSS_POINTS).fold((0.0, 0.0), |(x, y), g| {
            let (_, psi, eps) = self.fields(z, g);
            let s = self.w_stretch[g] * (1.0 + eps);
            (x + s * psi.cos(), y + s * psi.sin())
        })
    }

    fn solve(&self, d: f64, start: State) -> Result<State, SolveError> {
        let newton = Newton { gtol: 1e-9, max_iter: 200 };
        let mut st = start;
        for _ in 0..80 {
            let obj = Lagrangian { rom: self, d, lam: st.lam };
            st.z = newton.minimize(&obj, st.z)?.x;
            let c = obj.constraint(&st.z);
            if c[0].abs().max(c[1].abs()) < 1e-11 {
                return Ok(st);
            }
            st.lam = [st.lam[0] - PENALTY * c[0], st.lam[1] - PENALTY * c[1]];
        }
        Err(SolveError::NoConvergence { iterations: 80, grad_norm: f64::NAN })
    }

    /// Solves at `d` from `start`, then leaves any saddle along its
    /// unstable mode towards the lower energy.
    fn settle(&self, d: f64, start: State) -> Result<(State, BeamSample), SolveError> {
        let st = self.solve(d, start)?;
        let lam = st.lam;
        let solve = |z: Vec<f64>| -> Result<(Vec<f64>, f64), SolveError> {
            let s = self.solve(d, State { z, lam })?;
            let e = self.energy(&s.z);
            Ok((s.z, e))
        };
        let lowest = |z: &[f64]| Lagrangian { rom: self, d, lam }.hessian(z).lowest_mode();
        let e0 = self.energy(&st.z);
        let (z, _) = escape_saddles(st.z, e0, 0.05, 1e-9, 5, solve, lowest)?;
        let st = self.solve(d, State { z, lam })?;
        let obj = Lagrangian { rom: self, d, lam: st.lam };
        let c = obj.constraint(&st.z);
        let sample = BeamSample {
            d,
            force: PENALTY * c[1] - st.lam[1],
            energy: self.energy(&st.z),
            stability: obj.hessian(&st.z).lowest_mode().0,
        };
        Ok((st, sample))
    }

    /// Walks from the equilibrium `start` at `from` to `to` through
    /// stations at most 0.25 mm apart.
    fn march(&self, from: f64, to: f64, start: State) -> Result<(State, BeamSample), MechanicsError> {
        let steps = ((to - from).abs() / STATION_STEP).ceil().max(1.0) as usize;
        let mut st = start;
        let mut last = None;
        for k in 1..=steps {
            let d = from + (to - from) * k as f64 / steps as f64;
            let (next, sample) = self.settle(d, st).map_err(|e| MechanicsError::NoConvergence { d, source: e })?;
            st = next;
            last = Some(sample);
        }
        Ok((st, last.expect("at least one station")))
    }

    fn rest(&self) -> State {
        State { z: vec![0.0; self.dim()], lam: [0.0; 2] }
    }

    /// Follows the equilibrium path through the given displacements,
    /// each solve seeded by the previous one.
    pub fn trace(&self, displacements: &[f64]) -> Result<Vec<BeamSample>, MechanicsError> {
        let mut st = self.rest();
        let mut d_now = 0.0;
        let mut out = Vec::with_capacity(displacements.len());
        for &d in displacements {
            let (next, sample) = self.march(d_now, d, st)?;
            st = next;
            d_now = d;
            out.push(sample);
        }
        Ok(out)
    }

    /// Displacements of the zero crossings of the force along the path,
    /// found on `samples` steps over `[0, d_max]` and refined by bisection.
    pub fn zero_crossings(&self, d_max: f64, samples: usize) -> Result<Vec<f64>, MechanicsError> {
        let mut st = self.rest();
        let mut prev: Option<(State, BeamSample)> = None;
        let mut d_now = 0.0;
        let mut out = Vec::new();
        for k in 0..=samples {
            let d = d_max * k as f64 / samples as f64;
            let (next, sample) = self.march(d_now, d, st)?;
            d_now = d;
            if let Some((ps, pf)) = &prev {
                if pf.d > 0.0 && pf.force.signum() != sample.force.signum() && sample.force != 0.0 {
                    out.push(self.refine(ps.clone(), pf.d, d, pf.force)?);
                }
            }
            st = next.clone();
            prev = Some((next, sample));
        }
        Ok(out)
    }

    fn refine(&self, from: State, mut lo: f64, mut hi: f64, f_lo: f64) -> Result<f64, MechanicsError> {
        let from_d = lo;
        let tol = 1e-7 * self.rise;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            let (_, s) = self.march(from_d, mid, from.clone())?;
            if s.force.signum() == f_lo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

struct Lagrangian<'a> {
    rom: &'a BeamRom,
    d: f64,
    lam: [f64; 2],
}

impl Lagrangian<'_> {
    fn constraint(&self, z: &[f64]) -> [f64; 2] {
        let (x, y) = self.rom.ends(z);
        [x - self.rom.x0, y - (self.rom.y0 - self.d)]
    }

    fn multipliers(&self, z: &[f64]) -> [f64; 2] {
        let c = self.constraint(z);
        [PENALTY * c[0] - self.lam[0], PENALTY * c[1] - self.lam[1]]
    }

    /// Gradients of the apex coordinates.
    fn end_gradients(&self, z: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let rom = self.rom;
        let mut gx = vec![0.0; rom.dim()];
        let mut gy = vec![0.0; rom.dim()];
        for g in 0..GAUSS_POINTS {
            let (_, psi, eps) = rom.fields(z, g);
            let (s, c) = psi.sin_cos();
            let w = rom.w_stretch[g];
            for m in 0..ROTATION_MODES {
                let b = rom.rot[g * ROTATION_MODES + m];
                gx[m] -= w * (1.0 + eps) * s * b;
                gy[m] += w * (1.0 + eps) * c * b;
            }
            for m in 0..STRAIN_MODES {
                let b = rom.strain[g * STRAIN_MODES + m];
                gx[ROTATION_MODES + m] += w * c * b;
                gy[ROTATION_MODES + m] += w * s * b;
            }
        }
        (gx, gy)
    }
}

impl Objective for Lagrangian<'_> {
    type Hessian = DenseSym;

    fn value(&self, z: &[f64]) -> f64 {
        let c = self.constraint(z);
        self.rom.energy(z) - self.lam[0] * c[0] - self.lam[1] * c[1] + 0.5 * PENALTY * (c[0] * c[0] + c[1] * c[1])
    }

    fn gradient(&self, z: &[f64]) -> Vec<f64> {
        let rom = self.rom;
        let mu = self.multipliers(z);
        let (gx, gy) = self.end_gradients(z);
        let mut grad: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| mu[0] * a + mu[1] * b).collect();
        for g in 0..GAUSS_POINTS {
            let (kappa, _, eps) = rom.fields(z, g);
            for m in 0..ROTATION_MODES {
                grad[m] += rom.ei * rom.w_bend[g] * kappa * rom.rot_dx[g * ROTATION_MODES + m];
            }
            for m in 0..STRAIN_MODES {
                grad[ROTATION_MODES + m] += rom.ea * rom.w_stretch[g] * eps * rom.strain[g * STRAIN_MODES + m];
            }
        }
        grad
    }

    fn hessian(&self, z: &[f64]) -> DenseSym {
        let rom = self.rom;
        let n = rom.dim();
        let mu = self.multipliers(z);
        let (gx, gy) = self.end_gradients(z);
        let mut h = DMatrix::zeros(n, n);
        for g in 0..GAUSS_POINTS {
            let (_, psi, eps) = rom.fields(z, g);
            let (s, c) = psi.sin_cos();
            let ws = rom.w_stretch[g];
            let r = &rom.rot[g * ROTATION_MODES..(g + 1) * ROTATION_MODES];
            let rd = &rom.rot_dx[g * ROTATION_MODES..(g + 1) * ROTATION_MODES];
            let cs = &rom.strain[g * STRAIN_MODES..(g + 1) * STRAIN_MODES];
            let qq = -ws * (1.0 + eps) * (mu[0] * c + mu[1] * s);
            let qp = ws * (mu[1] * c - mu[0] * s);
            for a in 0..ROTATION_MODES {
                for b in 0..ROTATION_MODES {
                    h[(a, b)] += rom.ei * rom.w_bend[g] * rd[a] * rd[b] + qq * r[a] * r[b];
                }
                for b in 0..STRAIN_MODES {
                    let v = qp * r[a] * cs[b];
                    h[(a, ROTATION_MODES + b)] += v;
                    h[(ROTATION_MODES + b, a)] += v;
                }
            }
            for a in 0..STRAIN_MODES {
                for b in 0..STRAIN_MODES {
                    h[(ROTATION_MODES + a, ROTATION_MODES + b)] += rom.ea * ws * cs[a] * cs[b];
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                h[(a, b)] += PENALTY * (gx[a] * gx[b] + gy[a] * gy[b]);
            }
        }
        DenseSym(h)
    }
}

/// Apex displacement of the second stable state of the beam rows of
/// `params`, if the arch is bistable. Independent of modulus and infill.
pub fn second_stable_stroke(params: &MetashellParams) -> Option<f64> {
    let rom = BeamRom::for_shell(params, 1.0);
    let zeros = rom.zero_crossings(2.1 * params.h, 84).ok()?;
    (zeros.len() >= 2).then(|| zeros[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper() -> BeamRom {
        BeamRom::new(22.5, 9.4, 1.25, 5.0, 12.0)
    }

    #[test]
    fn rest_shape_spans_half_the_arch() {
        let r = paper();
        assert!((r.x0 - 11.25).abs() < 1e-9, "{}", r.x0);
        assert!((r.y0 - 9.4).abs() < 1e-9, "{}", r.y0);
    }

    #[test]
    fn gradient_and_hessian_match_differences() {
        let r = paper();
        let obj = Lagrangian { rom: &r, d: 3.0, lam: [0.4, -1.3] };
        let z: Vec<f64> = (0..r.dim())
            .map(|i| 0.05 * ((i * 7 % 5) as f64 - 2.0) * if i >= ROTATION_MODES { 0.01 } else { 1.0 })
            .collect();
        let g = obj.gradient(&z);
        let h = obj.hessian(&z).0;
        let eps = 1e-6;
        for i in 0..r.dim() {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[i] += eps;
            zm[i] -= eps;
            let fd = (obj.value(&zp) - obj.value(&zm)) / (2.0 * eps);
            assert!((fd - g[i]).abs() < 1e-5 * (1.0 + g[i].abs()), "g[{i}] {fd} vs {}", g[i]);
            let (gp, gm) = (obj.gradient(&zp), obj.gradient(&zm));
            for j in 0..r.dim() {
                let fd = (gp[j] - gm[j]) / (2.0 * eps);
                assert!((fd - h[(i, j)]).abs() < 1e-4 * (1.0 + h[(i, j)].abs()), "h[{i},{j}] {fd} vs {}", h[(i, j)]);
            }
        }
    }

    #[test]
    fn force_is_energy_slope() {
        let r = paper();
        let ds: Vec<f64> = (0..=400).map(|k| 0.01 * k as f64).collect();
        let s = r.trace(&ds).unwrap();
        assert!(s[0].force.abs() < 1e-9);
        for k in (10..400).step_by(10) {
            let slope = (s[k + 1].energy - s[k - 1].energy) / 0.02;
            assert!((slope - s[k].force).abs() < 1e-3 * s[k].force.abs(), "{k}: {slope} vs {}", s[k].force);
        }
        assert!(s[5].force > 0.0);
    }

    #[test]
    fn paper_arch_is_bistable() {
        let r = paper();
        let z = r.zero_crossings(2.1 * 9.4, 84).unwrap();
        assert_eq!(z.len(), 2, "{z:?}");
        assert!(z[0] > 5.0 && z[0] < 14.0);
        assert!(z[1] > 14.0 && z[1] < 2.0 * 9.4);
    }

    #[test]
    fn shallow_arch_is_monostable() {
        let r = BeamRom::new(22.5, 1.25, 1.25, 5.0, 12.0);
        let z = r.zero_crossings(2.1 * 1.25, 60).unwrap();
        assert!(z.is_empty(), "{z:?}");
    }
}
