//! Discrete elastica of the half arch: a chain of stiff axial springs with
//! bending springs at the joints, clamped at both ends, minimized directly
//! in nodal coordinates.

use super::MechanicsError;
use crate::numeric::{escape_saddles, BandedSym, Newton, Objective, SolveError, SymSystem};
use std::f64::consts::PI;

pub const DEFAULT_SEGMENTS: usize = 200;

/// Largest apex step between continuation stations (mm).
const STATION_STEP: f64 = 0.25;

#[derive(Clone, Debug)]
pub struct Elastica {
    ei: f64,
    ea: f64,
    /// Rest nodes from the clamp (index 0) to the apex.
    rest: Vec<[f64; 2]>,
    rest_len: Vec<f64>,
    rest_angle: Vec<f64>,
    /// Length attributed to each interior joint.
    joint_len: Vec<f64>,
    span: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElasticaSample {
    pub d: f64,
    /// Force holding the apex (N), positive when pushing down.
    pub force: f64,
    pub energy: f64,
}

impl Elastica {
    pub fn new(l: f64, h: f64, t: f64, depth: f64, e: f64, segments: usize) -> Self {
        assert!(segments >= 2);
        let half = 0.5 * l;
        let rest: Vec<[f64; 2]> = (0..=segments)
            .map(|k| {
                let x = half * k as f64 / segments as f64;
                [x, 0.5 * h * (1.0 - (2.0 * PI * x / l).cos())]
            })
            .collect();
        let seg = |k: usize| [rest[k + 1][0] - rest[k][0], rest[k + 1][1] - rest[k][1]];
        let rest_len: Vec<f64> = (0..segments).map(|k| seg(k)[0].hypot(seg(k)[1])).collect();
        let rest_angle: Vec<f64> = (0..segments).map(|k| seg(k)[1].atan2(seg(k)[0])).collect();
        let joint_len = (1..segments).map(|k| 0.5 * (rest_len[k - 1] + rest_len[k])).collect();
        Elastica {
            ei: e * depth * t.powi(3) / 12.0,
            ea: e * depth * t,
            rest,
            rest_len,
            rest_angle,
            joint_len,
            span: half,
        }
    }

    fn segments(&self) -> usize {
        self.rest_len.len()
    }

    /// Full node list for interior coordinates `x` and apex drop `d`.
    fn nodes(&self, x: &[f64], d: f64) -> Vec<[f64; 2]> {
        let n = self.segments();
        let mut p = Vec::with_capacity(n + 1);
        p.push(self.rest[0]);
        p.extend(x.chunks(2).map(|c| [c[0], c[1]]));
        p.push([self.rest[n][0], self.rest[n][1] - d]);
        p
    }

    /// Clamp rotational stiffness of the end segments.
    fn end_stiffness(&self, k: usize) -> f64 {
        self.ei / (0.5 * self.rest_len[k])
    }

    /// Per segment: vector, length, angle; and `dE/dθ` with its
    /// tridiagonal derivative.
    fn parts(&self, p: &[[f64; 2]]) -> Parts {
        let n = self.segments();
        let mut s = Vec::with_capacity(n);
        let mut ang = Vec::with_capacity(n);
        for k in 0..n {
            let v = [p[k + 1][0] - p[k][0], p[k + 1][1] - p[k][1]];
            ang.push(v[1].atan2(v[0]));
            s.push(v);
        }
        let mut a = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n];
        let mut bend = 0.0;
        for j in 1..n {
            let dth = wrap(ang[j] - ang[j - 1]) - wrap(self.rest_angle[j] - self.rest_angle[j - 1]);
            let k = self.ei / self.joint_len[j - 1];
            bend += 0.5 * k * dth * dth;
            a[j] += k * dth;
            a[j - 1] -= k * dth;
            diag[j] += k;
            diag[j - 1] += k;
            off[j] = -k;
        }
        for k in [0, n - 1] {
            let c = self.end_stiffness(k);
            let dth = wrap(ang[k] - self.rest_angle[k]);
            bend += 0.5 * c * dth * dth;
            a[k] += c * dth;
            diag[k] += c;
        }
        Parts { s, a, diag, off, bend }
    }

    fn energy_at(&self, p: &[[f64; 2]]) -> f64 {
        let parts = self.parts(p);
        let stretch: f64 = parts
            .s
            .iter()
            .zip(&self.rest_len)
            .map(|(v, l0)| {
                let e = v[0].hypot(v[1]) - l0;
                0.5 * self.ea * e * e / l0
            })
            .sum();
        stretch + parts.bend
    }

    /// Gradient with respect to every segment vector.
    fn segment_gradients(&self, parts: &Parts) -> Vec<[f64; 2]> {
        parts
            .s
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let l = v[0].hypot(v[1]);
                let f = self.ea * (l - self.rest_len[k]) / self.rest_len[k] / l;
                let g = angle_gradient(*v);
                [f * v[0] + parts.a[k] * g[0], f * v[1] + parts.a[k] * g[1]]
            })
            .collect()
    }

    fn force(&self, x: &[f64], d: f64) -> f64 {
        let p = self.nodes(x, d);
        let parts = self.parts(&p);
        let g = self.segment_gradients(&parts);
        -g[self.segments() - 1][1]
    }

    fn solve(&self, x: Vec<f64>, d: f64) -> Result<(Vec<f64>, f64), SolveError> {
        let obj = Chain { model: self, d };
        let r = Newton { gtol: 1e-8, max_iter: 200 }.minimize(&obj, x)?;
        Ok((r.x, r.value))
    }

    fn settle(&self, x: Vec<f64>, d: f64) -> Result<Vec<f64>, SolveError> {
        let (x, e) = self.solve(x, d)?;
        let obj = Chain { model: self, d };
        let (x, _) = escape_saddles(x, e, 0.05, 1e-9, 5, |s| self.solve(s, d), |z| obj.hessian(z).lowest_mode())?;
        Ok(x)
    }

    fn rest_dofs(&self) -> Vec<f64> {
        self.rest[1..self.segments()].iter().flat_map(|p| [p[0], p[1]]).collect()
    }

    /// Moves interior nodes down by the change in apex drop, weighted by
    /// the arch mode shape.
    fn predict(&self, x: &mut [f64], delta: f64) {
        for (k, c) in x.chunks_mut(2).enumerate() {
            let u = self.rest[k + 1][0] / self.span;
            c[1] -= delta * 0.5 * (1.0 - (PI * u).cos());
        }
    }

    /// Equilibria along increasing apex drops, passing through
    /// intermediate stations no more than 0.25 mm apart.
    pub fn trace(&self, displacements: &[f64]) -> Result<Vec<ElasticaSample>, MechanicsError> {
        let mut x = self.rest_dofs();
        let mut d_now = 0.0;
        let mut out = Vec::with_capacity(displacements.len());
        for &d in displacements {
            let steps = ((d - d_now).abs() / STATION_STEP).ceil().max(1.0) as usize;
            let start = d_now;
            for k in 1..=steps {
                let dk = start + (d - start) * k as f64 / steps as f64;
                self.predict(&mut x, dk - d_now);
                d_now = dk;
                x = self.settle(x, dk).map_err(|e| MechanicsError::NoConvergence { d: dk, source: e })?;
            }
            let p = self.nodes(&x, d);
            out.push(ElasticaSample { d, force: self.force(&x, d), energy: self.energy_at(&p) });
        }
        Ok(out)
    }
}

struct Parts {
    s: Vec<[f64; 2]>,
    a: Vec<f64>,
    diag: Vec<f64>,
    /// `off[k] = ∂a_k/∂θ_{k−1}`.
    off: Vec<f64>,
    bend: f64,
}

fn wrap(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    } else if a < -PI {
        a += 2.0 * PI;
    }
    a
}

fn angle_gradient(v: [f64; 2]) -> [f64; 2] {
    let l2 = v[0] * v[0] + v[1] * v[1];
    [-v[1] / l2, v[0] / l2]
}

fn angle_hessian(v: [f64; 2]) -> [[f64; 2]; 2] {
    let l2 = v[0] * v[0] + v[1] * v[1];
    let l4 = l2 * l2;
    let xy = 2.0 * v[0] * v[1] / l4;
    let d = (v[1] * v[1] - v[0] * v[0]) / l4;
    [[xy, d], [d, -xy]]
}

struct Chain<'a> {
    model: &'a Elastica,
    d: f64,
}

impl Objective for Chain<'_> {
    type Hessian = BandedSym;

    fn value(&self, x: &[f64]) -> f64 {
        self.model.energy_at(&self.model.nodes(x, self.d))
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let m = self.model;
        let p = m.nodes(x, self.d);
        let parts = m.parts(&p);
        let g = m.segment_gradients(&parts);
        // Interior node i closes segment i − 1 and opens segment i.
        (1..m.segments()).flat_map(|i| [g[i - 1][0] - g[i][0], g[i - 1][1] - g[i][1]]).collect()
    }

    fn hessian(&self, x: &[f64]) -> BandedSym {
        let m = self.model;
        let n = m.segments();
        let p = m.nodes(x, self.d);
        let parts = m.parts(&p);
        let grads: Vec<[f64; 2]> = parts.s.iter().map(|v| angle_gradient(*v)).collect();
        // Segment blocks: diagonal, and coupling of k with k − 1.
        let mut diag = Vec::with_capacity(n);
        for (k, v) in parts.s.iter().enumerate() {
            let l = v[0].hypot(v[1]);
            let l0 = m.rest_len[k];
            let u = [v[0] / l, v[1] / l];
            let axial = m.ea / l0;
            let hoop = m.ea * (l - l0) / l0 / l;
            let th = angle_hessian(*v);
            let g = grads[k];
            let mut b = [[0.0; 2]; 2];
            for r in 0..2 {
                for c in 0..2 {
                    let id = if r == c { 1.0 } else { 0.0 };
                    b[r][c] = axial * u[r] * u[c]
                        + hoop * (id - u[r] * u[c])
                        + parts.a[k] * th[r][c]
                        + parts.diag[k] * g[r] * g[c];
                }
            }
            diag.push(b);
        }
        let couple = |k: usize| -> [[f64; 2]; 2] {
            let (g, h) = (grads[k], grads[k - 1]);
            let c = parts.off[k];
            [[c * g[0] * h[0], c * g[0] * h[1]], [c * g[1] * h[0], c * g[1] * h[1]]]
        };
        // Segment blocks to node blocks: node i sees +seg(i − 1) − seg(i).
        let nodes = n - 1;
        let mut hm = BandedSym::zeros(2 * nodes, 5);
        let seg_block = |e: usize, f: usize| -> Option<[[f64; 2]; 2]> {
            if e == f {
                Some(diag[e])
            } else if e == f + 1 {
                Some(couple(e))
            } else if f == e + 1 {
                let b = couple(f);
                Some([[b[0][0], b[1][0]], [b[0][1], b[1][1]]])
            } else {
                None
            }
        };
        for i in 1..=nodes {
            for j in i.saturating_sub(2).max(1)..=i {
                let mut block = [[0.0; 2]; 2];
                for (e, se) in [(i - 1, 1.0), (i, -1.0)] {
                    for (f, sf) in [(j - 1, 1.0), (j, -1.0)] {
                        if let Some(b) = seg_block(e, f) {
                            for r in 0..2 {
                                for c in 0..2 {
                                    block[r][c] += se * sf * b[r][c];
                                }
                            }
                        }
                    }
                }
                for r in 0..2 {
                    for c in 0..2 {
                        let (gi, gj) = (2 * (i - 1) + r, 2 * (j - 1) + c);
                        if gj <= gi {
                            hm.add(gi, gj, block[r][c]);
                        }
                    }
                }
            }
        }
        hm
    }
}
