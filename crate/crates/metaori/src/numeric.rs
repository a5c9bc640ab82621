//! Small numerical toolkit: root bracketing, 1-D minimization, quadrature
//! and a modified-Newton minimizer over dense or banded Hessians.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("no convergence after {iterations} iterations (gradient norm {grad_norm:.3e})")]
    NoConvergence { iterations: usize, grad_norm: f64 },
    #[error("non-finite value encountered during solve")]
    NonFinite,
}

/// Bisection on a sign-changing bracket. Returns `None` when `f(lo)` and
/// `f(hi)` have the same strict sign.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    while (hi - lo).abs() > tol {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// All sign changes of `f` on a uniform scan of `[lo, hi]`, each refined by
/// bisection.
pub fn scan_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, samples: usize, tol: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    let step = (hi - lo) / samples as f64;
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=samples {
        let x1 = if i == samples { hi } else { lo + step * i as f64 };
        let f1 = f(x1);
        if f0.is_finite() && f1.is_finite() {
            if f0 == 0.0 {
                roots.push(x0);
            } else if f0.signum() != f1.signum() && f1 != 0.0 {
                if let Some(r) = bisect(&f, x0, x1, tol) {
                    roots.push(r);
                }
            }
        }
        x0 = x1;
        f0 = f1;
    }
    if f0 == 0.0 {
        roots.push(x0);
    }
    roots
}

/// Brent's derivative-free minimizer on `[a, b]`.
pub fn brent_minimize<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    const CGOLD: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = if a < b { (a, b) } else { (b, a) };
    let mut x = a + CGOLD * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..500 {
        let xm = 0.5 * (a + b);
        let tol1 = tol * x.abs() + 1e-14;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Natural cubic spline through strictly increasing knots. Outside the
/// knot range it continues the end cubics.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivative at each knot.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n, "spline needs matching knots and values");
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior equations.
            let mut c = vec![0.0; n];
            let mut r = vec![0.0; n];
            for i in 1..n - 1 {
                let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
                let rhs = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
                let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
                c[i] = h1 / diag;
                r[i] = (rhs - h0 * r[i - 1]) / diag;
            }
            for i in (1..n - 1).rev() {
                m[i] = r[i] - c[i] * m[i + 1];
            }
        }
        CubicSpline { x, y, m }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn segment(&self, t: f64) -> usize {
        self.x.partition_point(|&k| k <= t).clamp(1, self.x.len() - 1) - 1
    }

    /// Value, first and second derivative at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let (a, b) = ((self.x[i + 1] - t) / h, (t - self.x[i]) / h);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let v = a * self.y[i] + b * self.y[i + 1] + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d = (self.y[i + 1] - self.y[i]) / h + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        (v, d, a * m0 + b * m1)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t).0
    }
}

/// A symmetric matrix that can be factored with a diagonal shift.
pub trait SymSystem {
    fn dim(&self) -> usize;
    /// Solves `(H + shift·I) x = rhs`; `None` when the shifted matrix is not
    /// positive definite.
    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Option<Vec<f64>>;
    /// Lowest eigenpair; the vector has unit norm.
    fn lowest_mode(&self) -> (f64, Vec<f64>);
    fn max_diag(&self) -> f64;
}

pub struct DenseSym(pub DMatrix<f64>);

impl SymSystem for DenseSym {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Option<Vec<f64>> {
        let n = self.dim();
        let m = &self.0 + DMatrix::identity(n, n) * shift;
        let chol = m.cholesky()?;
        let x = chol.solve(&DVector::from_column_slice(rhs));
        Some(x.as_slice().to_vec())
    }

    fn lowest_mode(&self) -> (f64, Vec<f64>) {
        let eig = SymmetricEigen::new(self.0.clone());
        let (i, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect())
    }

    fn max_diag(&self) -> f64 {
        self.0.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Symmetric banded matrix; stores the lower band row by row.
#[derive(Clone, Debug)]
pub struct BandedSym {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedSym {
    pub fn zeros(n: usize, bw: usize) -> Self {
        BandedSym { n, bw, data: vec![0.0; n * (bw + 1)] }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (j + self.bw - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bw {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    /// Adds `v` to entry (i, j) (and implicitly its mirror).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        assert!(i - j <= self.bw, "entry outside band");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.bw);
            for j in j0..=i {
                let a = self.data[self.idx(i, j)];
                y[i] += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
        }
        y
    }

    fn cholesky(&self, shift: f64) -> Option<BandedSym> {
        let mut l = BandedSym::zeros(self.n, self.bw);
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.bw);
            for k in j0..=i {
                let mut s = self.data[self.idx(i, k)];
                if k == i {
                    s += shift;
                }
                let m0 = j0.max(k.saturating_sub(self.bw));
                for m in m0..k {
                    s -= l.data[l.idx(i, m)] * l.data[l.idx(k, m)];
                }
                if k == i {
                    if !(s > 0.0) || !s.is_finite() {
                        return None;
                    }
                    let v = s.sqrt();
                    let ix = l.idx(i, i);
                    l.data[ix] = v;
                } else {
                    let d = l.data[l.idx(k, k)];
                    let ix = l.idx(i, k);
                    l.data[ix] = s / d;
                }
            }
        }
        Some(l)
    }

    fn chol_solve(l: &BandedSym, rhs: &[f64]) -> Vec<f64> {
        let n = l.n;
        let mut y = rhs.to_vec();
        for i in 0..n {
            let j0 = i.saturating_sub(l.bw);
            let mut s = y[i];
            for j in j0..i {
                s -= l.data[l.idx(i, j)] * y[j];
            }
            y[i] = s / l.data[l.idx(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            let j1 = (i + l.bw).min(n - 1);
            for j in i + 1..=j1 {
                s -= l.data[l.idx(j, i)] * y[j];
            }
            y[i] = s / l.data[l.idx(i, i)];
        }
        y
    }
}

impl SymSystem for BandedSym {
    fn dim(&self) -> usize {
        self.n
    }

    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Option<Vec<f64>> {
        let l = self.cholesky(shift)?;
        Some(Self::chol_solve(&l, rhs))
    }

    fn lowest_mode(&self) -> (f64, Vec<f64>) {
        // Shifted inverse iteration with the shift pushed just past -λ_min.
        let scale = self.max_diag().max(1.0);
        let mut ok = if self.cholesky(0.0).is_some() { 0.0 } else { f64::NAN };
        if ok.is_nan() {
            let mut bad = 0.0;
            let mut s = 1e-10 * scale;
            while self.cholesky(s).is_none() {
                bad = s;
                s *= 4.0;
            }
            ok = s;
            for _ in 0..40 {
                let mid = 0.5 * (bad + ok);
                if self.cholesky(mid).is_some() {
                    ok = mid;
                } else {
                    bad = mid;
                }
            }
            ok += 1e-9 * scale;
        }
        let l = self.cholesky(ok).expect("shift chosen to be positive definite");
        let mut v: Vec<f64> = (0..self.n).map(|i| 1.0 + ((i * 7919) % 13) as f64 * 1e-3).collect();
        for _ in 0..200 {
            let mut w = Self::chol_solve(&l, &v);
            let nrm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            w.iter_mut().for_each(|x| *x /= nrm);
            let diff: f64 = w.iter().zip(&v).map(|(a, b)| (a.abs() - b.abs()).abs()).fold(0.0, f64::max);
            v = w;
            if diff < 1e-12 {
                break;
            }
        }
        let hv = self.mul_vec(&v);
        let lambda = v.iter().zip(&hv).map(|(a, b)| a * b).sum();
        (lambda, v)
    }

    fn max_diag(&self) -> f64 {
        (0..self.n).fold(0.0f64, |m, i| m.max(self.data[self.idx(i, i)].abs()))
    }
}

/// Smooth objective with an analytic Hessian.
pub trait Objective {
    type Hessian: SymSystem;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    fn hessian(&self, x: &[f64]) -> Self::Hessian;
}

#[derive(Clone, Copy, Debug)]
pub struct Newton {
    pub gtol: f64,
    pub max_iter: usize,
}

#[derive(Clone, Debug)]
pub struct MinReport {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub grad_norm: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Newton {
    /// Newton's method with a diagonal shift that keeps each step a descent
    /// direction, and an Armijo backtracking line search.
    pub fn minimize<O: Objective>(&self, obj: &O, x0: Vec<f64>) -> Result<MinReport, SolveError> {
        let mut x = x0;
        let mut f = obj.value(&x);
        if !f.is_finite() {
            return Err(SolveError::NonFinite);
        }
        for it in 0..self.max_iter {
            let g = obj.gradient(&x);
            let gn = norm(&g);
            if !gn.is_finite() {
                return Err(SolveError::NonFinite);
            }
            if gn < self.gtol {
                return Ok(MinReport { x, value: f, iterations: it, grad_norm: gn });
            }
            let h = obj.hessian(&x);
            let neg: Vec<f64> = g.iter().map(|v| -v).collect();
            let base = 1e-10 * h.max_diag().max(1.0);
            let step = match h.solve_shifted(0.0, &neg) {
                Some(s) => s,
                None => {
                    let mut shift = base;
                    while h.solve_shifted(shift, &neg).is_none() {
                        shift *= 10.0;
                        if !shift.is_finite() {
                            return Err(SolveError::NonFinite);
                        }
                    }
                    // A shift barely past the lowest eigenvalue leaves the
                    // system nearly singular; doubling it bounds the step.
                    h.solve_shifted(2.0 * shift, &neg).ok_or(SolveError::NonFinite)?
                }
            };
            let slope = dot(&g, &step);
            if -slope <= 1e-13 * (1.0 + f.abs()) {
                // The predicted decrease is below what the energy can
                // resolve; take the step on the strength of the gradient.
                x.iter_mut().zip(&step).for_each(|(xi, si)| *xi += si);
                f = obj.value(&x);
                continue;
            }
            let mut a = 1.0;
            let mut accepted = None;
            while a > 1e-12 {
                let xt: Vec<f64> = x.iter().zip(&step).map(|(xi, si)| xi + a * si).collect();
                let ft = obj.value(&xt);
                if ft.is_finite() && ft <= f + 1e-4 * a * slope {
                    accepted = Some((xt, ft));
                    break;
                }
                a *= 0.5;
            }
            match accepted {
                Some((xt, ft)) => {
                    x = xt;
                    f = ft;
                }
                None => {
                    // Energy differences are below round-off; fall back on
                    // the gradient norm to decide whether the full step helps.
                    let xt: Vec<f64> = x.iter().zip(&step).map(|(xi, si)| xi + si).collect();
                    let gt = norm(&obj.gradient(&xt));
                    if gt < gn {
                        f = obj.value(&xt);
                        x = xt;
                    } else {
                        return Err(SolveError::NoConvergence { iterations: it, grad_norm: gn });
                    }
                }
            }
        }
        let gn = norm(&obj.gradient(&x));
        if gn < self.gtol {
            Ok(MinReport { x, value: f, iterations: self.max_iter, grad_norm: gn })
        } else {
            Err(SolveError::NoConvergence { iterations: self.max_iter, grad_norm: gn })
        }
    }
}

/// Escapes saddle points: while the Hessian at `x` has an eigenvalue below
/// `-eig_tol`, perturbs along the lowest mode in both directions, re-solves
/// and keeps the lower-energy result. `solve` maps a start point to a
/// converged point and its energy.
pub fn escape_saddles<S, M>(
    mut x: Vec<f64>,
    mut energy: f64,
    amplitude: f64,
    eig_tol: f64,
    max_rounds: usize,
    solve: S,
    lowest_mode: M,
) -> Result<(Vec<f64>, f64), SolveError>
where
    S: Fn(Vec<f64>) -> Result<(Vec<f64>, f64), SolveError>,
    M: Fn(&[f64]) -> (f64, Vec<f64>),
{
    for _ in 0..max_rounds {
        let (lam, v) = lowest_mode(&x);
        if lam >= -eig_tol {
            break;
        }
        let vmax = v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let mut best: Option<(Vec<f64>, f64)> = None;
        for sign in [1.0, -1.0] {
            let start: Vec<f64> = x.iter().zip(&v).map(|(xi, vi)| xi + sign * amplitude * vi / vmax).collect();
            if let Ok((xs, es)) = solve(start) {
                if best.as_ref().is_none_or(|b| es < b.1) {
                    best = Some((xs, es));
                }
            }
        }
        match best {
            Some((xs, es)) => {
                x = xs;
                energy = es;
            }
            None => break,
        }
    }
    Ok((x, energy))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bisect_rejects_unbracketed() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-10).is_none());
    }

    #[test]
    fn scan_finds_all_roots_of_cubic() {
        let r = scan_roots(|x| (x - 1.0) * (x - 2.0) * (x - 3.0), 0.5, 3.7, 97, 1e-13);
        assert_eq!(r.len(), 3);
        for (a, b) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn brent_quadratic_and_cosine() {
        let (x, _) = brent_minimize(|x| (x - 0.3) * (x - 0.3), -2.0, 5.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-8);
        let (x, fx) = brent_minimize(f64::cos, 2.0, 4.0, 1e-12);
        assert!((x - std::f64::consts::PI).abs() < 1e-7);
        assert!((fx + 1.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn banded_solve_matches_dense() {
        let n = 12;
        let bw = 3;
        let mut b = BandedSym::zeros(n, bw);
        let mut d = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i.saturating_sub(bw)..=i {
                let v = if i == j { 10.0 + i as f64 } else { 1.0 / (1.0 + (i + 2 * j) as f64) };
                b.add(i, j, v);
                d[(i, j)] = v;
                d[(j, i)] = v;
            }
        }
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let xb = b.solve_shifted(0.5, &rhs).unwrap();
        let xd = DenseSym(d.clone()).solve_shifted(0.5, &rhs).unwrap();
        for (p, q) in xb.iter().zip(&xd) {
            assert!((p - q).abs() < 1e-12);
        }
        let (lb, _) = b.lowest_mode();
        let (ld, _) = DenseSym(d).lowest_mode();
        assert!((lb - ld).abs() < 1e-9);
    }

    #[test]
    fn banded_lowest_mode_of_indefinite_matrix() {
        let n = 30;
        let mut b = BandedSym::zeros(n, 1);
        let mut d = DMatrix::zeros(n, n);
        for i in 0..n {
            b.add(i, i, 2.0 - 2.5 * (i == 7) as i32 as f64);
            d[(i, i)] = 2.0 - 2.5 * (i == 7) as i32 as f64;
            if i > 0 {
                b.add(i, i - 1, -1.0);
                d[(i, i - 1)] = -1.0;
                d[(i - 1, i)] = -1.0;
            }
        }
        assert!(b.solve_shifted(0.0, &vec![1.0; n]).is_none());
        let (lb, v) = b.lowest_mode();
        let (ld, _) = DenseSym(d).lowest_mode();
        assert!((lb - ld).abs() < 1e-8, "{lb} vs {ld}");
        assert!((norm(&v) - 1.0).abs() < 1e-12);
    }

    struct Rosen;
    impl Objective for Rosen {
        type Hessian = DenseSym;
        fn value(&self, x: &[f64]) -> f64 {
            (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
        }
        fn gradient(&self, x: &[f64]) -> Vec<f64> {
            vec![-2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]), 200.0 * (x[1] - x[0] * x[0])]
        }
        fn hessian(&self, x: &[f64]) -> DenseSym {
            DenseSym(DMatrix::from_row_slice(
                2,
                2,
                &[2.0 - 400.0 * x[1] + 1200.0 * x[0] * x[0], -400.0 * x[0], -400.0 * x[0], 200.0],
            ))
        }
    }

    #[test]
    fn newton_solves_rosenbrock() {
        let r = Newton { gtol: 1e-10, max_iter: 200 }.minimize(&Rosen, vec![-1.2, 1.0]).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-8 && (r.x[1] - 1.0).abs() < 1e-8);
    }

    struct DoubleWell;
    impl Objective for DoubleWell {
        type Hessian = DenseSym;
        fn value(&self, x: &[f64]) -> f64 {
            (x[0] * x[0] - 1.0).powi(2) + 0.1 * x[0] + x[1] * x[1]
        }
        fn gradient(&self, x: &[f64]) -> Vec<f64> {
            vec![4.0 * x[0] * (x[0] * x[0] - 1.0) + 0.1, 2.0 * x[1]]
        }
        fn hessian(&self, x: &[f64]) -> DenseSym {
            DenseSym(DMatrix::from_row_slice(2, 2, &[12.0 * x[0] * x[0] - 4.0, 0.0, 0.0, 2.0]))
        }
    }

    #[test]
    fn saddle_escape_picks_lower_well() {
        // Start exactly on the stationary point near the barrier top.
        let x0 = bisect(|x| 4.0 * x * (x * x - 1.0) + 0.1, -0.3, 0.3, 1e-15).unwrap();
        let newton = Newton { gtol: 1e-12, max_iter: 100 };
        let solve = |x: Vec<f64>| newton.minimize(&DoubleWell, x).map(|r| (r.x, r.value));
        let (x, _) = escape_saddles(vec![x0, 0.0], DoubleWell.value(&[x0, 0.0]), 0.05, 1e-9, 5, solve, |x| {
            DoubleWell.hessian(x).lowest_mode()
        })
        .unwrap();
        assert!(x[0] < -0.9, "lower well is at negative x, got {}", x[0]);
    }

    #[test]
    fn spline_reproduces_cubic_interior() {
        let x: Vec<f64> = (0..=40).map(|k| k as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|t| t.sin()).collect();
        let s = CubicSpline::natural(x.clone(), y);
        for k in 0..x.len() {
            assert!((s.value(x[k]) - x[k].sin()).abs() < 1e-14);
        }
        let (v, d, _) = s.eval(2.05);
        assert!((v - 2.05f64.sin()).abs() < 1e-5);
        assert!((d - 2.05f64.cos()).abs() < 1e-4);
        let line = CubicSpline::natural(vec![0.0, 1.0, 3.0], vec![1.0, 3.0, 7.0]);
        let (v, d, c) = line.eval(2.2);
        assert!((v - 5.4).abs() < 1e-12 && (d - 2.0).abs() < 1e-12 && c.abs() < 1e-12);
    }
}
