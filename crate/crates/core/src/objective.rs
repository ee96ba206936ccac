//! Convex `L^p` residual objectives and the quasi-Newton minimizer behind the
//! OPA solver and the dual extremal search.
//!
//! The objective is `F(c) = mean_k φ(t_k - Σ_j c_j b_j(ζ_k))` with
//! `φ(r) = (|r|² + ε²)^{p/2}`, where `ε = 0` gives the plain `|r|^p`. Complex
//! coefficients are flattened to a real vector `[Re c_0.., Im c_0..]`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grid::mean_real;

/// Continuation schedule used for `p < 2`.
pub const DEFAULT_SMOOTHING: [f64; 4] = [1e-2, 1e-4, 1e-6, 0.0];

const STAGE_ITER_CAP: usize = 200;

/// Backtracking Armijo parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSearch {
    /// Sufficient-decrease constant.
    pub c1: f64,
    /// Step is halved at most this many times.
    pub max_backtracks: usize,
}

impl Default for LineSearch {
    fn default() -> Self {
        LineSearch { c1: 1e-4, max_backtracks: 60 }
    }
}

/// `mean φ(t - Σ c_j b_j)` over a fixed set of boundary samples.
#[derive(Debug, Clone)]
pub struct LpResidualObjective {
    target: Vec<Complex64>,
    basis: Vec<Vec<Complex64>>,
    p: f64,
}

impl LpResidualObjective {
    /// `target` and every basis vector hold samples on the same grid.
    pub fn new(target: Vec<Complex64>, basis: Vec<Vec<Complex64>>, p: f64) -> Self {
        assert!(p > 1.0, "objective exponent must exceed 1");
        assert!(basis.iter().all(|b| b.len() == target.len()), "sample length mismatch");
        LpResidualObjective { target, basis, p }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn real_dim(&self) -> usize {
        2 * self.basis.len()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn basis(&self) -> &[Vec<Complex64>] {
        &self.basis
    }

    pub fn to_complex(x: &[f64]) -> Vec<Complex64> {
        let d = x.len() / 2;
        (0..d).map(|j| Complex64::new(x[j], x[d + j])).collect()
    }

    pub fn to_real(c: &[Complex64]) -> Vec<f64> {
        c.iter().map(|z| z.re).chain(c.iter().map(|z| z.im)).collect()
    }

    /// Residual samples `t - Σ c_j b_j`.
    pub fn residual(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut r = self.target.clone();
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (rk, bk) in r.iter_mut().zip(b) {
                *rk -= c * bk;
            }
        }
        r
    }

    fn residual_real(&self, x: &[f64]) -> Vec<Complex64> {
        self.residual(&Self::to_complex(x))
    }

    pub fn value(&self, x: &[f64], eps: f64) -> f64 {
        let r = self.residual_real(x);
        self.value_of_residual(&r, eps)
    }

    fn value_of_residual(&self, r: &[Complex64], eps: f64) -> f64 {
        let p = self.p;
        let eps2 = eps * eps;
        if eps == 0.0 && p == 2.0 {
            mean_real(r.iter().map(|v| v.norm_sqr()), r.len())
        } else {
            mean_real(r.iter().map(|v| (v.norm_sqr() + eps2).powf(p / 2.0)), r.len())
        }
    }

    /// Per-node weight `(|r|² + ε²)^{(p-2)/2}`; zero residuals get weight 0
    /// when the power would be singular.
    fn weights(&self, r: &[Complex64], eps: f64) -> Vec<f64> {
        let half = (self.p - 2.0) / 2.0;
        let eps2 = eps * eps;
        r.iter()
            .map(|v| {
                let s = v.norm_sqr() + eps2;
                if s == 0.0 {
                    0.0
                } else {
                    s.powf(half)
                }
            })
            .collect()
    }

    /// Complex Wirtinger-style gradient `-p mean(w r conj(b_j))`; its real and
    /// imaginary parts are the derivatives in `Re c_j` and `Im c_j`.
    fn complex_gradient(&self, r: &[Complex64], w: &[f64]) -> Vec<Complex64> {
        let n = r.len() as f64;
        let wr: Vec<Complex64> = r.iter().zip(w).map(|(ri, wi)| ri * wi).collect();
        self.basis
            .iter()
            .map(|b| {
                let s: Complex64 = wr.iter().zip(b).map(|(a, bk)| a * bk.conj()).sum();
                -self.p * s / n
            })
            .collect()
    }

    pub fn gradient(&self, x: &[f64], eps: f64) -> Vec<f64> {
        let r = self.residual_real(x);
        let w = self.weights(&r, eps);
        Self::to_real(&self.complex_gradient(&r, &w))
    }

    pub fn value_and_gradient(&self, x: &[f64], eps: f64) -> (f64, Vec<f64>) {
        let r = self.residual_real(x);
        let w = self.weights(&r, eps);
        (self.value_of_residual(&r, eps), Self::to_real(&self.complex_gradient(&r, &w)))
    }

    /// Exact Hessian in the real coordinates.
    pub fn hessian(&self, x: &[f64], eps: f64) -> DMatrix<f64> {
        let r = self.residual_real(x);
        let p = self.p;
        let d = self.dim();
        let m = 2 * d;
        let eps2 = eps * eps;
        let mut h = DMatrix::<f64>::zeros(m, m);
        let mut delta = vec![Complex64::new(0.0, 0.0); m];
        let mut proj = vec![0.0; m];
        let i = Complex64::new(0.0, 1.0);
        for (k, &rk) in r.iter().enumerate() {
            let s = rk.norm_sqr() + eps2;
            if s == 0.0 {
                continue;
            }
            let alpha = p * s.powf(p / 2.0 - 1.0);
            let beta = p * (p - 2.0) * s.powf(p / 2.0 - 2.0);
            for j in 0..d {
                let b = self.basis[j][k];
                delta[j] = -b;
                delta[d + j] = -i * b;
            }
            for a in 0..m {
                proj[a] = (rk * delta[a].conj()).re;
            }
            for a in 0..m {
                for c in a..m {
                    let v = alpha * (delta[a] * delta[c].conj()).re + beta * proj[a] * proj[c];
                    h[(a, c)] += v;
                }
            }
        }
        let n = r.len() as f64;
        for a in 0..m {
            for c in a..m {
                let v = h[(a, c)] / n;
                h[(a, c)] = v;
                h[(c, a)] = v;
            }
        }
        h
    }

    /// `max_j |mean(|r|^{p-2} conj(r) b_j)|`: the largest Birkhoff–James
    /// pairing between the residual and the basis directions.
    pub fn certificate(&self, coeffs: &[Complex64]) -> f64 {
        let r = self.residual(coeffs);
        self.certificate_of_residual(&r)
    }

    fn certificate_of_residual(&self, r: &[Complex64]) -> f64 {
        let w = self.weights(r, 0.0);
        self.complex_gradient(r, &w)
            .iter()
            .map(|g| g.norm() / self.p)
            .fold(0.0, f64::max)
    }
}

/// Outcome of [`minimize`].
#[derive(Debug, Clone)]
pub struct Minimized {
    pub coeffs: Vec<Complex64>,
    pub value: f64,
    pub certificate: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// BFGS with backtracking Armijo search on the real coordinatization.
///
/// Each smoothing stage starts from the exact inverse Hessian, then updates
/// it by BFGS. The final stage (which must be `ε = 0`) stops once the
/// Birkhoff–James certificate drops to `tol`.
pub fn minimize(
    obj: &LpResidualObjective,
    start: &[Complex64],
    smoothing: &[f64],
    tol: f64,
    max_iter: usize,
    line_search: &LineSearch,
) -> Minimized {
    assert_eq!(start.len(), obj.dim());
    let mut x = LpResidualObjective::to_real(start);
    let mut iterations = 0;
    let stages: Vec<f64> = if obj.p() >= 2.0 || smoothing.is_empty() {
        vec![0.0]
    } else {
        smoothing.to_vec()
    };
    for (si, &eps) in stages.iter().enumerate() {
        let last = si + 1 == stages.len();
        let budget = if last { max_iter } else { STAGE_ITER_CAP.min(max_iter) };
        let mut stage_iter = 0;
        let mut h_inv = inverse_hessian(obj, &x, eps);
        let mut fresh = true;
        let (mut fx, mut g) = obj.value_and_gradient(&x, eps);
        loop {
            if last {
                if obj.certificate(&LpResidualObjective::to_complex(&x)) <= tol {
                    break;
                }
            } else if inf_norm(&g) <= 1e-2 * eps {
                break;
            }
            if stage_iter >= budget || iterations >= max_iter {
                break;
            }
            let mut dir = mat_vec_neg(&h_inv, &g);
            if dot(&g, &dir) >= 0.0 {
                h_inv = inverse_hessian(obj, &x, eps);
                fresh = true;
                dir = mat_vec_neg(&h_inv, &g);
                if dot(&g, &dir) >= 0.0 {
                    dir = g.iter().map(|v| -v).collect();
                }
            }
            let slope = dot(&g, &dir);
            let allowance = 2f64.powi(-50) * fx.abs();
            let mut alpha = 1.0;
            let mut accepted = None;
            for _ in 0..line_search.max_backtracks {
                let trial: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + alpha * d).collect();
                let ft = obj.value(&trial, eps);
                if ft <= fx + line_search.c1 * alpha * slope + allowance {
                    accepted = Some((trial, ft));
                    break;
                }
                alpha *= 0.5;
            }
            iterations += 1;
            stage_iter += 1;
            let Some((x_new, f_new)) = accepted else {
                if fresh {
                    break;
                }
                h_inv = inverse_hessian(obj, &x, eps);
                fresh = true;
                continue;
            };
            let g_new = obj.gradient(&x_new, eps);
            let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
            bfgs_update(&mut h_inv, &s, &y);
            fresh = false;
            x = x_new;
            fx = f_new;
            g = g_new;
        }
    }
    let coeffs = LpResidualObjective::to_complex(&x);
    let certificate = obj.certificate(&coeffs);
    Minimized {
        value: obj.value(&x, 0.0),
        converged: certificate <= tol,
        coeffs,
        certificate,
        iterations,
    }
}

fn inverse_hessian(obj: &LpResidualObjective, x: &[f64], eps: f64) -> DMatrix<f64> {
    let h = obj.hessian(x, eps);
    let m = h.nrows();
    match h.clone().cholesky() {
        Some(ch) => ch.inverse(),
        None => {
            let scale = (0..m).map(|i| h[(i, i)].abs()).fold(0.0, f64::max).max(1e-12);
            DMatrix::identity(m, m) / scale
        }
    }
}

fn bfgs_update(h: &mut DMatrix<f64>, s: &[f64], y: &[f64]) {
    let sy = dot(s, y);
    let s_norm = dot(s, s).sqrt();
    let y_norm = dot(y, y).sqrt();
    if !(sy > 1e-14 * s_norm * y_norm) || sy == 0.0 {
        return;
    }
    let rho = 1.0 / sy;
    let sv = DVector::from_column_slice(s);
    let yv = DVector::from_column_slice(y);
    let hy = &*h * &yv;
    let yhy = yv.dot(&hy);
    // H ← H - ρ(H y sᵀ + s yᵀ H) + (ρ² yᵀHy + ρ) s sᵀ
    let update = -rho * (&hy * sv.transpose() + &sv * hy.transpose())
        + (rho * rho * yhy + rho) * (&sv * sv.transpose());
    *h += update;
}

fn mat_vec_neg(h: &DMatrix<f64>, g: &[f64]) -> Vec<f64> {
    let gv = DVector::from_column_slice(g);
    (-(h * gv)).iter().copied().collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}
