//! Metric projection of `1` onto the shift-invariant subspace generated by `f`.
//!
//! Only the inner factor `J` of `f` matters. With `Ĵ = conj(J(0)) J` the
//! nearest point is `g* = 1 - (1 - Ĵ)^{2/p}` and the distance is
//! `(1 - |J(0)|²)^{1/p}`. For finite Blaschke products the residual also has
//! an explicit rational form whose parameters come from the roots of one
//! polynomial; [`finite_blaschke_extremal`] builds it and checks it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_exponent, Error, Result};
use crate::function::{fractional_power, poly_mul, truncate_blaschke, BlaschkeProduct, FunctionSpec};
use crate::grid::{lp_norm, BoundarySamples, Grid};
use crate::orthogonality::{bj_residual, power_dual};
use crate::roots::{poly_from_roots, poly_roots};

/// Shifts `z^k J`, `k = 0..=PROJECTION_CHECK_SHIFTS`, tested against the residual.
pub const PROJECTION_CHECK_SHIFTS: i64 = 32;
pub const NORM_TOL: f64 = 1e-10;
pub const CERTIFICATE_TOL: f64 = 1e-9;
/// Bound on the consistency residuals of the finite Blaschke construction.
pub const CONSISTENCY_TOL: f64 = 1e-9;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `(1 - |J(0)|²)^{1/p}` for the inner factor `J` of `f`; 0 for outer `f`.
pub fn distance_formula(f: &FunctionSpec, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if f.has_trivial_inner() {
        return Ok(0.0);
    }
    Ok((1.0 - f.inner_at_zero().norm_sqr()).powf(1.0 / p))
}

#[derive(Debug, Clone)]
pub struct ProjectionResult {
    pub p: f64,
    pub gstar: BoundarySamples,
    /// `1 - g* = (1 - Ĵ)^{2/p}`.
    pub residual: BoundarySamples,
    pub distance: f64,
    pub j_at_zero: Complex64,
    /// Quadrature value of `‖1 - g*‖_p`.
    pub residual_norm: f64,
    /// `max_k bj_residual(1 - g*, z^k J, p)` over the checked shifts.
    pub certificate: f64,
    /// Both checks met: norm within [`NORM_TOL`] of the distance and
    /// certificate at most [`CERTIFICATE_TOL`].
    pub verified: bool,
}

/// Serializable digest of a [`ProjectionResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSummary {
    pub p: f64,
    pub distance: f64,
    #[serde(with = "crate::wire::complex")]
    pub j_at_zero: Complex64,
    pub residual_norm: f64,
    pub norm_gap: f64,
    pub certificate: f64,
    pub verified: bool,
}

impl ProjectionResult {
    pub fn norm_gap(&self) -> f64 {
        (self.residual_norm - self.distance).abs()
    }

    pub fn summary(&self) -> ProjectionSummary {
        ProjectionSummary {
            p: self.p,
            distance: self.distance,
            j_at_zero: self.j_at_zero,
            residual_norm: self.residual_norm,
            norm_gap: self.norm_gap(),
            certificate: self.certificate,
            verified: self.verified,
        }
    }
}

/// Builds `g*` on the grid and evaluates its two defining checks.
///
/// The checks are reported rather than enforced: for singular inner factors
/// uniform quadrature cannot resolve the boundary behaviour to `1e-10`.
pub fn project_one(f: &FunctionSpec, p: f64, grid: &Grid) -> Result<ProjectionResult> {
    check_exponent(p)?;
    if f.value_at_zero() == Complex64::new(0.0, 0.0) {
        return Err(Error::invalid("f(0) = 0"));
    }
    let inner = f.inner_part();
    let j0 = inner.inner_at_zero();
    let j = inner.sample(grid)?;
    if f.has_trivial_inner() {
        // [f] is the whole space: 1 itself is the projection.
        let zero = BoundarySamples::constant(grid, Complex64::new(0.0, 0.0));
        return Ok(ProjectionResult {
            p,
            gstar: BoundarySamples::constant(grid, one()),
            residual: zero,
            distance: 0.0,
            j_at_zero: j0,
            residual_norm: 0.0,
            certificate: 0.0,
            verified: true,
        });
    }
    let base = j.map(|v| one() - j0.conj() * v);
    let residual = fractional_power(&base, Complex64::new(1.0 - j0.norm_sqr(), 0.0), 2.0 / p)
        .map_err(|e| Error::InternalConsistency(format!("inner factor produced {e}")))?;
    let gstar = residual.map(|v| one() - v);
    let distance = distance_formula(f, p)?;
    let residual_norm = lp_norm(&residual, p);
    let mut certificate: f64 = 0.0;
    for k in 0..=PROJECTION_CHECK_SHIFTS {
        certificate = certificate.max(bj_residual(&residual, &j.shift(k), p)?);
    }
    let verified = (residual_norm - distance).abs() <= NORM_TOL && certificate <= CERTIFICATE_TOL;
    Ok(ProjectionResult { p, gstar, residual, distance, j_at_zero: j0, residual_norm, certificate, verified })
}

#[derive(Debug, Clone)]
pub struct ExtremalFbpResult {
    pub zeros: Vec<Complex64>,
    pub p: f64,
    /// `1 - |a_1 ⋯ a_N|²`.
    pub c: f64,
    /// Parameters of the factorization `c ∏ (1 - conj(w_k) z)`.
    pub w: Vec<Complex64>,
    pub d: usize,
    /// `∏(1 - conj(a_k) z) - (-1)^N conj(a_1⋯a_N) ∏(z - a_k)`, degree `d`.
    pub outer_poly_coeffs: Vec<Complex64>,
    /// `|c ∏(1 - conj(w_k) a_j) / ∏(1 - conj(a_k) a_j) - 1|` for each zero.
    pub consistency_residuals: Vec<f64>,
    /// Relative coefficient mismatch between the polynomial and its factorization.
    pub coefficient_residual: f64,
    /// Pointwise gap between the rational form and `(1 - conj(J(0)) J)^{2/p}`.
    pub identity_residual: f64,
    pub one_minus_jh: BoundarySamples,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalFbpSummary {
    #[serde(with = "crate::wire::complex_vec")]
    pub zeros: Vec<Complex64>,
    pub p: f64,
    pub c: f64,
    #[serde(with = "crate::wire::complex_vec")]
    pub w: Vec<Complex64>,
    pub d: usize,
    #[serde(with = "crate::wire::complex_vec")]
    pub outer_poly_coeffs: Vec<Complex64>,
    pub consistency_residuals: Vec<f64>,
    pub max_consistency_residual: f64,
    pub coefficient_residual: f64,
    pub identity_residual: f64,
    pub distance: f64,
    pub residual_norm: f64,
}

impl ExtremalFbpResult {
    pub fn max_consistency_residual(&self) -> f64 {
        self.consistency_residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn blaschke(&self) -> BlaschkeProduct {
        BlaschkeProduct::from_zeros(self.zeros.clone()).expect("zeros validated on construction")
    }

    pub fn summary(&self) -> ExtremalFbpSummary {
        let j0 = self.blaschke().at_zero();
        ExtremalFbpSummary {
            zeros: self.zeros.clone(),
            p: self.p,
            c: self.c,
            w: self.w.clone(),
            d: self.d,
            outer_poly_coeffs: self.outer_poly_coeffs.clone(),
            consistency_residuals: self.consistency_residuals.clone(),
            max_consistency_residual: self.max_consistency_residual(),
            coefficient_residual: self.coefficient_residual,
            identity_residual: self.identity_residual,
            distance: (1.0 - j0.norm_sqr()).powf(1.0 / self.p),
            residual_norm: lp_norm(&self.one_minus_jh, self.p),
        }
    }
}

/// Explicit extremal residual `1 - J h*` for `J = ∏ (z - a_k)/(1 - conj(a_k) z)`.
///
/// The polynomial `∏(1 - conj(a_k) z) - (-1)^N conj(∏ a_k) ∏(z - a_k)` loses
/// its degree-`N` term and factors as `c ∏_{k≤d} (1 - conj(w_k) z)`; its roots
/// are `1/conj(w_k)`. Repeated zeros are allowed: the coefficient identity is
/// checked alongside the pointwise conditions at each `a_j`.
pub fn finite_blaschke_extremal(zeros: &[Complex64], p: f64, grid: &Grid) -> Result<ExtremalFbpResult> {
    check_exponent(p)?;
    if zeros.is_empty() {
        return Err(Error::invalid("at least one zero is required"));
    }
    let blaschke = BlaschkeProduct::from_zeros(zeros.to_vec())?;
    let n = zeros.len();
    let prod_a = zeros.iter().fold(one(), |acc, a| acc * a);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let front = zeros.iter().fold(vec![one()], |acc, a| poly_mul(&acc, &[one(), -a.conj()]));
    let back = zeros.iter().fold(vec![one()], |acc, a| poly_mul(&acc, &[-a, one()]));
    let scale = sign * prod_a.conj();
    let mut poly: Vec<Complex64> = front.iter().zip(&back).map(|(f, b)| f - scale * b).collect();

    let magnitude = poly.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if poly[n].norm() > 1e-12 * magnitude {
        return Err(Error::InternalConsistency(format!(
            "leading term {} failed to cancel",
            poly[n]
        )));
    }
    // Anything at round-off level above the constant term is a cancelled term.
    while poly.len() > 1 && poly[poly.len() - 1].norm() <= 1e-13 * magnitude {
        poly.pop();
    }
    let d = poly.len() - 1;
    let c = 1.0 - prod_a.norm_sqr();
    if (poly[0] - c).norm() > 1e-12 {
        return Err(Error::InternalConsistency(format!(
            "constant term {} differs from 1 - |a_1⋯a_N|² = {c}",
            poly[0]
        )));
    }

    let roots = if d == 0 { Vec::new() } else { poly_roots(&poly)? };
    let mut w = Vec::with_capacity(d);
    for r in &roots {
        if r.norm() < 1.0 - 1e-12 || r.norm() == 0.0 {
            return Err(Error::OuternessViolation(format!(
                "root {r} of the outer polynomial lies inside the disk"
            )));
        }
        w.push(one() / r.conj());
    }

    let factored = w.iter().fold(vec![Complex64::new(c, 0.0)], |acc, wk| poly_mul(&acc, &[one(), -wk.conj()]));
    let coefficient_residual = poly
        .iter()
        .zip(&factored)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / magnitude;
    // Sanity of the root finder itself, independent of the factor form.
    let rebuilt = poly_from_roots(poly[d], &roots);
    let root_residual =
        poly.iter().zip(&rebuilt).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / magnitude;

    let consistency_residuals: Vec<f64> = zeros
        .iter()
        .map(|&aj| {
            let num = w.iter().fold(Complex64::new(c, 0.0), |acc, wk| acc * (one() - wk.conj() * aj));
            let den = zeros.iter().fold(one(), |acc, ak| acc * (one() - ak.conj() * aj));
            (num / den - one()).norm()
        })
        .collect();

    let nodes = grid.nodes();
    let ratio = BoundarySamples::new(
        grid.clone(),
        nodes
            .iter()
            .map(|&z| {
                let num = w.iter().fold(Complex64::new(c, 0.0), |acc, wk| acc * (one() - wk.conj() * z));
                let den = zeros.iter().fold(one(), |acc, ak| acc * (one() - ak.conj() * z));
                num / den
            })
            .collect(),
    )?;
    let one_minus_jh = fractional_power(&ratio, Complex64::new(c, 0.0), 2.0 / p)
        .map_err(|e| Error::InternalConsistency(format!("rational form left the right half-plane: {e}")))?;
    let j0 = blaschke.at_zero();
    let direct = BoundarySamples::new(
        grid.clone(),
        nodes.iter().map(|&z| one() - j0.conj() * blaschke.eval(z)).collect(),
    )?;
    let direct = fractional_power(&direct, Complex64::new(1.0 - j0.norm_sqr(), 0.0), 2.0 / p)?;
    let identity_residual = one_minus_jh
        .values()
        .iter()
        .zip(direct.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);

    let result = ExtremalFbpResult {
        zeros: zeros.to_vec(),
        p,
        c,
        w,
        d,
        outer_poly_coeffs: poly,
        consistency_residuals,
        coefficient_residual,
        identity_residual,
        one_minus_jh,
    };
    let worst = result
        .max_consistency_residual()
        .max(coefficient_residual)
        .max(identity_residual)
        .max(root_residual);
    if worst > CONSISTENCY_TOL {
        return Err(Error::InternalConsistency(format!(
            "extremal construction residual {worst:.3e} exceeds {CONSISTENCY_TOL:.0e}"
        )));
    }
    Ok(result)
}

/// `max_{0≤n≤m_max} |mean((1 - J h*)^{<p-1>} J ζ^n)|`, which vanishes for the
/// extremal residual.
pub fn spicyham_check(result: &ExtremalFbpResult, m_max: usize) -> Result<f64> {
    let grid = result.one_minus_jh.grid().clone();
    let j = FunctionSpec::from_blaschke(result.blaschke()).sample(&grid)?;
    let kernel = power_dual(&result.one_minus_jh, result.p - 1.0).mul(&j)?;
    Ok((0..=m_max as i64).map(|n| kernel.shift(n).mean().norm()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationRow {
    pub n: usize,
    pub j_at_zero_modulus: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub p: f64,
    pub rows: Vec<TruncationRow>,
    /// Distances decrease as `|J_n(0)|` increases across the rows.
    pub monotone: bool,
}

fn truncation_report(p: f64, rows: Vec<TruncationRow>) -> TruncationReport {
    let monotone = rows.iter().all(|a| {
        rows.iter().all(|b| !(a.j_at_zero_modulus < b.j_at_zero_modulus) || a.distance >= b.distance)
    });
    TruncationReport { p, rows, monotone }
}

/// Distances `(1 - |J_n(0)|²)^{1/p}` for the truncations `J_n` built from the
/// first `n` terms of `generator(1), generator(2), …`. `n = 0` is the trivial
/// product with distance 0.
pub fn truncation_distance_experiment(
    generator: impl Fn(usize) -> Complex64,
    p: f64,
    n_list: &[usize],
) -> Result<TruncationReport> {
    check_exponent(p)?;
    let rows = n_list
        .iter()
        .map(|&n| {
            let b = truncate_blaschke((1..=n).map(&generator), n)?;
            let m = b.at_zero().norm();
            let distance = if n == 0 { 0.0 } else { (1.0 - m * m).powf(1.0 / p) };
            Ok(TruncationRow { n, j_at_zero_modulus: m, distance })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(truncation_report(p, rows))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultipleZeroFamily {
    pub p: f64,
    /// `|B_n(0)| = (1 - 1/n)^n` for the `n`-fold zero at `1 - 1/n`.
    pub rows: Vec<TruncationRow>,
    /// Whether `|B_n(0)|` strictly decreases along the rows. It does not:
    /// `(1 - 1/n)^n` increases towards `e^{-1}`.
    pub decreasing_at_origin: bool,
    /// `e^{-1}`, the value at the origin of the pointwise limit.
    pub limit_at_origin: f64,
}

/// The products with an `n`-fold zero at `1 - 1/n`, which converge pointwise
/// to the atom of mass 1 at `z = 1`.
pub fn multiple_zero_family(p: f64, n_list: &[usize]) -> Result<MultipleZeroFamily> {
    check_exponent(p)?;
    let rows = n_list
        .iter()
        .map(|&n| {
            if n < 2 {
                return Err(Error::invalid("the family starts at n = 2"));
            }
            let a = Complex64::new(1.0 - 1.0 / n as f64, 0.0);
            let b = BlaschkeProduct::from_zeros(vec![a; n])?;
            let m = b.at_zero().norm();
            Ok(TruncationRow { n, j_at_zero_modulus: m, distance: (1.0 - m * m).powf(1.0 / p) })
        })
        .collect::<Result<Vec<_>>>()?;
    let decreasing_at_origin = rows.windows(2).all(|w| w[1].j_at_zero_modulus < w[0].j_at_zero_modulus);
    Ok(MultipleZeroFamily { p, rows, decreasing_at_origin, limit_at_origin: (-1.0f64).exp() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn distance_examples() {
        let b = FunctionSpec::blaschke(vec![c(0.5)]).unwrap();
        assert!((distance_formula(&b, 2.0).unwrap() - 0.75f64.sqrt()).abs() < 1e-15);
        let outer = FunctionSpec::polynomial(vec![c(1.0), c(0.5)]).unwrap();
        assert_eq!(distance_formula(&outer, 3.0).unwrap(), 0.0);
        let double = FunctionSpec::blaschke(vec![c(0.5), c(0.5)]).unwrap();
        assert!((distance_formula(&double, 4.0).unwrap() - (15.0f64 / 16.0).powf(0.25)).abs() < 1e-15);
        let atom = FunctionSpec::atom(1.0, c(1.0)).unwrap();
        assert!((distance_formula(&atom, 3.0).unwrap() - (1.0 - (-2.0f64).exp()).powf(1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn hilbert_projection_is_linear() {
        let grid = make_grid(1024).unwrap();
        let b = FunctionSpec::blaschke(vec![c(0.5)]).unwrap();
        let r = project_one(&b, 2.0, &grid).unwrap();
        let j = b.sample(&grid).unwrap();
        let j0 = b.inner_at_zero();
        for (g, v) in r.gstar.values().iter().zip(j.values()) {
            assert!((g - j0.conj() * v).norm() < 1e-12);
        }
        assert!(r.verified);
    }

    #[test]
    fn single_factor_residual_closed_form() {
        let grid = make_grid(1024).unwrap();
        let a = Complex64::new(0.3, 0.4);
        let p = 3.0;
        let r = project_one(&FunctionSpec::blaschke(vec![a]).unwrap(), p, &grid).unwrap();
        for (v, &z) in r.residual.values().iter().zip(grid.nodes()) {
            let expected = ((1.0 - a.norm_sqr()) / (1.0 - a.conj() * z)).powf(2.0 / p);
            assert!((v - expected).norm() < 1e-12);
        }
        assert!(r.verified, "{:?}", r.summary());
    }

    #[test]
    fn double_zero_extremal() {
        let grid = make_grid(2048).unwrap();
        let r = finite_blaschke_extremal(&[c(0.5), c(0.5)], 3.0, &grid).unwrap();
        assert!((r.c - 15.0 / 16.0).abs() < 1e-15);
        assert_eq!(r.d, 1);
        assert!((r.w[0] - c(0.8)).norm() < 1e-12);
        assert!((r.outer_poly_coeffs[1] - c(-0.75)).norm() < 1e-15);
        assert!(r.max_consistency_residual() < 1e-12);
        assert!(spicyham_check(&r, 20).unwrap() < 1e-9);
    }

    #[test]
    fn symmetric_zeros_cancel_to_a_constant() {
        let grid = make_grid(512).unwrap();
        let r = finite_blaschke_extremal(&[c(0.5), c(-0.5)], 2.0, &grid).unwrap();
        assert_eq!(r.d, 0);
        assert!(r.w.is_empty());
        assert!((r.c - 15.0 / 16.0).abs() < 1e-15);
        assert!(r.max_consistency_residual() < 1e-12);
    }

    #[test]
    fn single_zero_extremal_has_no_parameters() {
        let grid = make_grid(512).unwrap();
        let r = finite_blaschke_extremal(&[c(0.5)], 2.0, &grid).unwrap();
        assert_eq!((r.d, r.w.len()), (0, 0));
        assert!(spicyham_check(&r, 20).unwrap() < 1e-10);
        assert!(finite_blaschke_extremal(&[], 2.0, &grid).is_err());
        assert!(finite_blaschke_extremal(&[c(0.0)], 2.0, &grid).is_err());
    }

    #[test]
    fn truncations_and_multiple_zero_family() {
        let rep = truncation_distance_experiment(|k| c(1.0 - 0.5f64.powi(k as i32)), 2.0, &[0, 1, 2, 3, 5, 10]).unwrap();
        assert_eq!(rep.rows[0].distance, 0.0);
        assert!(rep.rows.windows(2).skip(1).all(|w| w[1].j_at_zero_modulus < w[0].j_at_zero_modulus));
        assert!(rep.rows.windows(2).all(|w| w[1].distance > w[0].distance));
        assert!(rep.monotone);

        let fam = multiple_zero_family(2.0, &[2, 3, 4, 8]).unwrap();
        assert!((fam.rows[0].j_at_zero_modulus - 0.25).abs() < 1e-15);
        assert!(!fam.decreasing_at_origin);
    }
}
