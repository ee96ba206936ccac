//! Polynomial roots and the lower bounds on OPA zeros.
//!
//! Roots come from the eigenvalues of a balanced companion matrix, each
//! polished by one Newton step. The bound checks compare the product of the
//! OPA's zeros inside the disk with the quantities that keep those zeros away
//! from the origin.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_exponent, Error, Result};
use crate::function::{horner, trim_trailing, FunctionSpec};
use crate::grid::{lp_norm, BoundarySamples, Grid};
use crate::opa::{solve_opa_from, OpaResult, SolverOptions};
use crate::orthogonality::PythagoreanParams;

/// Roots with `|w| < 1 - IN_DISK_MARGIN` count as inside the open disk.
pub const IN_DISK_MARGIN: f64 = 1e-12;

/// Numerical slack allowed when a bound is an equality in exact arithmetic.
pub const BOUND_SLACK: f64 = 1e-9;

const POLISH_STEPS: usize = 8;

/// All complex roots of `Σ coeffs[k] z^k`, repeated by multiplicity.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let trimmed = trim_trailing(coeffs);
    if trimmed.is_empty() {
        return Err(Error::invalid("zero polynomial has no roots"));
    }
    let degree = trimmed.len() - 1;
    if degree == 0 {
        return Err(Error::invalid("constant polynomial has no roots"));
    }
    if trimmed.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid("polynomial has non-finite coefficients"));
    }
    let lead = trimmed[degree];
    let raw = if degree == 1 {
        vec![-trimmed[0] / lead]
    } else {
        companion_eigenvalues(trimmed)?
    };
    Ok(raw.into_iter().map(|z| newton_polish(trimmed, z)).collect())
}

fn companion_eigenvalues(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -coeffs[i] / lead;
    }
    balance(&mut m);
    let schur = Schur::try_new(m, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NonConvergence("companion Schur iteration did not converge".into()))?;
    let eig = schur
        .eigenvalues()
        .ok_or_else(|| Error::NonConvergence("companion Schur form is not triangular".into()))?;
    Ok(eig.iter().copied().collect())
}

/// Parlett–Reinsch diagonal balancing with powers of two.
fn balance(m: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    let radix = 2.0f64;
    let sq = radix * radix;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].l1_norm();
                    r += m[(i, j)].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= sq;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= sq;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect()
}

/// Newton steps on the undeflated polynomial, kept only while `|p|` shrinks.
fn newton_polish(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let d = derivative(coeffs);
    let mut z = z;
    let mut pz = horner(coeffs, z).norm();
    for _ in 0..POLISH_STEPS {
        let dz = horner(&d, z);
        if dz.norm() == 0.0 || !dz.is_finite() {
            break;
        }
        let candidate = z - horner(coeffs, z) / dz;
        let pc = horner(coeffs, candidate).norm();
        if !(pc < pz) {
            break;
        }
        z = candidate;
        pz = pc;
    }
    z
}

/// Coefficients of `lead · ∏ (z - r)`.
pub fn poly_from_roots(lead: Complex64, roots: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![lead];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); out.len() + 1];
        for (k, &c) in out.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * r;
        }
        out = next;
    }
    out
}

/// `max |reconstructed - input| / max |input|`.
///
/// The coefficients of `lead · ∏ (z - r)` are rebuilt by sampling the product
/// at the `d + 1` roots of unity and inverting the DFT. Expanding the product
/// directly cancels intermediate coefficients of size up to `C(d, d/2)` when
/// the roots crowd the unit circle, which swamps the root error itself.
pub fn reconstruction_residual(coeffs: &[Complex64], roots: &[Complex64]) -> f64 {
    let trimmed = trim_trailing(coeffs);
    let lead = trimmed[trimmed.len() - 1];
    let m = roots.len().max(trimmed.len() - 1) + 1;
    let nodes: Vec<Complex64> = (0..m).map(|j| Complex64::from_polar(1.0, TAU * j as f64 / m as f64)).collect();
    let values: Vec<Complex64> = nodes.iter().map(|&w| roots.iter().fold(lead, |acc, &r| acc * (w - r))).collect();
    let scale = trimmed.iter().map(|c| c.norm()).fold(0.0, f64::max);
    (0..m)
        .map(|k| {
            let rebuilt = values
                .iter()
                .enumerate()
                .fold(Complex64::new(0.0, 0.0), |acc, (j, &v)| acc + v * nodes[(j * k) % m].conj())
                / m as f64;
            (trimmed.get(k).copied().unwrap_or_default() - rebuilt).norm()
        })
        .fold(0.0, f64::max)
        / scale
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    /// Left side of `lhs ≥ rhs`.
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub satisfied: bool,
}

impl BoundCheck {
    fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        let slack = lhs - rhs;
        BoundCheck { name: name.to_string(), lhs, rhs, slack, satisfied: slack >= -BOUND_SLACK }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootReport {
    #[serde(with = "crate::wire::complex_vec")]
    pub roots: Vec<Complex64>,
    #[serde(with = "crate::wire::complex_vec")]
    pub in_disk: Vec<Complex64>,
    /// Roots within [`IN_DISK_MARGIN`] of the unit circle; excluded from bounds.
    #[serde(with = "crate::wire::complex_vec")]
    pub boundary_ambiguous: Vec<Complex64>,
    /// `|w_1 ⋯ w_k|` over the in-disk roots, 1 when there are none.
    pub product_modulus: f64,
    pub reconstruction_residual: f64,
    pub bounds: Vec<BoundCheck>,
}

impl RootReport {
    /// Classifies the roots of a polynomial; constant polynomials have none.
    pub fn from_coefficients(coeffs: &[Complex64]) -> Result<Self> {
        let trimmed = trim_trailing(coeffs);
        let roots = if trimmed.len() <= 1 { Vec::new() } else { poly_roots(trimmed)? };
        let reconstruction = if roots.is_empty() { 0.0 } else { reconstruction_residual(trimmed, &roots) };
        let in_disk: Vec<Complex64> =
            roots.iter().copied().filter(|w| w.norm() < 1.0 - IN_DISK_MARGIN).collect();
        let boundary_ambiguous = roots
            .iter()
            .copied()
            .filter(|w| (w.norm() - 1.0).abs() <= IN_DISK_MARGIN)
            .collect();
        let product_modulus = in_disk.iter().map(|w| w.norm()).product();
        Ok(RootReport {
            roots,
            in_disk,
            boundary_ambiguous,
            product_modulus,
            reconstruction_residual: reconstruction,
            bounds: Vec::new(),
        })
    }

    pub fn min_in_disk_modulus(&self) -> Option<f64> {
        self.in_disk.iter().map(|w| w.norm()).min_by(f64::total_cmp)
    }

    pub fn all_satisfied(&self) -> bool {
        self.bounds.iter().all(|b| b.satisfied)
    }
}

fn inner_modulus_at_zero(f: &FunctionSpec) -> Result<f64> {
    let j0 = f.inner_at_zero().norm();
    if j0 == 0.0 {
        return Err(Error::invalid("inner factor vanishes at the origin"));
    }
    Ok(j0)
}

/// `|w_1 ⋯ w_k| ≥ (1 - ‖1 - q f‖_p^p)^{1/2} / |J(0)|` for the in-disk roots of `q`.
pub fn check_product_bound(f: &FunctionSpec, opa: &OpaResult, p: f64) -> Result<BoundCheck> {
    check_exponent(p)?;
    let j0 = inner_modulus_at_zero(f)?;
    let report = RootReport::from_coefficients(&opa.coefficients)?;
    let rhs = (1.0 - opa.error.powf(p)).max(0.0).sqrt() / j0;
    Ok(BoundCheck::new("product", report.product_modulus, rhs))
}

/// Every in-disk root has modulus at least `(1 - ‖1 - q f‖_p^p)^{1/2}`.
pub fn check_centner_bound(opa: &OpaResult, p: f64) -> Result<BoundCheck> {
    check_exponent(p)?;
    let report = RootReport::from_coefficients(&opa.coefficients)?;
    let radius = (1.0 - opa.error.powf(p)).max(0.0).sqrt();
    // Vacuous without in-disk roots: compare the radius with itself.
    let lhs = report.min_in_disk_modulus().unwrap_or(radius.max(1.0));
    Ok(BoundCheck::new("centner", lhs, radius))
}

/// Lower bound on `|w_1 ⋯ w_k|` for `1 < p < 2`:
/// `(1 - [1 - |f(0)|²/‖f‖₂²]^{p/2})^{1/2} / |J(0)|`.
pub fn bound_p_less_2(f: &FunctionSpec, p: f64, grid: &Grid) -> Result<f64> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::invalid(format!("bound needs 1 < p < 2, got {p}")));
    }
    let f0 = f.value_at_zero();
    if f0.norm() == 0.0 {
        return Err(Error::invalid("f(0) = 0"));
    }
    let j0 = inner_modulus_at_zero(f)?;
    let h2 = lp_norm(&f.sample(grid)?, 2.0);
    let gap = (1.0 - f0.norm_sqr() / (h2 * h2)).max(0.0);
    Ok((1.0 - gap.powf(p / 2.0)).max(0.0).sqrt() / j0)
}

/// Lower bound on `|w_1 ⋯ w_k|` for `p > 2`, built from the degree-zero
/// estimate with `A = (p-1)‖f - f(0)‖_p² / |f(0)|²`.
pub fn bound_p_greater_2(f: &FunctionSpec, p: f64, grid: &Grid) -> Result<f64> {
    if !(p > 2.0 && p.is_finite()) {
        return Err(Error::invalid(format!("bound needs p > 2, got {p}")));
    }
    let f0 = f.value_at_zero();
    if f0.norm() == 0.0 {
        return Err(Error::invalid("f(0) = 0"));
    }
    let j0 = inner_modulus_at_zero(f)?;
    let tail = lp_norm(&f.sample(grid)?.map(|v| v - f0), p);
    let t = (p - 1.0) * tail * tail;
    let ratio = t / (f0.norm_sqr() + t);
    Ok((1.0 - ratio.powf(p / 2.0)).max(0.0).sqrt() / j0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeZeroBound {
    pub r: f64,
    pub k: f64,
    /// `K ‖(f - f(0)) / (z f(0))‖_p^r`; `None` when `f(0) = 0`.
    pub a: Option<f64>,
    /// Upper bound on `‖1 - q_0 f‖_p^r`; `None` in the degenerate case `f(0) = 0`.
    pub bound_on_error_to_the_r: Option<f64>,
    /// True when `f(0) = 0`: then `q_0 = 0` and the error is exactly 1.
    pub degenerate: bool,
}

/// Upper bound on the degree-zero OPA error from the upper Pythagorean
/// inequality: `A^{r/(r-1)}/(1 + A^{1/(r-1)})^r + A/(1 + A^{1/(r-1)})^r`.
pub fn lemma_0opa_bound(f: &FunctionSpec, p: f64, grid: &Grid) -> Result<DegreeZeroBound> {
    let params = PythagoreanParams::upper(p)?;
    let (r, k) = (params.r, params.k);
    let f0 = f.value_at_zero();
    if f0.norm() == 0.0 {
        return Ok(DegreeZeroBound { r, k, a: None, bound_on_error_to_the_r: None, degenerate: true });
    }
    let samples = f.sample(grid)?;
    let quotient = BoundarySamples::new(
        grid.clone(),
        samples
            .values()
            .iter()
            .zip(grid.nodes())
            .map(|(&v, &z)| (v - f0) / (z * f0))
            .collect(),
    )?;
    let a = k * lp_norm(&quotient, p).powf(r);
    let b = a.powf(1.0 / (r - 1.0));
    let denom = (1.0 + b).powf(r);
    let bound = a.powf(r / (r - 1.0)) / denom + a / denom;
    Ok(DegreeZeroBound { r, k, a: Some(a), bound_on_error_to_the_r: Some(bound), degenerate: false })
}

/// Fills in every applicable bound for an OPA of `f` at exponent `p`.
pub fn root_report(f: &FunctionSpec, opa: &OpaResult, p: f64, grid: &Grid) -> Result<RootReport> {
    let mut report = RootReport::from_coefficients(&opa.coefficients)?;
    report.bounds.push(check_product_bound(f, opa, p)?);
    report.bounds.push(check_centner_bound(opa, p)?);
    if p < 2.0 {
        report.bounds.push(BoundCheck::new("p_less_2", report.product_modulus, bound_p_less_2(f, p, grid)?));
    } else if p > 2.0 {
        report
            .bounds
            .push(BoundCheck::new("p_greater_2", report.product_modulus, bound_p_greater_2(f, p, grid)?));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeStep {
    pub degree: usize,
    /// Smallest in-disk root modulus; `None` when no root lies in the disk.
    pub min_in_disk_modulus: Option<f64>,
    pub in_disk_count: usize,
    pub certificate: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeRadius {
    pub radius: f64,
    /// First degree from which no computed OPA has a root of modulus `≤ radius`;
    /// `None` means "not yet escaped" within the computed range.
    pub escaped_from: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub n: usize,
    pub p: f64,
    pub root_re: f64,
    pub root_im: f64,
    pub modulus: f64,
    pub in_disk: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeReport {
    pub p: f64,
    pub steps: Vec<EscapeStep>,
    pub radii: Vec<EscapeRadius>,
    pub trajectory: Vec<TrajectoryRow>,
}

/// Tracks the OPA roots for degrees `1..=n_max`. Trends are reported, not
/// asserted: escape from compact sets is only eventual.
pub fn escape_tracker(
    f: &FunctionSpec,
    p: f64,
    n_max: usize,
    radii: &[f64],
    opts: &SolverOptions,
) -> Result<EscapeReport> {
    let mut steps = Vec::new();
    let mut trajectory = Vec::new();
    let mut previous: Option<Vec<Complex64>> = None;
    for n in 1..=n_max {
        let opa = solve_opa_from(f, n, p, opts, previous.as_deref())?;
        let report = RootReport::from_coefficients(&opa.coefficients)?;
        for w in &report.roots {
            trajectory.push(TrajectoryRow {
                n,
                p,
                root_re: w.re,
                root_im: w.im,
                modulus: w.norm(),
                in_disk: w.norm() < 1.0 - IN_DISK_MARGIN,
            });
        }
        steps.push(EscapeStep {
            degree: n,
            min_in_disk_modulus: report.min_in_disk_modulus(),
            in_disk_count: report.in_disk.len(),
            certificate: opa.certificate,
            converged: opa.converged,
        });
        previous = Some(opa.coefficients);
    }
    let radii = radii
        .iter()
        .map(|&radius| {
            let last_hit = steps
                .iter()
                .rev()
                .find(|s| s.min_in_disk_modulus.is_some_and(|m| m <= radius))
                .map(|s| s.degree);
            let escaped_from = match last_hit {
                None => steps.first().map(|s| s.degree),
                Some(d) if d < n_max => Some(d + 1),
                Some(_) => None,
            };
            EscapeRadius { radius, escaped_from }
        })
        .collect();
    Ok(EscapeReport { p, steps, radii, trajectory })
}

/// Writes trajectory rows as CSV with columns `n,p,root_re,root_im,modulus,in_disk`.
pub fn write_trajectory_csv<W: std::io::Write>(rows: &[TrajectoryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::invalid(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| Error::invalid(format!("csv: {e}")))?;
    Ok(())
}
