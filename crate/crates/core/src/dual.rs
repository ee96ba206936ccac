//! The dual extremal problem for a finite Blaschke product `J`.
//!
//! The functional `L(g) = mean(ζ g(ζ) conj(J(ζ)))` has norm
//! `(1 - |J(0)|²)^{1/p}` on the unit ball of `H^q`, `1/p + 1/q = 1`. The
//! supremum is estimated over polynomials of a fixed degree `m` by solving the
//! equivalent convex problem `min ‖g‖_q` subject to `L(g) = 1`; the estimate
//! `1 / min` approaches the exact value from below.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_exponent, Error, Result};
use crate::function::{horner, BlaschkeProduct, FunctionSpec};
use crate::grid::{cauchy_functional, lp_norm, BoundarySamples, Grid};
use crate::objective::{minimize, LpResidualObjective};
use crate::opa::SolverOptions;

/// Default polynomial degree of the maximizer ansatz.
pub const DEFAULT_SEARCH_DEGREE: usize = 24;

const DISTINCT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualProblem {
    #[serde(with = "crate::wire::complex_vec")]
    zeros: Vec<Complex64>,
    q: f64,
    search_degree: usize,
    distinct: bool,
}

fn pairwise_distinct(zeros: &[Complex64]) -> bool {
    zeros
        .iter()
        .enumerate()
        .all(|(i, a)| zeros[i + 1..].iter().all(|b| (a - b).norm() > DISTINCT_TOL))
}

impl DualProblem {
    /// Zeros must be pairwise distinct points of the punctured disk.
    pub fn new(zeros: Vec<Complex64>, q: f64, search_degree: usize) -> Result<Self> {
        let prob = Self::contour_only(zeros, q, search_degree)?;
        if !prob.distinct {
            return Err(Error::invalid("zeros must be pairwise distinct"));
        }
        Ok(prob)
    }

    /// Like [`DualProblem::new`] but allows repeated zeros; only the contour
    /// form of the functional is then available.
    pub fn contour_only(zeros: Vec<Complex64>, q: f64, search_degree: usize) -> Result<Self> {
        check_exponent(q)?;
        if zeros.is_empty() {
            return Err(Error::invalid("at least one zero is required"));
        }
        BlaschkeProduct::from_zeros(zeros.clone())?;
        if search_degree < zeros.len() {
            return Err(Error::invalid(format!(
                "search degree {search_degree} is below the number of zeros {}",
                zeros.len()
            )));
        }
        let distinct = pairwise_distinct(&zeros);
        Ok(DualProblem { zeros, q, search_degree, distinct })
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Conjugate exponent `p = q / (q - 1)`.
    pub fn p(&self) -> f64 {
        self.q / (self.q - 1.0)
    }

    pub fn search_degree(&self) -> usize {
        self.search_degree
    }

    pub fn blaschke(&self) -> BlaschkeProduct {
        BlaschkeProduct::from_zeros(self.zeros.clone()).expect("validated zeros")
    }

    /// `(1 - |J(0)|²)^{1/p}`.
    pub fn exact_value(&self) -> f64 {
        (1.0 - self.blaschke().at_zero().norm_sqr()).powf(1.0 / self.p())
    }

    /// `conj(J)` sampled on the grid.
    pub fn kernel(&self, grid: &Grid) -> BoundarySamples {
        let b = self.blaschke();
        BoundarySamples::from_fn(grid, |z| b.eval(z).conj())
    }

    /// `L(g)` by quadrature.
    pub fn functional(&self, g: &BoundarySamples) -> Result<Complex64> {
        cauchy_functional(g, &self.kernel(g.grid()))
    }
}

/// `Σ_j g(a_j) ∏_k (1 - conj(a_k) a_j) / ∏_{k≠j} (a_k - a_j)`.
///
/// This agrees with the contour integral `L(g)` up to the sign `(-1)^{N-1}`.
pub fn residue_sum(prob: &DualProblem, g: &FunctionSpec) -> Result<Complex64> {
    if !prob.distinct {
        return Err(Error::invalid("residue form needs pairwise distinct zeros"));
    }
    let a = &prob.zeros;
    let mut total = Complex64::new(0.0, 0.0);
    for (j, &aj) in a.iter().enumerate() {
        let num = a.iter().fold(Complex64::new(1.0, 0.0), |acc, ak| acc * (1.0 - ak.conj() * aj));
        let den = a
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .fold(Complex64::new(1.0, 0.0), |acc, (_, &ak)| acc * (ak - aj));
        total += g.eval(aj)? * num / den;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualResult {
    /// Lower estimate of the supremum.
    pub value: f64,
    /// Coefficients of a maximizer with `‖g‖_q = 1`, phase chosen so `L(g) > 0`.
    #[serde(with = "crate::wire::complex_vec")]
    pub maximizer: Vec<Complex64>,
    /// `(1 - |J(0)|²)^{1/p}`.
    pub exact: f64,
    /// `exact - value`; nonnegative up to quadrature error.
    pub gap: f64,
    pub certificate: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Supremum of `|L(g)|` over polynomials of degree `m` with `‖g‖_q ≤ 1`.
pub fn dual_sup(prob: &DualProblem, opts: &SolverOptions) -> Result<DualResult> {
    dual_sup_from(prob, opts, None)
}

/// [`dual_sup`] started from the polynomial `start` (any nonzero multiple of
/// a candidate; it is rescaled onto the constraint `L(g) = 1`).
pub fn dual_sup_from(prob: &DualProblem, opts: &SolverOptions, start: Option<&[Complex64]>) -> Result<DualResult> {
    let grid = opts.grid()?;
    let m = prob.search_degree;
    if 2 * m >= grid.size() {
        return Err(Error::invalid(format!("search degree {m} is too large for the grid")));
    }
    let kernel = prob.kernel(&grid);
    let monomials: Vec<BoundarySamples> = (0..=m as i64).map(|k| BoundarySamples::monomial(&grid, k)).collect();
    let ell: Vec<Complex64> =
        monomials.iter().map(|zk| cauchy_functional(zk, &kernel)).collect::<Result<_>>()?;
    let pivot = (0..=m)
        .max_by(|&i, &j| ell[i].norm().total_cmp(&ell[j].norm()))
        .expect("nonempty");
    if ell[pivot].norm() == 0.0 {
        return Err(Error::InternalConsistency("functional vanishes on every monomial".into()));
    }
    let free: Vec<usize> = (0..=m).filter(|&k| k != pivot).collect();
    // g = z^pivot / ℓ_pivot + Σ_{k≠pivot} c_k (z^k - (ℓ_k/ℓ_pivot) z^pivot)
    let target: Vec<Complex64> = monomials[pivot].values().iter().map(|v| v / ell[pivot]).collect();
    let basis: Vec<Vec<Complex64>> = free
        .iter()
        .map(|&k| {
            let ratio = ell[k] / ell[pivot];
            monomials[k]
                .values()
                .iter()
                .zip(monomials[pivot].values())
                .map(|(zk, zp)| -(zk - ratio * zp))
                .collect()
        })
        .collect();
    let obj = LpResidualObjective::new(target, basis, prob.q);
    let x0: Vec<Complex64> = match start {
        Some(s) => {
            let mut padded: Vec<Complex64> = s.iter().copied().take(m + 1).collect();
            padded.resize(m + 1, Complex64::new(0.0, 0.0));
            let l: Complex64 = padded.iter().zip(&ell).map(|(c, l)| c * l).sum();
            if l.norm() == 0.0 {
                return Err(Error::invalid("starting polynomial is annihilated by the functional"));
            }
            free.iter().map(|&k| padded[k] / l).collect()
        }
        None => vec![Complex64::new(0.0, 0.0); free.len()],
    };
    let sol = minimize(&obj, &x0, &opts.smoothing, opts.tol, opts.max_iter, &opts.line_search);

    let mut coeffs = vec![Complex64::new(0.0, 0.0); m + 1];
    coeffs[pivot] = Complex64::new(1.0, 0.0) / ell[pivot];
    for (&k, &c) in free.iter().zip(&sol.coeffs) {
        coeffs[k] = c;
        coeffs[pivot] -= c * ell[k] / ell[pivot];
    }
    let g = BoundarySamples::from_fn(&grid, |z| horner(&coeffs, z));
    let norm = lp_norm(&g, prob.q);
    let value = 1.0 / norm;
    let maximizer: Vec<Complex64> = coeffs.iter().map(|c| c / norm).collect();
    let exact = prob.exact_value();
    Ok(DualResult {
        value,
        maximizer,
        exact,
        gap: exact - value,
        certificate: sol.certificate,
        iterations: sol.iterations,
        converged: sol.converged,
    })
}

/// `(1 - |a|²)^{1/q} (1 - conj(a) z)^{-2/q}`, the unit-norm maximizer for a single zero `a`.
pub fn single_zero_extremal(a: Complex64, q: f64, grid: &Grid) -> Result<BoundarySamples> {
    check_exponent(q)?;
    BlaschkeProduct::from_zeros(vec![a])?;
    let s = (1.0 - a.norm_sqr()).powf(1.0 / q);
    Ok(BoundarySamples::from_fn(grid, |z| s * (1.0 - a.conj() * z).powf(-2.0 / q)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrictInequality {
    /// Dual estimate for the first zero set.
    pub lhs: f64,
    /// Dual estimate for the union.
    pub rhs: f64,
    pub margin: f64,
    pub margin_min: f64,
    pub exact_lhs: f64,
    pub exact_rhs: f64,
    /// `|J₁(0)|² (1 - |J₂(0)|²)`, which is positive for non-constant `J₂`.
    pub exact_margin: f64,
    pub holds: bool,
}

/// Compares the dual suprema for `J₁` and `J₁ J₂`. The union may repeat zeros.
pub fn verify_strict_inequality(
    zeros1: &[Complex64],
    zeros2: &[Complex64],
    q: f64,
    search_degree: usize,
    opts: &SolverOptions,
) -> Result<StrictInequality> {
    if zeros2.is_empty() {
        return Err(Error::invalid("second zero set is empty"));
    }
    let mut union = zeros1.to_vec();
    union.extend_from_slice(zeros2);
    let degree = search_degree.max(union.len());
    let first = DualProblem::contour_only(zeros1.to_vec(), q, degree)?;
    let both = DualProblem::contour_only(union, q, degree)?;
    let lhs = dual_sup(&first, opts)?;
    let rhs = dual_sup(&both, opts)?;
    let j1 = first.blaschke().at_zero().norm_sqr();
    let j2 = BlaschkeProduct::from_zeros(zeros2.to_vec())?.at_zero().norm_sqr();
    let margin_min = 10.0 * opts.tol;
    let margin = rhs.value - lhs.value;
    Ok(StrictInequality {
        lhs: lhs.value,
        rhs: rhs.value,
        margin,
        margin_min,
        exact_lhs: lhs.exact,
        exact_rhs: rhs.exact,
        exact_margin: j1 * (1.0 - j2),
        holds: margin > margin_min,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoFactorGap {
    /// `(1 - |a|²)^{1/p}`.
    pub lhs: f64,
    /// Dual estimate of the two-zero supremum.
    pub rhs_estimate: f64,
    /// `(1 - |ab|²)^{1/p}`.
    pub rhs_exact: f64,
    /// The explicit two-term residue expression at the maximizer.
    pub residue_form: f64,
    pub gap: f64,
    pub holds: bool,
}

/// The strict gap between the one-zero and two-zero dual values.
pub fn two_factor_gap(
    a: Complex64,
    b: Complex64,
    q: f64,
    search_degree: usize,
    opts: &SolverOptions,
) -> Result<TwoFactorGap> {
    if (a - b).norm() <= DISTINCT_TOL {
        return Err(Error::invalid("the two zeros must differ"));
    }
    let prob = DualProblem::new(vec![a, b], q, search_degree)?;
    let lhs = (1.0 - a.norm_sqr()).powf(1.0 / prob.p());
    let est = dual_sup(&prob, opts)?;
    let g = FunctionSpec::polynomial(est.maximizer.clone())?;
    let (ga, gb) = (g.eval(a)?, g.eval(b)?);
    let residue_form = (ga * (1.0 - a.norm_sqr()) * (1.0 - b.conj() * a) / (b - a)
        - gb * (1.0 - b.norm_sqr()) * (1.0 - a.conj() * b) / (b - a))
        .norm();
    Ok(TwoFactorGap {
        lhs,
        rhs_estimate: est.value,
        rhs_exact: est.exact,
        residue_form,
        gap: est.value - lhs,
        holds: est.value > lhs,
    })
}
