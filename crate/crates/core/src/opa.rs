//! Optimal polynomial approximants: the degree-`n` polynomial `q` minimizing
//! `‖1 - q f‖_p` over the quadrature grid.
//!
//! At `p = 2` this is a Hermitian Toeplitz system. Elsewhere the convex
//! objective is minimized by [`crate::objective::minimize`], started from the
//! `p = 2` solution, and stopped on the Birkhoff–James certificate.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_exponent, Error, Result};
use crate::function::FunctionSpec;
use crate::grid::{default_grid_size, fourier_coefficient, lp_norm, make_grid, BoundarySamples, Grid};
use crate::objective::{minimize, LineSearch, LpResidualObjective, DEFAULT_SMOOTHING};

/// Gram matrices with a larger eigenvalue ratio get a warning.
pub const CONDITION_WARNING: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub grid_size: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Continuation schedule for `p < 2`; strictly decreasing, ending at 0.
    pub smoothing: Vec<f64>,
    pub line_search: LineSearch,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grid_size: default_grid_size(),
            tol: 1e-10,
            max_iter: 500,
            smoothing: DEFAULT_SMOOTHING.to_vec(),
            line_search: LineSearch::default(),
        }
    }
}

impl SolverOptions {
    pub fn with_grid(mut self, n: usize) -> Self {
        self.grid_size = n;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::invalid(format!("tolerance {} must be positive", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be positive"));
        }
        let s = &self.smoothing;
        if s.last() != Some(&0.0)
            || s.windows(2).any(|w| !(w[0] > w[1]))
            || s.iter().any(|e| !(*e >= 0.0 && e.is_finite()))
        {
            return Err(Error::invalid("smoothing schedule must decrease strictly to 0"));
        }
        if !(self.line_search.c1 > 0.0 && self.line_search.c1 < 1.0) {
            return Err(Error::invalid("Armijo constant must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        self.validate()?;
        make_grid(self.grid_size)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpaResult {
    pub degree: usize,
    pub p: f64,
    #[serde(with = "crate::wire::complex_vec")]
    pub coefficients: Vec<Complex64>,
    /// Achieved `‖1 - q f‖_p`.
    pub error: f64,
    /// `max_k |mean(|1-qf|^{p-2} conj(1-qf) z^k f)|` over `k = 0..=n`.
    pub certificate: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// The convex objective `mean |1 - Σ c_k z^k f|^p` with basis `z^k f`, `k = 0..=n`.
pub fn opa_objective(f: &FunctionSpec, n: usize, p: f64, grid: &Grid) -> Result<LpResidualObjective> {
    check_exponent(p)?;
    let samples = f.sample(grid)?;
    Ok(objective_from_samples(&samples, n, p))
}

fn objective_from_samples(samples: &BoundarySamples, n: usize, p: f64) -> LpResidualObjective {
    let basis = (0..=n as i64).map(|k| samples.shift(k).into_values()).collect();
    LpResidualObjective::new(vec![Complex64::new(1.0, 0.0); samples.len()], basis, p)
}

fn check_degree(n: usize, grid: &Grid) -> Result<()> {
    if 2 * n >= grid.size() {
        return Err(Error::invalid(format!("degree {n} is too large for a {}-node grid", grid.size())));
    }
    Ok(())
}

/// Solves the `p = 2` normal equations `G c = b` with `G_{jk} = (|f|²)^(j-k)`
/// and `b_j = mean(conj(z^j f))`.
pub fn solve_opa_p2(f: &FunctionSpec, n: usize, grid: &Grid) -> Result<OpaResult> {
    check_degree(n, grid)?;
    let samples = f.sample(grid)?;
    if samples.max_abs() == 0.0 {
        return Err(Error::invalid("f vanishes identically"));
    }
    let (coefficients, warnings) = normal_equations(&samples, n)?;
    let obj = objective_from_samples(&samples, n, 2.0);
    let certificate = obj.certificate(&coefficients);
    let error = lp_norm(&BoundarySamples::new(grid.clone(), obj.residual(&coefficients))?, 2.0);
    Ok(OpaResult {
        degree: n,
        p: 2.0,
        coefficients,
        error,
        certificate,
        iterations: 0,
        converged: certificate <= 1e-10,
        warnings,
    })
}

fn normal_equations(samples: &BoundarySamples, n: usize) -> Result<(Vec<Complex64>, Vec<String>)> {
    let modsq = samples.map(|v| Complex64::new(v.norm_sqr(), 0.0));
    let dim = n + 1;
    let moments: Vec<Complex64> =
        (0..dim as i64).map(|m| fourier_coefficient(&modsq, m)).collect::<Result<_>>()?;
    let gram = DMatrix::from_fn(dim, dim, |j, k| {
        if j >= k {
            moments[j - k]
        } else {
            moments[k - j].conj()
        }
    });
    // b_j = mean(conj(z^j f)) = conj of the (-j)-th coefficient of f
    let rhs = nalgebra::DVector::from_fn(dim, |j, _| {
        fourier_coefficient(samples, -(j as i64)).map(|c| c.conj()).unwrap_or_default()
    });
    let mut warnings = Vec::new();
    let eig = gram.clone().symmetric_eigenvalues();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition > CONDITION_WARNING {
        warnings.push(format!("ill-conditioned Gram matrix (condition estimate {condition:.3e})"));
    }
    let solution = match gram.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => gram
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::InternalConsistency("singular Gram matrix".into()))?,
    };
    Ok((solution.iter().copied().collect(), warnings))
}

/// OPA of degree `n` at exponent `p`, started from the better of the `p = 2`
/// solution and `start` (padded with zeros or truncated to length `n + 1`).
pub fn solve_opa_from(
    f: &FunctionSpec,
    n: usize,
    p: f64,
    opts: &SolverOptions,
    start: Option<&[Complex64]>,
) -> Result<OpaResult> {
    check_exponent(p)?;
    let grid = opts.grid()?;
    check_degree(n, &grid)?;
    let samples = f.sample(&grid)?;
    if samples.max_abs() == 0.0 {
        return Err(Error::invalid("f vanishes identically"));
    }
    let obj = objective_from_samples(&samples, n, p);
    if f.value_at_zero() == Complex64::new(0.0, 0.0) {
        // Subharmonicity forces every OPA to vanish when f(0) = 0.
        let coefficients = vec![Complex64::new(0.0, 0.0); n + 1];
        let certificate = obj.certificate(&coefficients);
        return Ok(OpaResult {
            degree: n,
            p,
            coefficients,
            error: 1.0,
            certificate,
            iterations: 0,
            converged: true,
            warnings: vec!["f(0) = 0: every optimal approximant is 0".into()],
        });
    }
    let (p2, mut warnings) = normal_equations(&samples, n)?;
    let mut x0 = p2;
    if let Some(s) = start {
        let mut padded: Vec<Complex64> = s.iter().copied().take(n + 1).collect();
        padded.resize(n + 1, Complex64::new(0.0, 0.0));
        let real = |c: &[Complex64]| obj.value(&LpResidualObjective::to_real(c), 0.0);
        if real(&padded) <= real(&x0) {
            x0 = padded;
        }
    }
    let m = minimize(&obj, &x0, &opts.smoothing, opts.tol, opts.max_iter, &opts.line_search);
    if !m.converged {
        warnings.push(format!(
            "certificate {:.3e} above tolerance {:.1e} after {} iterations",
            m.certificate, opts.tol, m.iterations
        ));
    }
    Ok(OpaResult {
        degree: n,
        p,
        error: m.value.powf(1.0 / p),
        coefficients: m.coeffs,
        certificate: m.certificate,
        iterations: m.iterations,
        converged: m.converged,
        warnings,
    })
}

/// OPA of degree `n` at exponent `p`, started from the `p = 2` solution.
pub fn solve_opa(f: &FunctionSpec, n: usize, p: f64, opts: &SolverOptions) -> Result<OpaResult> {
    solve_opa_from(f, n, p, opts, None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceEntry {
    pub n: usize,
    pub error: f64,
    pub certificate: f64,
    pub converged: bool,
}

/// OPA errors for `n = 0..=n_max`; each solve is warm-started from the previous
/// one, so the errors cannot increase.
pub fn opa_error_sequence(f: &FunctionSpec, p: f64, n_max: usize, opts: &SolverOptions) -> Result<Vec<SequenceEntry>> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut previous: Option<Vec<Complex64>> = None;
    for n in 0..=n_max {
        let r = solve_opa_from(f, n, p, opts, previous.as_deref())?;
        out.push(SequenceEntry { n, error: r.error, certificate: r.certificate, converged: r.converged });
        previous = Some(r.coefficients);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureEntry {
    pub index: usize,
    #[serde(with = "crate::wire::complex")]
    pub j_at_zero: Complex64,
    /// `‖1 - J f‖_p`.
    pub lhs: f64,
    /// `min_{c ∈ ℂ} ‖1 - c f‖_p`.
    pub rhs: f64,
    pub margin: f64,
    /// `min_{|c| = 1} ‖1 - c f‖_p`.
    pub rhs_unimodular: f64,
    pub margin_unimodular: f64,
    /// A negative margin would disprove the inequality for this `J`.
    pub counterexample: bool,
}

/// Compares `‖1 - J f‖_p` with the best constant multiple of `f`, for every
/// non-constant inner `J` in the family.
pub fn conjecture_scan(
    f: &FunctionSpec,
    family: &[FunctionSpec],
    p: f64,
    opts: &SolverOptions,
) -> Result<Vec<ConjectureEntry>> {
    check_exponent(p)?;
    if f.value_at_zero() == Complex64::new(0.0, 0.0) {
        return Err(Error::invalid("f(0) = 0"));
    }
    let grid = opts.grid()?;
    let fs = f.sample(&grid)?;
    let best = solve_opa(f, 0, p, opts)?;
    let rhs = best.error;
    let rhs_unimodular = unimodular_min(&fs, p);
    family
        .iter()
        .enumerate()
        .map(|(index, j)| {
            if !j.is_nonconstant_inner() {
                return Err(Error::invalid(format!("family member {index} is not a non-constant inner function")));
            }
            let j0 = j.inner_at_zero();
            if j0 == Complex64::new(0.0, 0.0) {
                return Err(Error::invalid(format!("family member {index} vanishes at the origin")));
            }
            let jf = j.sample(&grid)?.mul(&fs)?;
            let lhs = lp_norm(&jf.map(|v| Complex64::new(1.0, 0.0) - v), p);
            let margin = lhs - rhs;
            Ok(ConjectureEntry {
                index,
                j_at_zero: j0,
                lhs,
                rhs,
                margin,
                rhs_unimodular,
                margin_unimodular: lhs - rhs_unimodular,
                counterexample: margin < 0.0 || lhs < rhs_unimodular,
            })
        })
        .collect()
}

/// `min_θ ‖1 - e^{iθ} f‖_p` by a coarse scan followed by golden-section refinement.
fn unimodular_min(fs: &BoundarySamples, p: f64) -> f64 {
    let value = |t: f64| {
        let c = Complex64::from_polar(1.0, t);
        lp_norm(&fs.map(|v| Complex64::new(1.0, 0.0) - c * v), p)
    };
    let steps = 256;
    let h = std::f64::consts::TAU / steps as f64;
    let (mut best_t, mut best) = (0.0, value(0.0));
    for k in 1..steps {
        let t = k as f64 * h;
        let v = value(t);
        if v < best {
            best = v;
            best_t = t;
        }
    }
    let (mut a, mut b) = (best_t - h, best_t + h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (value(c), value(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = value(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = value(d);
        }
    }
    best.min(fc).min(fd)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn opts() -> SolverOptions {
        SolverOptions::default().with_grid(1024)
    }

    #[test]
    fn constant_one_is_exact() {
        let grid = make_grid(256).unwrap();
        let r = solve_opa_p2(&FunctionSpec::one(), 3, &grid).unwrap();
        assert!((r.coefficients[0] - 1.0).norm() < 1e-14);
        assert!(r.coefficients[1..].iter().all(|v| v.norm() < 1e-14));
        assert!(r.error < 1e-14);
    }

    #[test]
    fn p2_closed_forms() {
        let grid = make_grid(512).unwrap();
        let b = FunctionSpec::blaschke(vec![c(0.5)]).unwrap();
        let r = solve_opa_p2(&b, 0, &grid).unwrap();
        assert!((r.coefficients[0] - c(-0.5)).norm() < 1e-13);
        assert!((r.error.powi(2) - 0.75).abs() < 1e-13);

        let f = FunctionSpec::polynomial(vec![c(1.0), c(0.5)]).unwrap();
        let r = solve_opa_p2(&f, 0, &grid).unwrap();
        assert!((r.coefficients[0] - c(0.8)).norm() < 1e-14);
        assert!((r.error.powi(2) - 0.2).abs() < 1e-14);
        assert!(r.converged);
    }

    #[test]
    fn zero_function_is_rejected() {
        let grid = make_grid(64).unwrap();
        let zero = FunctionSpec::polynomial(vec![c(0.0)]).unwrap();
        assert!(matches!(solve_opa_p2(&zero, 1, &grid), Err(Error::InvalidArgument(_))));
        assert!(solve_opa(&zero, 1, 3.0, &opts()).is_err());
    }

    #[test]
    fn iterative_path_agrees_at_p2() {
        let f = FunctionSpec::polynomial(vec![c(1.0), Complex64::new(0.3, -0.7), c(0.2)]).unwrap();
        let o = opts();
        let a = solve_opa(&f, 4, 2.0, &o).unwrap();
        let b = solve_opa_p2(&f, 4, &o.grid().unwrap()).unwrap();
        for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
            assert!((x - y).norm() < 1e-8);
        }
    }

    #[test]
    fn vanishing_origin_short_circuits() {
        let f = FunctionSpec::polynomial(vec![c(0.0), c(1.0)]).unwrap();
        let r = solve_opa(&f, 3, 3.0, &opts()).unwrap();
        assert!(r.coefficients.iter().all(|v| v.norm() == 0.0));
        assert_eq!(r.error, 1.0);
    }

    #[test]
    fn blaschke_p3_error_approaches_distance() {
        let b = FunctionSpec::blaschke(vec![c(0.5)]).unwrap();
        let r = solve_opa(&b, 8, 3.0, &opts()).unwrap();
        assert!(r.converged, "{r:?}");
        assert!((r.error.powi(3) - 0.75).abs() < 1e-3, "{}", r.error.powi(3));
    }

    #[test]
    fn sequence_is_monotone() {
        let f = FunctionSpec::polynomial(vec![c(1.0), c(0.5)]).unwrap();
        let seq = opa_error_sequence(&f, 2.5, 8, &opts()).unwrap();
        for w in seq.windows(2) {
            assert!(w[1].error <= w[0].error + 1e-12);
        }
        assert!(seq.last().unwrap().error < 0.1);
    }

    #[test]
    fn options_are_validated() {
        let mut o = opts();
        o.smoothing = vec![1e-2, 1e-2, 0.0];
        assert!(o.validate().is_err());
        assert!(opts().with_tol(0.0).validate().is_err());
        assert!(solve_opa(&FunctionSpec::one(), 0, 1.0, &opts()).is_err());
    }

    #[test]
    fn hilbert_space_conjecture_margin_is_positive() {
        let f = FunctionSpec::polynomial(vec![c(1.0), c(0.5)]).unwrap();
        let family = vec![
            FunctionSpec::blaschke(vec![c(0.5)]).unwrap(),
            FunctionSpec::atom(0.7, c(1.0)).unwrap(),
        ];
        let rep = conjecture_scan(&f, &family, 2.0, &opts()).unwrap();
        assert!(rep.iter().all(|e| e.margin > 0.0 && e.margin_unimodular > 0.0 && !e.counterexample));
        assert!(conjecture_scan(&f, &[FunctionSpec::one()], 2.0, &opts()).is_err());
    }
}
