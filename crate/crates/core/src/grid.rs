//! Quadrature on the unit circle.
//!
//! Everything downstream works with boundary values sampled at `N` equally
//! spaced nodes `exp(i 2π (k + 1/2) / N)`. The half-step offset keeps the point
//! `z = 1` off the grid, which matters for atomic singular inner factors
//! sitting there. Integrals against normalized Lebesgue measure become plain
//! means over the nodes, exact for trigonometric polynomials of degree `< N`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Smallest admissible grid.
pub const MIN_GRID_SIZE: usize = 16;

/// Grid size used when the caller does not pick one.
pub const DEFAULT_GRID_SIZE: usize = 4096;

/// Environment variable that overrides [`DEFAULT_GRID_SIZE`].
pub const GRID_ENV_VAR: &str = "HARDY_OPA_GRID";

/// [`DEFAULT_GRID_SIZE`] unless `HARDY_OPA_GRID` holds a positive integer.
pub fn default_grid_size() -> usize {
    std::env::var(GRID_ENV_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(DEFAULT_GRID_SIZE)
}

/// Midpoint-offset nodes on the unit circle with uniform weights `1/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleGrid {
    nodes: Vec<Complex64>,
}

/// Shared handle to a grid; samples keep one so mismatches can be detected.
pub type Grid = Arc<CircleGrid>;

/// Builds an `N`-node grid. `N` must be at least [`MIN_GRID_SIZE`].
pub fn make_grid(n: usize) -> Result<Grid> {
    CircleGrid::new(n).map(Arc::new)
}

impl CircleGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < MIN_GRID_SIZE {
            return Err(Error::invalid(format!(
                "grid size {n} is below the minimum {MIN_GRID_SIZE}"
            )));
        }
        let nodes = (0..n).map(|k| Complex64::from_polar(1.0, theta(n, k))).collect();
        Ok(CircleGrid { nodes })
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.nodes.len() as f64
    }

    pub fn angle(&self, k: usize) -> f64 {
        theta(self.size(), k)
    }

    /// `ζ_k^m` evaluated from an exactly reduced angle, so large `|m|` loses
    /// no accuracy compared with `exp(i m θ_k)`.
    pub fn node_power(&self, k: usize, m: i64) -> Complex64 {
        let n = self.size() as i64;
        // θ_k = 2π (2k+1) / (2N); reduce m (2k+1) modulo 2N.
        let twice_n = 2 * n;
        let step = (m.rem_euclid(twice_n) * (2 * k as i64 + 1)).rem_euclid(twice_n);
        Complex64::from_polar(1.0, PI * step as f64 / n as f64)
    }
}

fn theta(n: usize, k: usize) -> f64 {
    2.0 * PI * (k as f64 + 0.5) / n as f64
}

/// Complex values of a function at the nodes of a grid.
#[derive(Debug, Clone)]
pub struct BoundarySamples {
    grid: Grid,
    values: Vec<Complex64>,
}

impl BoundarySamples {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.size() {
            return Err(Error::invalid(format!(
                "{} sample values for a grid of size {}",
                values.len(),
                grid.size()
            )));
        }
        Ok(BoundarySamples { grid, values })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(Complex64) -> Complex64) -> Self {
        let values = grid.nodes().iter().map(|&z| f(z)).collect();
        BoundarySamples { grid: Arc::clone(grid), values }
    }

    pub fn constant(grid: &Grid, c: Complex64) -> Self {
        BoundarySamples { grid: Arc::clone(grid), values: vec![c; grid.size()] }
    }

    /// Samples of the monomial `z^m` (negative `m` allowed).
    pub fn monomial(grid: &Grid, m: i64) -> Self {
        let values = (0..grid.size()).map(|k| grid.node_power(k, m)).collect();
        BoundarySamples { grid: Arc::clone(grid), values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        BoundarySamples {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination with another sample set on the same grid.
    pub fn zip_with(
        &self,
        other: &BoundarySamples,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        same_grid(self, other)?;
        Ok(BoundarySamples {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn mul(&self, other: &BoundarySamples) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &BoundarySamples) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &BoundarySamples) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| c * v)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    /// Multiplies by `z^m`.
    pub fn shift(&self, m: i64) -> Self {
        let grid = &self.grid;
        BoundarySamples {
            grid: Arc::clone(grid),
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(k, &v)| v * grid.node_power(k, m))
                .collect(),
        }
    }

    /// Quadrature mean, i.e. the integral against normalized Lebesgue measure.
    pub fn mean(&self) -> Complex64 {
        let (re, im) = self.values.iter().fold((Kahan::default(), Kahan::default()), |(mut re, mut im), v| {
            re.add(v.re);
            im.add(v.im);
            (re, im)
        });
        Complex64::new(re.sum, im.sum) / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn same_grid(a: &BoundarySamples, b: &BoundarySamples) -> Result<()> {
    if Arc::ptr_eq(&a.grid, &b.grid) || a.grid.size() == b.grid.size() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "grid mismatch: {} vs {} nodes",
            a.grid.size(),
            b.grid.size()
        )))
    }
}

#[derive(Default)]
pub(crate) struct Kahan {
    pub sum: f64,
    carry: f64,
}

impl Kahan {
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

pub(crate) fn mean_real(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    let mut acc = Kahan::default();
    values.for_each(|v| acc.add(v));
    acc.sum / n as f64
}

/// Discrete `L^p(dm)` norm `(mean |f|^p)^(1/p)`.
///
/// # Panics
/// If `p < 1`.
pub fn lp_norm(f: &BoundarySamples, p: f64) -> f64 {
    assert!(p >= 1.0 && p.is_finite(), "lp_norm needs 1 <= p < inf, got {p}");
    let n = f.len();
    if p == 2.0 {
        mean_real(f.values.iter().map(|v| v.norm_sqr()), n).sqrt()
    } else {
        mean_real(f.values.iter().map(|v| v.norm().powf(p)), n).powf(1.0 / p)
    }
}

/// Sesquilinear pairing `mean(f · conj(g))`.
pub fn dual_pair(f: &BoundarySamples, g: &BoundarySamples) -> Result<Complex64> {
    Ok(f.zip_with(g, |a, b| a * b.conj())?.mean())
}

/// Discrete `(1/2πi) ∮ g ψ dζ`, computed as `mean(g ψ ζ)`.
pub fn cauchy_functional(g: &BoundarySamples, psi: &BoundarySamples) -> Result<Complex64> {
    fourier_coefficient(&g.mul(psi)?, -1)
}

/// `n`-th Fourier coefficient `mean(f ζ^{-n})`, valid for `|n| < N/2`.
pub fn fourier_coefficient(f: &BoundarySamples, n: i64) -> Result<Complex64> {
    let size = f.grid.size() as i64;
    if 2 * n.abs() >= size {
        return Err(Error::invalid(format!(
            "Fourier index {n} aliases on a grid of {size} nodes"
        )));
    }
    Ok(f.shift(-n).mean())
}

/// All `N` Fourier coefficients through an FFT. Entry `j` holds frequency `j`
/// for `j < N/2` and frequency `j - N` otherwise.
pub fn fourier_coefficients_fft(f: &BoundarySamples) -> Vec<Complex64> {
    let n = f.grid.size();
    let mut buf = f.values.clone();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    // node offset: θ_k = 2πk/N + π/N contributes exp(-iπ m / N) to frequency m.
    buf.iter()
        .enumerate()
        .map(|(j, &v)| {
            let freq = if 2 * j < n { j as f64 } else { j as f64 - n as f64 };
            v * scale * Complex64::from_polar(1.0, -PI * freq / n as f64)
        })
        .collect()
}

/// Looks up frequency `m` in the output of [`fourier_coefficients_fft`].
pub fn fft_coefficient(coeffs: &[Complex64], m: i64) -> Complex64 {
    coeffs[m.rem_euclid(coeffs.len() as i64) as usize]
}
