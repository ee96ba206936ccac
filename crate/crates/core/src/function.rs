//! Finite descriptions of `H^p` functions.
//!
//! A [`FunctionSpec`] is a product `B · S · F` of a finite Blaschke product
//! `B`, finitely many atomic singular inner factors `S`, and a polynomial `F`
//! meant to play the outer factor. Blaschke factors use the convention
//! `(z - a) / (1 - conj(a) z)` with an explicit unimodular rotation in front.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{BoundarySamples, Grid};
use crate::wire::{self, WireComplex};

const UNIMODULAR_TOL: f64 = 1e-14;
const ATOM_COLLISION_TOL: f64 = 1e-14;

/// `rotation · ∏ (z - a_k) / (1 - conj(a_k) z)`; repeated zeros encode multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlaschkeProduct {
    #[serde(with = "wire::complex_vec")]
    zeros: Vec<Complex64>,
    #[serde(with = "wire::complex")]
    rotation: Complex64,
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<Complex64>, rotation: Complex64) -> Result<Self> {
        for a in &zeros {
            let m = a.norm();
            if !(m > 0.0 && m < 1.0) {
                return Err(Error::invalid(format!(
                    "Blaschke zero {a} must satisfy 0 < |a| < 1"
                )));
            }
        }
        if (rotation.norm() - 1.0).abs() > UNIMODULAR_TOL {
            return Err(Error::invalid(format!("rotation {rotation} is not unimodular")));
        }
        Ok(BlaschkeProduct { zeros, rotation })
    }

    pub fn from_zeros(zeros: Vec<Complex64>) -> Result<Self> {
        Self::new(zeros, Complex64::new(1.0, 0.0))
    }

    /// Product of factors `(|a|/a) (a - z) / (1 - conj(a) z)`, the normalization
    /// that makes the value at the origin the positive number `∏ |a_k|`.
    pub fn with_positive_origin(zeros: Vec<Complex64>) -> Result<Self> {
        let rotation = zeros
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, a| acc * (-a.conj() / a.norm()));
        let unit = rotation / rotation.norm();
        Self::new(zeros, unit)
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn rotation(&self) -> Complex64 {
        self.rotation
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.zeros
            .iter()
            .fold(self.rotation, |acc, &a| acc * (z - a) / (1.0 - a.conj() * z))
    }

    pub fn at_zero(&self) -> Complex64 {
        self.zeros.iter().fold(self.rotation, |acc, &a| acc * -a)
    }

    pub fn times(&self, other: &BlaschkeProduct) -> BlaschkeProduct {
        let mut zeros = self.zeros.clone();
        zeros.extend_from_slice(&other.zeros);
        BlaschkeProduct { zeros, rotation: self.rotation * other.rotation }
    }
}

/// `exp(-σ (ξ + z) / (ξ - z))` for mass `σ > 0` at the boundary point `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularAtom {
    mass: f64,
    #[serde(with = "wire::complex")]
    point: Complex64,
}

impl SingularAtom {
    pub fn new(mass: f64, point: Complex64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::invalid(format!("atom mass {mass} must be positive")));
        }
        if (point.norm() - 1.0).abs() > UNIMODULAR_TOL {
            return Err(Error::invalid(format!("atom point {point} is not on the unit circle")));
        }
        Ok(SingularAtom { mass, point })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn point(&self) -> Complex64 {
        self.point
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let gap = self.point - z;
        if gap.norm() <= ATOM_COLLISION_TOL {
            return Err(Error::Domain(format!(
                "evaluation at the atom point {}",
                self.point
            )));
        }
        Ok((-self.mass * (self.point + z) / gap).exp())
    }

    /// Value at the unit-circle point `e^{iθ}`: there `(ζ + z)/(ζ - z)` is
    /// `i cot(α/2)` with `α = θ - arg ζ`, so the sample is exactly unimodular.
    pub fn eval_boundary(&self, theta: f64) -> Result<Complex64> {
        let half = 0.5 * (theta - self.point.arg());
        let (s, c) = half.sin_cos();
        if s.abs() <= 0.5 * ATOM_COLLISION_TOL {
            return Err(Error::Domain(format!("evaluation at the atom point {}", self.point)));
        }
        Ok(Complex64::from_polar(1.0, -self.mass * c / s))
    }

    pub fn at_zero(&self) -> f64 {
        (-self.mass).exp()
    }
}

/// Finite analytic-function description `blaschke × atoms × outer_poly`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionSpecWire")]
pub struct FunctionSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    blaschke: Option<BlaschkeProduct>,
    atoms: Vec<SingularAtom>,
    #[serde(with = "wire::complex_vec")]
    outer_poly: Vec<Complex64>,
}

impl Default for FunctionSpec {
    fn default() -> Self {
        FunctionSpec::one()
    }
}

impl FunctionSpec {
    pub fn new(
        blaschke: Option<BlaschkeProduct>,
        atoms: Vec<SingularAtom>,
        outer_poly: Vec<Complex64>,
    ) -> Result<Self> {
        if outer_poly.is_empty() {
            return Err(Error::invalid("outer polynomial has no coefficients"));
        }
        if outer_poly.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("outer polynomial has non-finite coefficients"));
        }
        Ok(FunctionSpec { blaschke, atoms, outer_poly })
    }

    /// The constant function 1.
    pub fn one() -> Self {
        FunctionSpec { blaschke: None, atoms: Vec::new(), outer_poly: vec![Complex64::new(1.0, 0.0)] }
    }

    /// Finite Blaschke product with rotation 1.
    pub fn blaschke(zeros: Vec<Complex64>) -> Result<Self> {
        Ok(FunctionSpec { blaschke: Some(BlaschkeProduct::from_zeros(zeros)?), ..Self::one() })
    }

    pub fn from_blaschke(b: BlaschkeProduct) -> Self {
        FunctionSpec { blaschke: Some(b), ..Self::one() }
    }

    /// Polynomial with ascending coefficients.
    pub fn polynomial(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(None, Vec::new(), coeffs)
    }

    pub fn atom(mass: f64, point: Complex64) -> Result<Self> {
        Ok(FunctionSpec { atoms: vec![SingularAtom::new(mass, point)?], ..Self::one() })
    }

    pub fn with_outer(mut self, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("outer polynomial has no coefficients"));
        }
        self.outer_poly = coeffs;
        Ok(self)
    }

    pub fn with_atom(mut self, atom: SingularAtom) -> Self {
        self.atoms.push(atom);
        self
    }

    /// Product of two specs (outer polynomials multiply, inner parts merge).
    pub fn times(&self, other: &FunctionSpec) -> FunctionSpec {
        let blaschke = match (&self.blaschke, &other.blaschke) {
            (Some(a), Some(b)) => Some(a.times(b)),
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        };
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        FunctionSpec { blaschke, atoms, outer_poly: poly_mul(&self.outer_poly, &other.outer_poly) }
    }

    pub fn blaschke_part(&self) -> Option<&BlaschkeProduct> {
        self.blaschke.as_ref()
    }

    pub fn atoms(&self) -> &[SingularAtom] {
        &self.atoms
    }

    pub fn outer_poly(&self) -> &[Complex64] {
        &self.outer_poly
    }

    /// The inner factor `blaschke × atoms` with a trivial outer part.
    pub fn inner_part(&self) -> FunctionSpec {
        FunctionSpec { blaschke: self.blaschke.clone(), atoms: self.atoms.clone(), outer_poly: vec![Complex64::new(1.0, 0.0)] }
    }

    /// True when the inner factor is a unimodular constant.
    pub fn has_trivial_inner(&self) -> bool {
        self.atoms.is_empty() && self.blaschke.as_ref().is_none_or(|b| b.degree() == 0)
    }

    /// True when this is a non-constant inner function.
    pub fn is_nonconstant_inner(&self) -> bool {
        let outer_unimodular = trim_trailing(&self.outer_poly).len() == 1
            && (self.outer_poly[0].norm() - 1.0).abs() <= UNIMODULAR_TOL;
        outer_unimodular && !self.has_trivial_inner()
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut value = horner(&self.outer_poly, z);
        if let Some(b) = &self.blaschke {
            value *= b.eval(z);
        }
        for atom in &self.atoms {
            value *= atom.eval(z)?;
        }
        Ok(value)
    }

    pub fn sample(&self, grid: &Grid) -> Result<BoundarySamples> {
        let values = grid
            .nodes()
            .iter()
            .enumerate()
            .map(|(k, &z)| {
                let mut value = horner(&self.outer_poly, z);
                if let Some(b) = &self.blaschke {
                    value *= b.eval(z);
                }
                for atom in &self.atoms {
                    value *= atom.eval_boundary(grid.angle(k))?;
                }
                Ok(value)
            })
            .collect::<Result<Vec<_>>>()?;
        BoundarySamples::new(grid.clone(), values)
    }

    pub fn value_at_zero(&self) -> Complex64 {
        self.inner_at_zero() * self.outer_poly[0]
    }

    /// `J(0)` for the inner factor `J = blaschke × atoms`.
    pub fn inner_at_zero(&self) -> Complex64 {
        let b = self.blaschke.as_ref().map_or(Complex64::new(1.0, 0.0), |b| b.at_zero());
        self.atoms.iter().fold(b, |acc, a| acc * a.at_zero())
    }
}

/// Evaluates `f` at `z`; see [`FunctionSpec::eval`].
pub fn eval_spec(f: &FunctionSpec, z: Complex64) -> Result<Complex64> {
    f.eval(z)
}

/// Samples `f` on the grid; see [`FunctionSpec::sample`].
pub fn sample(f: &FunctionSpec, grid: &Grid) -> Result<BoundarySamples> {
    f.sample(grid)
}

pub fn value_at_zero(f: &FunctionSpec) -> Complex64 {
    f.value_at_zero()
}

/// Pointwise `exp(exponent · Log(base))` with the principal logarithm.
///
/// All samples and `base_at_zero` must lie in the open right half-plane; there
/// the principal branch is the analytic branch that is positive at the origin.
pub fn fractional_power(
    base: &BoundarySamples,
    base_at_zero: Complex64,
    exponent: f64,
) -> Result<BoundarySamples> {
    if !exponent.is_finite() {
        return Err(Error::invalid(format!("exponent {exponent} is not finite")));
    }
    if base_at_zero.re <= 0.0 {
        return Err(Error::BranchViolation(format!(
            "value at the origin {base_at_zero} is outside the right half-plane"
        )));
    }
    if let Some(bad) = base.values().iter().find(|v| !(v.re > 0.0)) {
        return Err(Error::BranchViolation(format!(
            "boundary value {bad} is outside the right half-plane"
        )));
    }
    Ok(base.map(|v| (exponent * v.ln()).exp()))
}

/// Finite Blaschke product from the first `n` terms of a zero sequence, each
/// factor normalized as `(|a|/a)(a - z)/(1 - conj(a) z)`.
pub fn truncate_blaschke(
    zeros: impl IntoIterator<Item = Complex64>,
    n: usize,
) -> Result<BlaschkeProduct> {
    let taken: Vec<Complex64> = zeros.into_iter().take(n).collect();
    if taken.len() < n {
        return Err(Error::invalid(format!(
            "zero sequence ended after {} of {n} terms",
            taken.len()
        )));
    }
    BlaschkeProduct::with_positive_origin(taken)
}

pub(crate) fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

pub(crate) fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub(crate) fn trim_trailing(coeffs: &[Complex64]) -> &[Complex64] {
    let end = coeffs.iter().rposition(|c| *c != Complex64::new(0.0, 0.0)).map_or(0, |i| i + 1);
    &coeffs[..end]
}

#[derive(Deserialize)]
struct BlaschkeWire {
    #[serde(default)]
    zeros: Vec<WireComplex>,
    rotation: Option<WireComplex>,
}

#[derive(Deserialize)]
struct AtomWire {
    mass: f64,
    point: Option<WireComplex>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionSpecWire {
    blaschke: Option<BlaschkeWire>,
    #[serde(default)]
    atoms: Vec<AtomWire>,
    #[serde(default)]
    outer_poly: Vec<WireComplex>,
}

impl TryFrom<FunctionSpecWire> for FunctionSpec {
    type Error = Error;

    fn try_from(w: FunctionSpecWire) -> Result<Self> {
        let blaschke = w
            .blaschke
            .map(|b| {
                BlaschkeProduct::new(
                    b.zeros.into_iter().map(Into::into).collect(),
                    b.rotation.map_or(Complex64::new(1.0, 0.0), Into::into),
                )
            })
            .transpose()?;
        let atoms = w
            .atoms
            .into_iter()
            .map(|a| SingularAtom::new(a.mass, a.point.map_or(Complex64::new(1.0, 0.0), Into::into)))
            .collect::<Result<Vec<_>>>()?;
        let outer_poly: Vec<Complex64> = if w.outer_poly.is_empty() {
            vec![Complex64::new(1.0, 0.0)]
        } else {
            w.outer_poly.into_iter().map(Into::into).collect()
        };
        FunctionSpec::new(blaschke, atoms, outer_poly)
    }
}
