//! Birkhoff–James orthogonality in `L^p` and the Pythagorean inequalities.
//!
//! For `1 < p < ∞`, `f ⊥_p g` (meaning `‖f + βg‖_p ≥ ‖f‖_p` for every scalar
//! `β`) holds exactly when `∫ |f|^{p-2} conj(f) g dm = 0`. The integrand's
//! first factor is [`power_dual`] with `s = p - 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_exponent, Result};
use crate::grid::{lp_norm, BoundarySamples};

/// Default tolerance on the normalized orthogonality pairing.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Allowed negative slack when an inequality holds with equality in exact arithmetic.
const ROUNDOFF_SLACK: f64 = 1e-12;

/// `f^{<s>} = |f|^{s-1} conj(f)`, with the value 0 wherever `f = 0`.
pub fn power_dual(f: &BoundarySamples, s: f64) -> BoundarySamples {
    assert!(s > 0.0, "power_dual needs s > 0, got {s}");
    f.map(|v| {
        let m = v.norm();
        if m == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            m.powf(s - 1.0) * v.conj()
        }
    })
}

/// James's pairing `mean(|f|^{p-2} conj(f) g)`; zero iff `f ⊥_p g`.
pub fn bj_pairing(f: &BoundarySamples, g: &BoundarySamples, p: f64) -> Result<Complex64> {
    check_exponent(p)?;
    Ok(power_dual(f, p - 1.0).mul(g)?.mean())
}

/// Modulus of [`bj_pairing`].
pub fn bj_residual(f: &BoundarySamples, g: &BoundarySamples, p: f64) -> Result<f64> {
    bj_pairing(f, g, p).map(|z| z.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Lower,
    Upper,
}

/// Exponent `r` and constant `K` of a Pythagorean inequality
/// `‖f + g‖^r ≤ (or ≥) ‖f‖^r + K ‖g‖^r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PythagoreanParams {
    pub regime: Regime,
    pub p: f64,
    pub r: f64,
    pub k: f64,
}

impl PythagoreanParams {
    pub fn new(regime: Regime, p: f64) -> Result<Self> {
        check_exponent(p)?;
        let clarkson = 1.0 / (2f64.powf(p - 1.0) - 1.0);
        let (r, k) = match (regime, p <= 2.0) {
            (Regime::Upper, true) | (Regime::Lower, false) => (p, clarkson),
            (Regime::Lower, true) | (Regime::Upper, false) => (2.0, p - 1.0),
        };
        Ok(PythagoreanParams { regime, p, r, k })
    }

    pub fn upper(p: f64) -> Result<Self> {
        Self::new(Regime::Upper, p)
    }

    pub fn lower(p: f64) -> Result<Self> {
        Self::new(Regime::Lower, p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub params: PythagoreanParams,
    /// `‖f + g‖^r`.
    pub lhs: f64,
    /// `‖f‖^r + K ‖g‖^r`.
    pub rhs: f64,
    /// Nonnegative when the inequality holds.
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PythagoreanReport {
    pub p: f64,
    pub residual: f64,
    pub orthogonal: bool,
    pub inequalities: Vec<InequalityCheck>,
}

impl PythagoreanReport {
    pub fn all_hold(&self) -> bool {
        self.orthogonal && self.inequalities.iter().all(|c| c.holds)
    }
}

/// Checks the two Pythagorean inequalities that apply at `p`, provided
/// `bj_residual(f, g, p) ≤ tol`. Non-orthogonal pairs give an empty report.
pub fn pythagorean_report(
    f: &BoundarySamples,
    g: &BoundarySamples,
    p: f64,
    tol: f64,
) -> Result<PythagoreanReport> {
    let residual = bj_residual(f, g, p)?;
    if residual > tol {
        return Ok(PythagoreanReport { p, residual, orthogonal: false, inequalities: Vec::new() });
    }
    let norm_f = lp_norm(f, p);
    let norm_g = lp_norm(g, p);
    let norm_sum = lp_norm(&f.add(g)?, p);
    let names: [(&str, Regime); 2] = if p <= 2.0 {
        [("upper1", Regime::Upper), ("lower1", Regime::Lower)]
    } else {
        [("lower2", Regime::Lower), ("upper2", Regime::Upper)]
    };
    let inequalities = names
        .iter()
        .map(|&(name, regime)| {
            let params = PythagoreanParams::new(regime, p)?;
            let lhs = norm_sum.powf(params.r);
            let rhs = norm_f.powf(params.r) + params.k * norm_g.powf(params.r);
            let slack = match regime {
                Regime::Upper => rhs - lhs,
                Regime::Lower => lhs - rhs,
            };
            let holds = slack >= -ROUNDOFF_SLACK * rhs.max(1.0);
            Ok(InequalityCheck { name: name.to_string(), params, lhs, rhs, slack, holds })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PythagoreanReport { p, residual, orthogonal: true, inequalities })
}
