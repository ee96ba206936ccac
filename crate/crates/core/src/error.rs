use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Every variant renders as a single line of the form `kind: detail` so the
/// command-line front end can forward it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid-argument: {0}")]
    InvalidArgument(String),
    #[error("domain-error: {0}")]
    Domain(String),
    #[error("branch-violation: {0}")]
    BranchViolation(String),
    #[error("outerness-violation: {0}")]
    OuternessViolation(String),
    #[error("internal-consistency: {0}")]
    InternalConsistency(String),
    #[error("non-convergence: {0}")]
    NonConvergence(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Short machine-readable kind, the part before the colon.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Domain(_) => "domain-error",
            Error::BranchViolation(_) => "branch-violation",
            Error::OuternessViolation(_) => "outerness-violation",
            Error::InternalConsistency(_) => "internal-consistency",
            Error::NonConvergence(_) => "non-convergence",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("exponent p = {p} must lie in (1, inf)")))
    }
}
