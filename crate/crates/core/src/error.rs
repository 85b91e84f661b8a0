//! Error type shared by every numerical routine in the crate.

use thiserror::Error;

/// Failure modes of kernel evaluation, quadrature and operator assembly.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// A request exceeds a configured capability limit.
    #[error("capability exceeded in {func}: {detail}")]
    Capability { func: &'static str, detail: String },

    /// An iterative or adaptive procedure did not reach its tolerance.
    #[error("non-convergence in {func}: {detail}")]
    NonConvergence { func: &'static str, detail: String },

    /// Inputs violate a documented precondition.
    #[error("precondition violated in {func}: {detail}")]
    Precondition { func: &'static str, detail: String },

    /// A point mapped outside the sampled range.
    #[error("extrapolation requested in {func}: {detail}")]
    Extrapolation { func: &'static str, detail: String },

    /// An admissible region contains no grid points.
    #[error("empty region for {what}")]
    EmptyRegion { what: String },
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    pub(crate) fn capability(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Capability {
            func,
            detail: detail.into(),
        }
    }

    pub(crate) fn nonconvergence(func: &'static str, detail: impl Into<String>) -> Self {
        Error::NonConvergence {
            func,
            detail: detail.into(),
        }
    }

    pub(crate) fn precondition(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Precondition {
            func,
            detail: detail.into(),
        }
    }

    /// True for failures of a numerical procedure rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
