use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("point outside the hyperbolic polytope: {0}")]
    DomainViolation(String),

    #[error("tolerance {tol:e} unachievable: would need more than {max_terms} terms")]
    ToleranceUnachievable { tol: f64, max_terms: u64 },

    #[error("{context}: no convergence after {subdivisions} subdivisions (best {value:e}, error {error:e})")]
    NonConvergence {
        context: String,
        value: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("unsupported dimension k = {k} for {method} (max {max})")]
    UnsupportedDimension {
        k: u32,
        max: u32,
        method: &'static str,
    },

    #[error("integrand is not finite at x = {at:e}")]
    NonFinite { at: f64 },

    #[error("root search failed for u = {u}: {reason}")]
    RootSearch { u: f64, reason: String },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// Prefix a nonconvergence context, used when a nested integral fails.
    pub(crate) fn within(self, outer: impl std::fmt::Display) -> Self {
        match self {
            Error::NonConvergence {
                context,
                value,
                error,
                subdivisions,
            } => Error::NonConvergence {
                context: format!("{outer}: {context}"),
                value,
                error,
                subdivisions,
            },
            other => other,
        }
    }
}
