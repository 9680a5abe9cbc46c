use specfun::SpecFunError;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, RffsoError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RffsoError {
    #[error("invalid value for {field}: {detail}")]
    InvalidParameter { field: &'static str, detail: String },

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("selection table would need {terms} terms, above the cap of {cap}")]
    Capacity { terms: u128, cap: usize },

    #[error("{context}: {source}")]
    Numerical { context: String, source: SpecFunError },
}

impl RffsoError {
    pub(crate) fn invalid(field: &'static str, detail: impl Into<String>) -> Self {
        RffsoError::InvalidParameter { field, detail: detail.into() }
    }

    pub(crate) fn numerical(context: impl Into<String>) -> impl FnOnce(SpecFunError) -> Self {
        let context = context.into();
        move |source| RffsoError::Numerical { context, source }
    }

    /// True for quadrature or special-function failures, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, RffsoError::Numerical { .. } | RffsoError::Capacity { .. })
    }
}
