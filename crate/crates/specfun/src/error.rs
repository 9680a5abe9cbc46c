use thiserror::Error;

pub type Result<T> = std::result::Result<T, SpecFunError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    #[error("argument outside the domain of {function}: {detail}")]
    Domain { function: &'static str, detail: String },

    #[error("{function} overflows for argument {argument}")]
    Overflow { function: &'static str, argument: f64 },

    #[error("invalid Meijer G parameters: {0}")]
    InvalidSpec(String),

    /// An upper-family pole coincides with a lower-family pole, so no contour
    /// can separate them.
    #[error("degenerate Meijer G parameters: {0}")]
    DegenerateParameters(String),

    #[error("numerical failure in {what}: achieved error estimate {error_estimate:e} on value {value:e}")]
    NumericalFailure { what: &'static str, value: f64, error_estimate: f64 },
}

pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> SpecFunError {
    SpecFunError::Domain { function, detail: detail.into() }
}
