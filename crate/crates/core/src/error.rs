use thiserror::Error;

/// Errors raised by the models, the energy accounting and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a model function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A table, ladder, profile or parameter set violates its invariants.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A power trace cannot be integrated.
    #[error("malformed trace: {0}")]
    MalformedTrace(String),

    /// A controller measurement carries a negative or non-finite field.
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    /// A mission did not reach its end within the tick budget.
    #[error("simulation timed out after {ticks} ticks at position {position_m} m")]
    Timeout { ticks: u64, position_m: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}
