//! Error type shared by the numeric layers.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A model or body parameter violates its declared range.
    #[error("parameter error: {0}")]
    Param(String),

    /// A convex body was used in a role that needs a chord-length CDF it does not carry.
    #[error("body `{0}` has no chord-length CDF; attach a table or use the unit ball")]
    MissingChordCdf(String),

    /// No Hermite coefficient above the rank-detection tolerance.
    #[error("Hermite rank not found: all coefficients of positive order are below {tol}")]
    RankNotFound { tol: f64 },

    /// An asymptotic-constant query does not apply to the parameter regime.
    #[error("regime mismatch: {0}")]
    Regime(String),

    /// A moving-threshold specification fails an admissibility condition.
    #[error("inadmissible threshold: {0}")]
    Inadmissible(String),

    /// Input data table is malformed.
    #[error("table error: {0}")]
    Table(String),

    /// A numeric routine could not reach its accuracy target.
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
