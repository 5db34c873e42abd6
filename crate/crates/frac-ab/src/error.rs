//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by solvers, quadrature and special-function evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside an operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A fractional order outside (0, 1].
    #[error("fractional order must lie in (0, 1], got {0}")]
    InvalidOrder(f64),

    /// Result or intermediate exceeds f64 range.
    #[error("overflow: {0}")]
    Overflow(String),

    /// An iterative process did not meet its stopping rule within budget.
    #[error("did not converge: {0}")]
    NonConvergence(String),

    /// Fixed-point resolution of an implicit node failed.
    #[error("fixed-point iteration did not converge at t = {t} (residual {residual:.3e})")]
    FixedPoint { t: f64, residual: f64 },

    /// Solution magnitude blew past the instability detector.
    #[error("solution blew up at t = {t}: |y| reached {magnitude:.3e}")]
    Instability { t: f64, magnitude: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
