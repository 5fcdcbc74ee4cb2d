use thiserror::Error;

/// Errors produced by solvers, verifiers, and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{field} out of range: got {value}, expected {expected}")]
    OutOfRange {
        field: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// The concession cdf reached 1, so Bayes' rule no longer defines a posterior.
    #[error("degenerate belief at t={t}: concession cdf reached 1")]
    DegenerateBelief { t: f64 },

    /// Catch-up times are only defined when one peripheral strictly dominates.
    #[error("no peripheral strictly dominates both other players")]
    NotDominantPeripheral,

    #[error("quadrature did not reach tolerance {tol:e}: estimated error {err:e}")]
    QuadratureFailure { tol: f64, err: f64 },

    /// Two fixed-step integrations disagreed beyond the accepted limit.
    #[error("step-size check failed: solutions differ by {delta:e} (limit {limit:e})")]
    StepFailure { delta: f64, limit: f64 },

    #[error("boundary matching failed: residual {residual:e} exceeds {tol:e}")]
    ShootingDivergence { residual: f64, tol: f64 },

    /// The requested configuration needs simultaneous time-0 atoms from more
    /// than one player, which the four-player solver does not support.
    #[error("configuration needs time-0 atoms from {count} players; at most one is supported")]
    MultipleAtoms { count: usize },

    #[error("invalid concession profile: {reason}")]
    InvalidProfile { reason: &'static str },

    #[error("{0}")]
    Unsupported(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
