use thiserror::Error;

/// Errors raised by the model, the solvers and the analysis helpers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violates a documented precondition.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A closed-form result was requested outside the regime it was derived for.
    #[error("outside regime of validity: {0}")]
    Regime(String),

    #[error("quadrature did not converge: estimated error {error:.3e} exceeds tolerance {tolerance:.3e}")]
    Quadrature { error: f64, tolerance: f64 },

    #[error("step size underflow at t = {t:.6} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },

    /// The bath grid does not cover the resonance window for the whole run.
    #[error("bath grid does not cover t = {t:.4}: window edge at {edge:.3} half-widths from resonance")]
    GridCoverage { t: f64, edge: f64 },

    #[error("grid would hold {count} modes, above the cap of {cap}")]
    GridTooLarge { count: usize, cap: usize },

    #[error("Volterra solution did not converge under step halving (observed ratio {ratio:.3})")]
    VolterraConvergence { ratio: f64 },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
