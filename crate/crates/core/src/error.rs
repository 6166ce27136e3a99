use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {what} = {value} ({reason})")]
    Domain {
        what: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A configuration or model object failed validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// Time step too coarse to resolve the fastest frequency on the grid.
    #[error("time step dt = {dt} too large: dt * omega_max = {product} exceeds {limit}")]
    StepSize { dt: f64, product: f64, limit: f64 },

    /// A resolvent denominator vanished.
    #[error("pole encountered: |denominator| = {modulus:e}")]
    Pole { modulus: f64 },

    /// Principal-value subtraction could not be stabilized at a quadrature node.
    #[error("singular node at omega = {omega}: principal-value subtraction failed")]
    SingularNode { omega: f64 },

    /// A requested time lies beyond the recurrence-free window of a finite-mode model.
    #[error("time {time} outside recurrence-free window (limit {limit})")]
    RecurrenceWindow { time: f64, limit: f64 },

    /// The wave-operator convergence certificate failed.
    #[error("wave operator did not converge: residual {residual:e} at horizon {horizon} (tolerance {tolerance:e})")]
    NonConvergence {
        residual: f64,
        horizon: f64,
        tolerance: f64,
    },

    /// The time discretization blew up.
    #[error("discretization failure at step {step} (t = {time}): |F| = {modulus}")]
    Discretization {
        step: usize,
        time: f64,
        modulus: f64,
    },

    /// Two objects that must share a frequency grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub(crate) fn require_nonnegative(what: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value,
            reason: "must be finite and >= 0",
        })
    }
}

pub(crate) fn require_positive(what: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value,
            reason: "must be finite and > 0",
        })
    }
}
