//! Error type shared across the crate.

use crate::solvers::IterationTrace;
use crate::Real;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error<T: Real> {
    /// Parameter validation failed (omega <= 0, or mu/epsilon zero outside
    /// degenerate mode).
    #[error("invalid parameters: {reason}")]
    InvalidParams { reason: String },

    /// Mismatched or unsupported array length for a spectral grid.
    #[error("bad grid: expected a power of two >= 8, got length {n}")]
    ShapeError { n: usize },

    /// The quadratic has no two distinct real roots; on the barrier
    /// quadratics this signals 4|mu||eps| >= 1.
    #[error("quadratic discriminant {discriminant} is not positive")]
    DegenerateDiscriminant { discriminant: T },

    /// Barrier construction was asked for on mu >= 0; callers reflect first.
    #[error("barriers require mu < 0, got mu = {mu}; reflect the problem first")]
    WrongSignCase { mu: T },

    /// The existence condition 4|mu||eps| < 1 fails (strict).
    #[error("resonance condition violated: 4|mu||eps| = {product} >= 1")]
    ResonanceConditionViolated { product: T },

    /// A user-chosen bracket endpoint is outside the certified range.
    #[error("invalid bracket choice: {which} = {value} outside [{lo}, {hi}]")]
    InvalidBracketChoice {
        which: &'static str,
        value: T,
        lo: T,
        hi: T,
    },

    /// The shifted operator -u'' + lambda*u is only invertible for lambda > 0.
    #[error("non-positive shift lambda = {lambda}")]
    NonPositiveShift { lambda: T },

    /// Iteration cap reached or the step-converged iterate failed its
    /// residual confirmation; the trace is kept for diagnosis.
    #[error("no convergence after {} iterations", .trace.iterations)]
    NoConvergence { trace: IterationTrace<T> },

    /// An iterate left the guarded bracket; unreachable for certified inputs.
    #[error("iterate escaped the bracket at iteration {iteration} (value {value})")]
    BracketEscape { iteration: usize, value: T },

    /// Newton linearization is singular or numerically singular.
    #[error("singular Jacobian (condition estimate {condition})")]
    SingularJacobian { condition: T },
}
