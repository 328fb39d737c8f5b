//! Periodic solutions of the forced quadratic oscillator at resonance.
//!
//! The problem is `u'' + u + mu*u^2 = eps*cos(omega*t)` with period
//! `2*pi/omega`. After rescaling to `s = omega*t` the crate computes
//! closed-form constant barriers (a lower solution `r > 0` and an upper
//! solution `R`), runs a shift-inverted monotone iteration between them,
//! cross-checks the limit with a Newton/harmonic-balance solver, and
//! verifies every claim (residual, bracket containment, sign of the
//! solution, forcing-sign symmetry) after the fact.
//!
//! Modules follow the pipeline:
//!
//! - [`model`]: problem parameters, the canonical field `f(s,u)`, and the
//!   lower/upper-solution predicates.
//! - [`barriers`]: the barrier certificate (quadratic roots, bracket,
//!   worst-case sign inequalities) and the `u -> -u` reflection.
//! - [`spectral`]: real 2*pi-periodic functions on an equispaced grid with
//!   Fourier coefficients, spectral differentiation, and inversion of
//!   `-d^2/ds^2 + lambda`.
//! - [`solvers`]: the monotone iteration and the Newton collocation solver.
//! - [`verify`]: independent residual/sign/bracket checks and the
//!   back-transform to the original time variable.
//! - [`pipeline`]: the end-to-end certified solve used by the CLI.

pub mod barriers;
pub mod error;
pub mod model;
pub mod pipeline;
pub mod solvers;
pub mod spectral;
pub mod verify;

use num_traits::{Float, FloatConst};
use std::fmt;

pub use barriers::{BarrierCertificate, BarrierSignReport, Bracket};
pub use error::Error;
pub use model::{CandidateFunction, ProblemParams, SignCase};
pub use pipeline::{solve_instance, SolveOutcome};
pub use solvers::{Direction, IterationTrace, SolverConfig, SolverKind};
pub use spectral::PeriodicFunction;
pub use verify::SolutionReport;

/// Scalar type for all core computations: `f32` or `f64`.
///
/// `FftNum` brings `FromPrimitive + Signed + Debug + Send + Sync` along
/// with transform support, so this is mostly `Float + FloatConst` plus
/// display for diagnostics.
pub trait Real: Float + FloatConst + rustfft::FftNum + fmt::Display {}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar type.
pub(crate) fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("constant representable in scalar type")
}

pub type ProblemParams64 = ProblemParams<f64>;
pub type ProblemParams32 = ProblemParams<f32>;
pub type BarrierCertificate64 = BarrierCertificate<f64>;
pub type PeriodicFunction64 = PeriodicFunction<f64>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type SolutionReport64 = SolutionReport<f64>;
pub type SolveOutcome64 = SolveOutcome<f64>;
