//! Problem parameters, the canonical field, and the barrier predicates.
//!
//! The oscillator `u'' + u + mu*u^2 = eps*cos(omega*t)` with period
//! `tau = 2*pi/omega` rescales under `s = omega*t` to the canonical
//! 2*pi-periodic problem `-u''(s) = f(s, u)` with
//! `f(s, u) = omega^-2 * (u + mu*u^2 - eps*cos(s))`.

use crate::error::Error;
use crate::{real, Real};

/// Default slack for the discrete lower/upper-solution predicates.
pub const DEFAULT_PREDICATE_SLACK: f64 = 1e-9;

/// The triple `(mu, epsilon, omega)` defining the oscillator.
///
/// Certification requires `mu != 0`, `epsilon != 0`, `omega > 0`.
/// The degenerate constructor drops the nonzero requirements so the exactly
/// solvable unforced limits (equilibria `0` and `-1/mu`) stay available as
/// test oracles; reports carry the flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams<T: Real> {
    mu: T,
    epsilon: T,
    omega: T,
    degenerate: bool,
}

/// Which solution regime the sign of `mu` selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignCase {
    /// `mu < 0`: a positive periodic solution exists.
    NegativeMu,
    /// `mu > 0`: a negative periodic solution exists (by reflection).
    PositiveMu,
}

impl<T: Real> ProblemParams<T> {
    pub fn new(mu: T, epsilon: T, omega: T) -> Result<Self, Error<T>> {
        if !(omega > T::zero()) {
            return Err(Error::InvalidParams {
                reason: format!("omega must be positive, got {omega}"),
            });
        }
        if mu == T::zero() {
            return Err(Error::InvalidParams {
                reason: "mu must be nonzero (use ProblemParams::degenerate to allow it)".into(),
            });
        }
        if epsilon == T::zero() {
            return Err(Error::InvalidParams {
                reason: "epsilon must be nonzero (use ProblemParams::degenerate to allow it)"
                    .into(),
            });
        }
        Ok(Self {
            mu,
            epsilon,
            omega,
            degenerate: false,
        })
    }

    /// Accepts `mu = 0` and/or `epsilon = 0`; still requires `omega > 0`.
    pub fn degenerate(mu: T, epsilon: T, omega: T) -> Result<Self, Error<T>> {
        if !(omega > T::zero()) {
            return Err(Error::InvalidParams {
                reason: format!("omega must be positive, got {omega}"),
            });
        }
        Ok(Self {
            mu,
            epsilon,
            omega,
            degenerate: true,
        })
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// `None` only in the degenerate `mu = 0` case.
    pub fn sign_case(&self) -> Option<SignCase> {
        if self.mu < T::zero() {
            Some(SignCase::NegativeMu)
        } else if self.mu > T::zero() {
            Some(SignCase::PositiveMu)
        } else {
            None
        }
    }

    /// The canonical field `f(s, u) = omega^-2 * (u + mu*u^2 - eps*cos(s))`.
    pub fn eval_field(&self, s: T, u: T) -> T {
        (u + self.mu * u * u - self.epsilon * s.cos()) / (self.omega * self.omega)
    }

    /// Partial derivative of the field in `u`: `omega^-2 * (1 + 2*mu*u)`.
    pub fn eval_field_du(&self, u: T) -> T {
        let two = real::<T>(2.0);
        (T::one() + two * self.mu * u) / (self.omega * self.omega)
    }

    /// Period `tau = 2*pi/omega` of the sought solution in the original
    /// time variable; the canonical problem always has period 2*pi.
    pub fn period(&self) -> T {
        T::TAU() / self.omega
    }

    /// Maps `(mu, eps, omega)` to `(-mu, -eps, omega)`; its own inverse.
    ///
    /// `u` solves the original problem iff `-u` solves the reflected one,
    /// which reduces the `mu > 0` negative-solution case to `mu < 0`.
    pub fn reflect(&self) -> Self {
        Self {
            mu: -self.mu,
            epsilon: -self.epsilon,
            omega: self.omega,
            degenerate: self.degenerate,
        }
    }
}

/// A candidate lower/upper solution sampled on `n` equispaced points of
/// `[0, 2*pi)`, together with its second derivative on the same grid and
/// the one-sided first derivatives at `0` and `2*pi`.
///
/// Periodic storage makes the endpoint value comparison `c(0) = c(2*pi)`
/// structural; the derivative comparison is kept explicit because lower and
/// upper solutions are allowed a corner there.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateFunction<T: Real> {
    values: Vec<T>,
    second_derivative: Vec<T>,
    endpoint_derivatives: (T, T),
}

impl<T: Real> CandidateFunction<T> {
    /// Builds a candidate from samples; endpoint derivatives come from
    /// one-sided 4th-order finite differences (exact on constants).
    pub fn new(values: Vec<T>, second_derivative: Vec<T>) -> Result<Self, Error<T>> {
        Self::validate(&values, &second_derivative)?;
        let endpoint_derivatives = one_sided_endpoint_derivatives(&values);
        Ok(Self {
            values,
            second_derivative,
            endpoint_derivatives,
        })
    }

    /// Like [`CandidateFunction::new`] but with caller-supplied one-sided
    /// derivatives, for candidates with a genuine corner at the seam.
    pub fn with_endpoint_derivatives(
        values: Vec<T>,
        second_derivative: Vec<T>,
        at_zero: T,
        at_two_pi: T,
    ) -> Result<Self, Error<T>> {
        Self::validate(&values, &second_derivative)?;
        Ok(Self {
            values,
            second_derivative,
            endpoint_derivatives: (at_zero, at_two_pi),
        })
    }

    pub fn constant(value: T, n: usize) -> Result<Self, Error<T>> {
        Self::new(vec![value; n], vec![T::zero(); n])
    }

    fn validate(values: &[T], second_derivative: &[T]) -> Result<(), Error<T>> {
        if values.len() < 4 {
            return Err(Error::ShapeError { n: values.len() });
        }
        if values.len() != second_derivative.len() {
            return Err(Error::ShapeError {
                n: second_derivative.len(),
            });
        }
        Ok(())
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn second_derivative(&self) -> &[T] {
        &self.second_derivative
    }

    pub fn endpoint_derivatives(&self) -> (T, T) {
        self.endpoint_derivatives
    }

    fn grid_point(&self, j: usize) -> T {
        T::TAU() * real::<T>(j as f64) / real::<T>(self.values.len() as f64)
    }

    /// `true` iff `-c'' <= f(s, c) + slack` at every grid point and
    /// `c'(0) >= c'(2*pi) - slack`.
    pub fn is_lower_solution(&self, params: &ProblemParams<T>, slack: T) -> bool {
        let pointwise = self
            .values
            .iter()
            .zip(&self.second_derivative)
            .enumerate()
            .all(|(j, (&v, &d2))| -d2 <= params.eval_field(self.grid_point(j), v) + slack);
        let (d0, d1) = self.endpoint_derivatives;
        pointwise && d0 >= d1 - slack
    }

    /// Mirror of [`CandidateFunction::is_lower_solution`] with all
    /// inequalities reversed.
    pub fn is_upper_solution(&self, params: &ProblemParams<T>, slack: T) -> bool {
        let pointwise = self
            .values
            .iter()
            .zip(&self.second_derivative)
            .enumerate()
            .all(|(j, (&v, &d2))| -d2 >= params.eval_field(self.grid_point(j), v) - slack);
        let (d0, d1) = self.endpoint_derivatives;
        pointwise && d0 <= d1 + slack
    }
}

/// One-sided 4th-order first derivatives at `0` (forward) and `2*pi`
/// (backward, wrapping through `c(2*pi) = c(0)`).
fn one_sided_endpoint_derivatives<T: Real>(values: &[T]) -> (T, T) {
    let n = values.len();
    let h = T::TAU() / real::<T>(n as f64);
    if n < 5 {
        // 2nd-order fallback for the minimum grid.
        let fwd = (-real::<T>(1.5) * values[0] + real::<T>(2.0) * values[1]
            - real::<T>(0.5) * values[2])
            / h;
        let bwd = (real::<T>(1.5) * values[0] - real::<T>(2.0) * values[n - 1]
            + real::<T>(0.5) * values[n - 2])
            / h;
        return (fwd, bwd);
    }
    let c = [-25.0, 48.0, -36.0, 16.0, -3.0].map(real::<T>);
    let twelve = real::<T>(12.0);
    let fwd = (c[0] * values[0]
        + c[1] * values[1]
        + c[2] * values[2]
        + c[3] * values[3]
        + c[4] * values[4])
        / (twelve * h);
    // Backward stencil at 2*pi uses samples 2*pi - k*h = values[n - k] and
    // the wrapped endpoint values[0].
    let bwd = -(c[0] * values[0]
        + c[1] * values[n - 1]
        + c[2] * values[n - 2]
        + c[3] * values[n - 3]
        + c[4] * values[n - 4])
        / (twelve * h);
    (fwd, bwd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn params(mu: f64, eps: f64, omega: f64) -> ProblemParams<f64> {
        ProblemParams::new(mu, eps, omega).unwrap()
    }

    #[test]
    fn field_values() {
        assert_abs_diff_eq!(
            params(-0.1, 1.0, 1.0).eval_field(0.0, 0.0),
            -1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            params(-0.1, 1.0, 2.0).eval_field(FRAC_PI_2, 2.0),
            0.4,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            params(1.0, 1.0, 1.0).eval_field(PI, 1.0),
            3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn field_derivative_values() {
        assert_abs_diff_eq!(
            params(-0.3, 1.0, 1.0).eval_field_du(0.0),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            params(-0.1, 1.0, 1.0).eval_field_du(10.0),
            -1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            params(0.2, 1.0, 2.0).eval_field_du(5.0),
            0.75,
            epsilon = 1e-15
        );
    }

    #[test]
    fn field_derivative_matches_finite_difference() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let p = params(
                rng.random_range(-1.0..-0.01),
                rng.random_range(0.05..1.0),
                rng.random_range(0.5..3.0),
            );
            let s: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let u: f64 = rng.random_range(-12.0..12.0);
            let h = 1e-6;
            let fd = (p.eval_field(s, u + h) - p.eval_field(s, u - h)) / (2.0 * h);
            let exact = p.eval_field_du(u);
            assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn period_values() {
        assert_abs_diff_eq!(params(-0.1, 1.0, 1.0).period(), 2.0 * PI, epsilon = 1e-15);
        assert_abs_diff_eq!(params(-0.1, 1.0, 2.0).period(), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(params(-0.1, 1.0, 0.5).period(), 4.0 * PI, epsilon = 1e-15);
    }

    #[test]
    fn parameter_validation() {
        assert!(ProblemParams::new(-0.1, 1.0, 0.0).is_err());
        assert!(ProblemParams::new(-0.1, 1.0, -2.0).is_err());
        assert!(ProblemParams::new(0.0, 1.0, 1.0).is_err());
        assert!(ProblemParams::new(-0.1, 0.0, 1.0).is_err());
        assert!(ProblemParams::degenerate(0.0, 0.0, 1.0).is_ok());
        assert!(ProblemParams::degenerate(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn sign_case_matches_mu() {
        assert_eq!(
            params(-0.1, 1.0, 1.0).sign_case(),
            Some(SignCase::NegativeMu)
        );
        assert_eq!(
            params(0.1, 1.0, 1.0).sign_case(),
            Some(SignCase::PositiveMu)
        );
        assert_eq!(
            ProblemParams::degenerate(0.0, 1.0, 1.0)
                .unwrap()
                .sign_case(),
            None
        );
    }

    #[test]
    fn reflect_is_involution() {
        let p = params(0.2, -0.5, 2.0);
        let q = p.reflect();
        assert_eq!((q.mu(), q.epsilon(), q.omega()), (-0.2, 0.5, 2.0));
        assert_eq!(q.reflect(), p);
        let r = params(0.1, 1.0, 1.0).reflect();
        assert_eq!((r.mu(), r.epsilon(), r.omega()), (-0.1, -1.0, 1.0));
    }

    #[test]
    fn constant_lower_solution_at_root() {
        // a2 for (mu, eps) = (-0.1, 1): f(s, a2) >= 0 for every s.
        let p = params(-0.1, 1.0, 1.0);
        let a2 = 1.1270167;
        let c = CandidateFunction::constant(a2, 64).unwrap();
        assert!(c.is_lower_solution(&p, 1e-6));
        let low = CandidateFunction::constant(0.05, 64).unwrap();
        assert!(!low.is_lower_solution(&p, 1e-9));
    }

    #[test]
    fn constant_upper_solution_at_root() {
        let p = params(-0.1, 1.0, 1.0);
        let b1 = 10.9160798;
        let c = CandidateFunction::constant(b1, 64).unwrap();
        assert!(c.is_upper_solution(&p, 1e-6));
        let mid = CandidateFunction::constant(5.0, 64).unwrap();
        assert!(!mid.is_upper_solution(&p, 1e-9));
    }

    #[test]
    fn degenerate_zero_field_predicates() {
        // mu = eps = 0: f(s, c) = c/omega^2, so a constant is a lower
        // solution iff c >= 0 and an upper solution iff c <= 0.
        let p = ProblemParams::degenerate(0.0, 0.0, 1.0).unwrap();
        let pos = CandidateFunction::constant(0.25, 16).unwrap();
        let neg = CandidateFunction::constant(-0.25, 16).unwrap();
        let zero = CandidateFunction::constant(0.0, 16).unwrap();
        assert!(pos.is_lower_solution(&p, 0.0) && !pos.is_upper_solution(&p, 1e-12));
        assert!(neg.is_upper_solution(&p, 0.0) && !neg.is_lower_solution(&p, 1e-12));
        assert!(zero.is_lower_solution(&p, 0.0) && zero.is_upper_solution(&p, 0.0));
        // eps = 0 upper-solution example: beta == 0 has f(s, 0) = 0.
        let q = ProblemParams::degenerate(-0.1, 0.0, 1.0).unwrap();
        assert!(zero.is_upper_solution(&q, 0.0));
    }

    #[test]
    fn endpoint_derivative_stencil_is_exact_on_cubics() {
        // The 4th-order one-sided stencil reproduces polynomial slopes.
        let n = 64;
        let h = std::f64::consts::TAU / n as f64;
        let poly = |x: f64| 1.0 + 2.0 * x - 0.5 * x * x + 0.125 * x * x * x;
        let dpoly = |x: f64| 2.0 - x + 0.375 * x * x;
        let values: Vec<f64> = (0..n).map(|j| poly(j as f64 * h)).collect();
        let (fwd, _) = one_sided_endpoint_derivatives(&values);
        assert_abs_diff_eq!(fwd, dpoly(0.0), epsilon = 1e-9);
    }

    #[test]
    fn corner_candidate_respects_derivative_inequality() {
        // Zero field and zero values: only the seam derivatives decide.
        let p = ProblemParams::degenerate(0.0, 0.0, 1.0).unwrap();
        let n = 16;
        let vals = vec![0.0; n];
        let d2 = vec![0.0; n];
        // Lower solutions need c'(0) >= c'(2*pi).
        let lower =
            CandidateFunction::with_endpoint_derivatives(vals.clone(), d2.clone(), 1.0, -1.0)
                .unwrap();
        assert!(lower.is_lower_solution(&p, 0.0));
        assert!(!lower.is_upper_solution(&p, 1e-9));
        let upper = CandidateFunction::with_endpoint_derivatives(vals, d2, -1.0, 1.0).unwrap();
        assert!(upper.is_upper_solution(&p, 0.0));
        assert!(!upper.is_lower_solution(&p, 1e-9));
    }

    #[test]
    fn candidate_shape_checks() {
        assert!(CandidateFunction::constant(1.0, 3).is_err());
        assert!(CandidateFunction::new(vec![0.0; 8], vec![0.0; 7]).is_err());
    }

    #[test]
    fn field_generic_over_f32() {
        let p = ProblemParams::<f32>::new(-0.1, 1.0, 1.0).unwrap();
        assert!((p.eval_field(0.0, 0.0) + 1.0).abs() < 1e-6);
        assert!((p.eval_field_du(10.0) + 1.0).abs() < 1e-5);
    }
}
