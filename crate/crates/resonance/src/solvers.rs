//! The constructive solvers: a shift-inverted monotone iteration between
//! the certified barriers, and an independent Newton collocation solver
//! for cross-validation.
//!
//! The monotone scheme iterates
//! `u_{n+1} = (-d^2/ds^2 + lambda)^{-1} (f(., u_n) + lambda*u_n)`
//! with `lambda` large enough that `f(s, u) + lambda*u` is nondecreasing in
//! `u` on the bracket; iterates from the lower barrier ascend, iterates
//! from the upper barrier descend, and both limits solve the problem.

use crate::barriers::{BarrierCertificate, Bracket};
use crate::error::Error;
use crate::model::ProblemParams;
use crate::spectral::{sup_diff, PeriodicFunction};
use crate::verify;
use crate::{real, Real};
use nalgebra::{DMatrix, DVector, RealField};
use num_traits::Float;

/// Which barrier the monotone run starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Start at the lower constant; iterates are pointwise nondecreasing.
    Ascending,
    /// Start at the upper constant; iterates are pointwise nonincreasing.
    Descending,
}

/// Which solver produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    MonotoneAscending,
    MonotoneDescending,
    Newton,
}

impl SolverKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverKind::MonotoneAscending => "monotone-ascending",
            SolverKind::MonotoneDescending => "monotone-descending",
            SolverKind::Newton => "newton",
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Discretization size, shift, tolerances and iteration caps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T: Real> {
    /// Grid size; power of two >= 8.
    pub n_grid: usize,
    /// Shift for the monotone iteration; `None` derives it from the bracket
    /// via [`choose_lambda`].
    pub lambda: Option<T>,
    /// Sup-norm step tolerance that declares the iteration converged.
    pub iterate_tol: T,
    /// Refined-grid residual bound that confirms it.
    pub residual_tol: T,
    pub max_iter_monotone: usize,
    pub max_iter_newton: usize,
    /// Pointwise monotonicity violations up to this are warnings, not
    /// failures: the spectral discretization has no exact discrete maximum
    /// principle.
    pub monotonicity_slack: T,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            n_grid: 128,
            lambda: None,
            iterate_tol: real(1e-10),
            residual_tol: real(1e-8),
            max_iter_monotone: 10_000,
            max_iter_newton: 50,
            monotonicity_slack: real(1e-9),
        }
    }
}

/// Per-run diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace<T: Real> {
    /// `||u_{n+1} - u_n||_inf` per iteration.
    pub step_norms: Vec<T>,
    /// Largest pointwise decrease seen along an ascending run (increase
    /// along a descending run); zero for Newton.
    pub monotone_violation: T,
    pub iterations: usize,
}

impl<T: Real> IterationTrace<T> {
    fn new() -> Self {
        Self {
            step_norms: Vec::new(),
            monotone_violation: T::zero(),
            iterations: 0,
        }
    }

    pub fn final_step(&self) -> Option<T> {
        self.step_norms.last().copied()
    }
}

/// Shift making `f(s, u) + lambda*u` nondecreasing on `[-radius, radius]`:
/// `lambda = omega^-2 * (1 + 2|mu|*radius)`, which exceeds `-min f_u` by at
/// least `2*omega^-2` there, so `f_u + lambda > 0` strictly.
pub(crate) fn shift_for_radius<T: Real>(params: &ProblemParams<T>, radius: T) -> T {
    (T::one() + real::<T>(2.0) * params.mu().abs() * radius) / (params.omega() * params.omega())
}

/// The default shift for a certified bracket, sized by its upper constant.
pub fn choose_lambda<T: Real>(cert: &BarrierCertificate<T>, params: &ProblemParams<T>) -> T {
    shift_for_radius(params, cert.upper)
}

/// Runs the monotone iteration from `start` until the sup-norm step drops
/// below `iterate_tol`, then confirms convergence with the refined-grid
/// residual; both must pass.
///
/// Iterates are guarded to `[bracket.lo - 0.1, bracket.hi + 0.1]`, expanded
/// if the supplied start lies outside the bracket (any verified lower/upper
/// solution is a legal start, not just the barrier constants).
pub fn monotone_iterate<T: Real>(
    start: &PeriodicFunction<T>,
    direction: Direction,
    params: &ProblemParams<T>,
    bracket: &Bracket<T>,
    config: &SolverConfig<T>,
) -> Result<(PeriodicFunction<T>, IterationTrace<T>), Error<T>> {
    let lambda = match config.lambda {
        Some(l) => l,
        None => shift_for_radius(params, bracket.hi),
    };
    if !(lambda > T::zero()) {
        return Err(Error::NonPositiveShift { lambda });
    }
    let margin = real::<T>(0.1);
    let guard_lo = bracket.lo.min(start.min_value()) - margin;
    let guard_hi = bracket.hi.max(start.max_value()) + margin;

    let mut u = start.clone();
    let mut trace = IterationTrace::new();
    for iteration in 1..=config.max_iter_monotone {
        let rhs = u.map_with_grid(|s, v| params.eval_field(s, v) + lambda * v);
        let next = rhs.solve_shifted(lambda)?;

        let step = sup_diff(next.values(), u.values());
        trace.step_norms.push(step);
        trace.iterations = iteration;

        let violation =
            u.values()
                .iter()
                .zip(next.values())
                .fold(T::zero(), |acc, (&prev, &cur)| match direction {
                    Direction::Ascending => acc.max(prev - cur),
                    Direction::Descending => acc.max(cur - prev),
                });
        trace.monotone_violation = trace.monotone_violation.max(violation);

        if next.min_value() < guard_lo {
            return Err(Error::BracketEscape {
                iteration,
                value: next.min_value(),
            });
        }
        if next.max_value() > guard_hi {
            return Err(Error::BracketEscape {
                iteration,
                value: next.max_value(),
            });
        }

        u = next;
        if step < config.iterate_tol {
            let residual = verify::residual_norm(&u, params, 2);
            if residual <= config.residual_tol {
                return Ok((u, trace));
            }
            return Err(Error::NoConvergence { trace });
        }
    }
    Err(Error::NoConvergence { trace })
}

/// Newton iteration on the collocation residual
/// `rho(u) = u'' + omega^-2 (u + mu*u^2 - eps*cos s)`, with Jacobian
/// `D2 + diag(f_u(s, u))` factorized densely. Success requires the final
/// grid residual to reach `1e-10` in sup-norm.
pub fn newton_solve<T: Real + RealField>(
    init: &PeriodicFunction<T>,
    params: &ProblemParams<T>,
    config: &SolverConfig<T>,
) -> Result<(PeriodicFunction<T>, IterationTrace<T>), Error<T>> {
    let n = init.n();
    let d2 = second_derivative_matrix::<T>(n);
    let tol = real::<T>(NEWTON_RESIDUAL_TOL);

    let mut u = init.clone();
    let mut trace = IterationTrace::new();
    loop {
        if trace.iterations >= config.max_iter_newton {
            return Err(Error::NoConvergence { trace });
        }
        let rho = residual_values(&u, params);

        let mut jac = d2.clone();
        for j in 0..n {
            jac[(j, j)] += params.eval_field_du(u.values()[j]);
        }
        let rhs = DVector::from_iterator(n, rho.iter().map(|&r| -r));
        let delta = solve_dense(jac, rhs)?;

        let next = PeriodicFunction::from_values(
            u.values()
                .iter()
                .zip(delta.iter())
                .map(|(&v, &d)| v + d)
                .collect(),
        )
        .expect("grid size unchanged");
        let step = sup_diff(next.values(), u.values());
        trace.step_norms.push(step);
        trace.iterations += 1;
        u = next;

        let residual = sup_abs(&residual_values(&u, params));
        if residual <= tol {
            return Ok((u, trace));
        }
    }
}

const NEWTON_RESIDUAL_TOL: f64 = 1e-10;

/// Condition-estimate threshold above which the Jacobian is reported
/// singular.
const SINGULAR_CONDITION: f64 = 1e12;

fn residual_values<T: Real>(u: &PeriodicFunction<T>, params: &ProblemParams<T>) -> Vec<T> {
    u.second_derivative()
        .values()
        .iter()
        .enumerate()
        .map(|(j, &d2)| d2 + params.eval_field(u.grid_point(j), u.values()[j]))
        .collect()
}

fn sup_abs<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
}

/// Dense spectral second-derivative matrix, built column by column through
/// the same transform path the residual uses.
fn second_derivative_matrix<T: Real>(n: usize) -> DMatrix<T> {
    let mut d2 = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut unit = vec![T::zero(); n];
        unit[j] = T::one();
        let column = PeriodicFunction::from_values(unit)
            .expect("grid validated by caller")
            .second_derivative();
        for i in 0..n {
            d2[(i, j)] = column.values()[i];
        }
    }
    d2
}

/// LU solve with a cheap condition estimate from the pivot magnitudes.
fn solve_dense<T: Real + RealField>(
    matrix: DMatrix<T>,
    rhs: DVector<T>,
) -> Result<DVector<T>, Error<T>> {
    let lu = matrix.lu();
    let diag = lu.u().diagonal();
    let mut d_max = T::zero();
    let mut d_min = <T as Float>::infinity();
    for d in diag.iter() {
        let a = Float::abs(*d);
        d_max = Float::max(d_max, a);
        d_min = Float::min(d_min, a);
    }
    let condition = if d_min > T::zero() {
        d_max / d_min
    } else {
        <T as Float>::infinity()
    };
    if !(condition < real::<T>(SINGULAR_CONDITION)) {
        return Err(Error::SingularJacobian { condition });
    }
    lu.solve(&rhs).ok_or(Error::SingularJacobian { condition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barriers::compute_barriers;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn degenerate_unforced() -> ProblemParams<f64> {
        ProblemParams::degenerate(-0.1, 0.0, 1.0).unwrap()
    }

    #[test]
    fn lambda_reference_values() {
        let p = ProblemParams::new(-0.1, 1.0, 1.0).unwrap();
        let cert = compute_barriers(&p, None, None).unwrap();
        assert_abs_diff_eq!(choose_lambda(&cert, &p), 3.1832160, epsilon = 1e-7);

        let p = ProblemParams::new(-0.25, 0.5, 1.0).unwrap();
        let cert = compute_barriers(&p, None, None).unwrap();
        assert_abs_diff_eq!(choose_lambda(&cert, &p), 3.2247449, epsilon = 1e-7);

        let p = ProblemParams::new(-0.1, 1.0, 2.0).unwrap();
        let cert = compute_barriers(&p, None, None).unwrap();
        assert_abs_diff_eq!(choose_lambda(&cert, &p), 0.7958040, epsilon = 1e-7);
    }

    #[test]
    fn lambda_keeps_shifted_field_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = ProblemParams::new(-0.2, 0.8, 1.3).unwrap();
        let cert = compute_barriers(&p, None, None).unwrap();
        let lambda = choose_lambda(&cert, &p);
        for _ in 0..1000 {
            let u = rng.random_range(-cert.upper..cert.upper);
            assert!(p.eval_field_du(u) + lambda > 0.0);
        }
    }

    #[test]
    fn monotone_finds_unforced_equilibrium_from_below() {
        let p = degenerate_unforced();
        let start = PeriodicFunction::constant(5.0, 128).unwrap();
        let bracket = Bracket::new(0.0, 10.0);
        let (u, trace) = monotone_iterate(
            &start,
            Direction::Ascending,
            &p,
            &bracket,
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(sup_diff(u.values(), &vec![10.0; 128]) < 1e-9);
        assert!(trace.final_step().unwrap() < 1e-10);
        assert!(trace.monotone_violation <= 1e-9);
    }

    #[test]
    fn monotone_finds_unforced_equilibrium_from_above() {
        let p = degenerate_unforced();
        let start = PeriodicFunction::constant(12.0, 128).unwrap();
        let bracket = Bracket::new(0.0, 10.0);
        let (u, trace) = monotone_iterate(
            &start,
            Direction::Descending,
            &p,
            &bracket,
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(sup_diff(u.values(), &vec![10.0; 128]) < 1e-9);
        assert!(trace.monotone_violation <= 1e-9);
    }

    #[test]
    fn monotone_descending_tracks_perturbation_oracle() {
        let p = ProblemParams::new(-0.1, 0.1, 1.0).unwrap();
        let cert = compute_barriers(&p, None, None).unwrap();
        assert_abs_diff_eq!(cert.b1, 10.0990195, epsilon = 1e-7);
        let start = PeriodicFunction::constant(cert.b1, 128).unwrap();
        let (u, _) = monotone_iterate(
            &start,
            Direction::Descending,
            &p,
            &cert.bracket(),
            &SolverConfig::default(),
        )
        .unwrap();
        let oracle: Vec<f64> = (0..128)
            .map(|j| 10.0 - 0.05 * u.grid_point(j).cos())
            .collect();
        assert!(sup_diff(u.values(), &oracle) < 5e-3);
    }

    #[test]
    fn monotone_reports_no_convergence_with_trace() {
        let p = degenerate_unforced();
        let start = PeriodicFunction::constant(5.0, 128).unwrap();
        let bracket = Bracket::new(0.0, 10.0);
        let config = SolverConfig {
            max_iter_monotone: 3,
            ..SolverConfig::default()
        };
        match monotone_iterate(&start, Direction::Ascending, &p, &bracket, &config) {
            Err(Error::NoConvergence { trace }) => {
                assert_eq!(trace.iterations, 3);
                assert_eq!(trace.step_norms.len(), 3);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn undersized_shift_escapes_bracket() {
        let p = ProblemParams::new(-0.1, 1.0, 1.0).unwrap();
        let cert = compute_barriers(&p, None, None).unwrap();
        let start = PeriodicFunction::constant(cert.upper, 128).unwrap();
        let config = SolverConfig {
            lambda: Some(0.01),
            ..SolverConfig::default()
        };
        match monotone_iterate(&start, Direction::Descending, &p, &cert.bracket(), &config) {
            Err(Error::BracketEscape { .. }) => {}
            other => panic!("expected BracketEscape, got {other:?}"),
        }
    }

    #[test]
    fn shift_must_be_positive() {
        let p = degenerate_unforced();
        let start = PeriodicFunction::constant(5.0, 16).unwrap();
        let config = SolverConfig {
            lambda: Some(-1.0),
            ..SolverConfig::default()
        };
        assert!(matches!(
            monotone_iterate(
                &start,
                Direction::Ascending,
                &p,
                &Bracket::new(0.0, 10.0),
                &config
            ),
            Err(Error::NonPositiveShift { .. })
        ));
    }

    #[test]
    fn newton_confirms_exact_equilibrium() {
        let p = degenerate_unforced();
        let init = PeriodicFunction::constant(10.0, 64).unwrap();
        let (u, trace) = newton_solve(&init, &p, &SolverConfig::default()).unwrap();
        assert!(trace.iterations <= 2);
        assert!(sup_diff(u.values(), &vec![10.0; 64]) < 1e-10);
    }

    #[test]
    fn newton_agrees_with_monotone_descending() {
        let p = ProblemParams::new(-0.1, 0.1, 1.0).unwrap();
        let cert = compute_barriers(&p, None, None).unwrap();
        let start = PeriodicFunction::constant(cert.upper, 128).unwrap();
        let config = SolverConfig::default();
        let (monotone, _) =
            monotone_iterate(&start, Direction::Descending, &p, &cert.bracket(), &config).unwrap();
        let seed = PeriodicFunction::sample(128, |s: f64| 10.0 - 0.05 * s.cos()).unwrap();
        let (newton, _) = newton_solve(&seed, &p, &config).unwrap();
        assert!(sup_diff(newton.values(), monotone.values()) < 1e-6);

        // Seeding Newton with the monotone limit is a fixed-point check.
        let (confirm, _) = newton_solve(&monotone, &p, &config).unwrap();
        assert!(sup_diff(confirm.values(), monotone.values()) < 1e-8);
    }

    #[test]
    fn newton_hits_resonant_singularity_at_zero() {
        // Linearizing at u = 0 with omega = 1 gives symbol 1 - k^2, which
        // vanishes at |k| = 1.
        let p = ProblemParams::new(-0.1, 0.1, 1.0).unwrap();
        let init = PeriodicFunction::constant(0.0, 128).unwrap();
        match newton_solve(&init, &p, &SolverConfig::default()) {
            Err(Error::SingularJacobian { condition }) => assert!(condition > 1e12),
            other => panic!("expected SingularJacobian, got {other:?}"),
        }
    }

    #[test]
    fn monotone_brackets_and_sandwich_on_reference_instance() {
        let p = ProblemParams::new(-0.1, 1.0, 1.0).unwrap();
        let cert = compute_barriers(&p, None, None).unwrap();
        let config = SolverConfig::default();
        let lower_start = PeriodicFunction::constant(cert.lower, 128).unwrap();
        let upper_start = PeriodicFunction::constant(cert.upper, 128).unwrap();
        let (lo, _) = monotone_iterate(
            &lower_start,
            Direction::Ascending,
            &p,
            &cert.bracket(),
            &config,
        )
        .unwrap();
        let (hi, _) = monotone_iterate(
            &upper_start,
            Direction::Descending,
            &p,
            &cert.bracket(),
            &config,
        )
        .unwrap();
        assert!(lo.min_value() >= cert.lower - 1e-9);
        assert!(hi.max_value() <= cert.upper + 1e-9);
        for (a, b) in lo.values().iter().zip(hi.values()) {
            assert!(a <= &(b + 1e-8), "sandwich violated: {a} > {b}");
        }
        assert!(lo.min_value() > 0.0);
    }

    #[test]
    fn monotone_f32_smoke() {
        let p = ProblemParams::<f32>::degenerate(-0.1, 0.0, 1.0).unwrap();
        let start = PeriodicFunction::constant(5.0f32, 32).unwrap();
        let config = SolverConfig {
            iterate_tol: 1e-5,
            residual_tol: 1e-3,
            ..SolverConfig::default()
        };
        let (u, _) = monotone_iterate(
            &start,
            Direction::Ascending,
            &p,
            &Bracket::new(0.0, 10.0),
            &config,
        )
        .unwrap();
        assert!(sup_diff(u.values(), &[10.0f32; 32]) < 1e-3);
    }
}
