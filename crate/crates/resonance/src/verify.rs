//! Independent post-hoc verification of everything a solve claims:
//! residual norms on a refined grid, bracket containment, the sign of the
//! solution, the forcing-sign symmetry, and the back-transform to the
//! original time variable.

use crate::barriers::{BarrierCertificate, Bracket};
use crate::error::Error;
use crate::model::{ProblemParams, SignCase};
use crate::solvers::{SolverConfig, SolverKind};
use crate::spectral::{grid_point, PeriodicFunction};
use crate::{pipeline, real, Real};

/// Tolerance on bracket containment and the sign claim.
pub const CLAIM_TOLERANCE: f64 = 1e-8;

/// Everything a single solver run claims, with the verification flags
/// recomputed here rather than trusted from the solver.
///
/// The certificate and bracket always refer to the `mu < 0` form of the
/// problem; for `SignCase::PositiveMu` the stored solution is the negated
/// reflected one, expressed in the original variables.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionReport<T: Real> {
    pub params: ProblemParams<T>,
    pub sign_case: SignCase,
    pub cert: Option<BarrierCertificate<T>>,
    pub bracket: Bracket<T>,
    pub solution: PeriodicFunction<T>,
    pub residual_sup: T,
    pub residual_sup_refined: T,
    pub min_u: T,
    pub max_u: T,
    pub bracket_ok: bool,
    pub positivity_ok: bool,
    pub iterations: usize,
    pub solver: SolverKind,
    pub degenerate_mode: bool,
}

impl<T: Real> SolutionReport<T> {
    /// Builds the report for a solution expressed in the original problem's
    /// variables, recomputing residuals, extrema and claim flags.
    pub fn assemble(
        params: &ProblemParams<T>,
        sign_case: SignCase,
        cert: Option<BarrierCertificate<T>>,
        bracket: Bracket<T>,
        solution: PeriodicFunction<T>,
        iterations: usize,
        solver: SolverKind,
    ) -> Self {
        let residual_sup = residual_norm(&solution, params, 1);
        let residual_sup_refined = residual_norm(&solution, params, 2);
        let min_u = solution.min_value();
        let max_u = solution.max_value();
        let tol = real::<T>(CLAIM_TOLERANCE);
        let bracket_ok = match sign_case {
            SignCase::NegativeMu => bracket.lo - tol <= min_u && max_u <= bracket.hi + tol,
            SignCase::PositiveMu => -bracket.hi - tol <= min_u && max_u <= -bracket.lo + tol,
        };
        let mut report = Self {
            params: *params,
            sign_case,
            cert,
            bracket,
            solution,
            residual_sup,
            residual_sup_refined,
            min_u,
            max_u,
            bracket_ok,
            positivity_ok: false,
            iterations,
            solver,
            degenerate_mode: params.is_degenerate(),
        };
        report.positivity_ok = check_sign_claim(&report);
        report
    }
}

/// Sup-norm of the canonical-equation defect
/// `u'' + omega^-2 (u + mu*u^2 - eps*cos s)`, evaluated on a
/// `refine * N` grid through the Fourier coefficients.
pub fn residual_norm<T: Real>(
    u: &PeriodicFunction<T>,
    params: &ProblemParams<T>,
    refine: usize,
) -> T {
    assert!(matches!(refine, 1 | 2 | 4), "refine must be 1, 2, or 4");
    let fine_u = u
        .resample(refine)
        .expect("refined grid stays a power of two");
    let fine_d2 = u
        .second_derivative()
        .resample(refine)
        .expect("refined grid stays a power of two");
    let m = fine_u.len();
    fine_d2
        .iter()
        .zip(&fine_u)
        .enumerate()
        .fold(T::zero(), |acc, (j, (&d2, &v))| {
            acc.max((d2 + params.eval_field(grid_point(j, m), v)).abs())
        })
}

/// The solution carried back to the original time variable `t = s/omega`
/// on one period `[0, tau)`, with `u_tt = omega^2 * u_ss`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeDomainSolution<T: Real> {
    pub t: Vec<T>,
    pub values: Vec<T>,
    pub second_derivative: Vec<T>,
}

pub fn back_transform<T: Real>(
    u: &PeriodicFunction<T>,
    params: &ProblemParams<T>,
) -> TimeDomainSolution<T> {
    let omega = params.omega();
    let omega2 = omega * omega;
    TimeDomainSolution {
        t: (0..u.n()).map(|j| u.grid_point(j) / omega).collect(),
        values: u.values().to_vec(),
        second_derivative: u
            .second_derivative()
            .values()
            .iter()
            .map(|&d| omega2 * d)
            .collect(),
    }
}

impl<T: Real> TimeDomainSolution<T> {
    /// Sup-norm defect of the original equation
    /// `u_tt + u + mu*u^2 - eps*cos(omega*t)`.
    pub fn residual_sup(&self, params: &ProblemParams<T>) -> T {
        let (mu, eps, omega) = (params.mu(), params.epsilon(), params.omega());
        self.t
            .iter()
            .zip(&self.values)
            .zip(&self.second_derivative)
            .fold(T::zero(), |acc, ((&t, &u), &utt)| {
                acc.max((utt + u + mu * u * u - eps * (omega * t).cos()).abs())
            })
    }
}

/// Checks the certified sign conclusion: `min u >= r - 1e-8 > 0` for the
/// `mu < 0` case, `max u <= -r + 1e-8 < 0` for `mu > 0` via reflection.
pub fn check_sign_claim<T: Real>(report: &SolutionReport<T>) -> bool {
    let tol = real::<T>(CLAIM_TOLERANCE);
    match report.sign_case {
        SignCase::NegativeMu => report.min_u >= report.bracket.lo - tol,
        SignCase::PositiveMu => report.max_u <= -report.bracket.lo + tol,
    }
}

/// Solves the problem for `eps` and for `-eps` on the descending branch and
/// returns `sup_s |u_{-eps}(s) - u_{eps}(s + pi)|`.
///
/// `cos(s + pi) = -cos(s)`, so the two fields coincide under a half-period
/// shift; a small discrepancy is the computational content of the claim
/// that the sign of `eps` is immaterial.
pub fn phase_shift_symmetry<T: Real>(
    params: &ProblemParams<T>,
    config: &SolverConfig<T>,
) -> Result<T, Error<T>> {
    let base = match params.sign_case() {
        Some(SignCase::PositiveMu) => params.reflect(),
        Some(SignCase::NegativeMu) => *params,
        None => {
            return Err(Error::InvalidParams {
                reason: "phase-shift symmetry needs mu != 0".into(),
            })
        }
    };
    let flipped = if base.is_degenerate() {
        ProblemParams::degenerate(base.mu(), -base.epsilon(), base.omega())?
    } else {
        ProblemParams::new(base.mu(), -base.epsilon(), base.omega())?
    };

    let plus = pipeline::solve_descending(&base, config)?;
    let minus = pipeline::solve_descending(&flipped, config)?;

    let n = plus.n();
    let shifted = plus.values();
    let discrepancy = minus
        .values()
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (j, &v)| {
            acc.max((v - shifted[(j + n / 2) % n]).abs())
        });
    Ok(discrepancy)
}
