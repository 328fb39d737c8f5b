//! End-to-end certified solves: certificate, shift, both monotone branches,
//! Newton confirmation, and the assembled verification reports.
//!
//! The `mu > 0` regime is reduced to `mu < 0` by reflection here; solutions
//! are negated back so every report speaks about the original problem. The
//! degenerate `eps = 0` mode replaces the certificate with the exact
//! bracket `[0, -1/mu]` formed by the two unforced equilibria.

use crate::barriers::{
    compute_barriers, verify_barrier_signs, BarrierCertificate, BarrierSignReport, Bracket,
};
use crate::error::Error;
use crate::model::{ProblemParams, SignCase};
use crate::solvers::{
    choose_lambda, monotone_iterate, newton_solve, shift_for_radius, Direction, SolverConfig,
    SolverKind,
};
use crate::spectral::{sup_diff, PeriodicFunction};
use crate::verify::SolutionReport;
use crate::{real, Real};
use nalgebra::RealField;
use num_traits::Float;

/// Sup-norm tolerance for the ascending/descending sandwich and for the
/// Newton fixed-point confirmation.
pub const AGREEMENT_TOLERANCE: f64 = 1e-8;

/// Certificate, bracket and shift for a `mu < 0` problem.
pub(crate) struct CertifiedSetup<T: Real> {
    pub cert: Option<BarrierCertificate<T>>,
    pub signs: Option<BarrierSignReport<T>>,
    pub bracket: Bracket<T>,
    pub lambda: T,
}

fn certify_setup<T: Real>(
    work: &ProblemParams<T>,
    config: &SolverConfig<T>,
    r_choice: Option<T>,
    upper_choice: Option<T>,
) -> Result<CertifiedSetup<T>, Error<T>> {
    if work.mu() >= T::zero() {
        return Err(Error::WrongSignCase { mu: work.mu() });
    }
    let (cert, signs, bracket) = if work.epsilon() == T::zero() {
        // Unforced degenerate mode: the equilibria 0 and -1/mu bracket the
        // nontrivial constant solution exactly.
        (None, None, Bracket::new(T::zero(), -T::one() / work.mu()))
    } else {
        let cert = compute_barriers(work, r_choice, upper_choice)?;
        (
            Some(cert),
            Some(verify_barrier_signs(&cert, work)),
            cert.bracket(),
        )
    };
    let lambda = match (config.lambda, &cert) {
        (Some(l), _) => l,
        (None, Some(c)) => choose_lambda(c, work),
        (None, None) => shift_for_radius(work, bracket.hi),
    };
    Ok(CertifiedSetup {
        cert,
        signs,
        bracket,
        lambda,
    })
}

/// Certify (or build the degenerate bracket) and run the descending branch
/// for a `mu < 0` problem. Used by the forcing-sign symmetry check.
pub(crate) fn solve_descending<T: Real>(
    work: &ProblemParams<T>,
    config: &SolverConfig<T>,
) -> Result<PeriodicFunction<T>, Error<T>> {
    let setup = certify_setup(work, config, None, None)?;
    let config = SolverConfig {
        lambda: Some(setup.lambda),
        ..*config
    };
    let start = PeriodicFunction::constant(setup.bracket.hi, config.n_grid)?;
    let (solution, _) =
        monotone_iterate(&start, Direction::Descending, work, &setup.bracket, &config)?;
    Ok(solution)
}

/// The full output of one certified solve: certificate data, all three
/// solver runs reported in the original variables, and the cross-checks.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome<T: Real> {
    pub params: ProblemParams<T>,
    pub reflected: bool,
    pub cert: Option<BarrierCertificate<T>>,
    pub barrier_signs: Option<BarrierSignReport<T>>,
    /// Bracket of the `mu < 0` form the solvers ran in.
    pub bracket: Bracket<T>,
    pub lambda: T,
    pub ascending: SolutionReport<T>,
    pub descending: SolutionReport<T>,
    pub newton: SolutionReport<T>,
    /// Largest pointwise amount by which the ascending limit exceeds the
    /// descending limit (zero when properly sandwiched).
    pub sandwich_margin: T,
    /// Sup-norm distance between the Newton confirmation and the descending
    /// limit it was seeded with.
    pub cross_solver_diff: T,
    residual_tol: T,
}

impl<T: Real> SolveOutcome<T> {
    pub fn certificate_ok(&self) -> bool {
        self.barrier_signs.is_none_or(|s| s.certified())
    }

    pub fn residual_ok(&self) -> bool {
        self.ascending.residual_sup_refined <= self.residual_tol
            && self.descending.residual_sup_refined <= self.residual_tol
            && self.newton.residual_sup_refined <= self.residual_tol
    }

    pub fn bracket_ok(&self) -> bool {
        self.ascending.bracket_ok && self.descending.bracket_ok && self.newton.bracket_ok
    }

    pub fn sign_ok(&self) -> bool {
        self.ascending.positivity_ok && self.descending.positivity_ok && self.newton.positivity_ok
    }

    pub fn sandwich_ok(&self) -> bool {
        self.sandwich_margin <= real::<T>(AGREEMENT_TOLERANCE)
    }

    pub fn cross_solver_ok(&self) -> bool {
        self.cross_solver_diff <= real::<T>(AGREEMENT_TOLERANCE)
    }

    pub fn all_ok(&self) -> bool {
        self.certificate_ok()
            && self.residual_ok()
            && self.bracket_ok()
            && self.sign_ok()
            && self.sandwich_ok()
            && self.cross_solver_ok()
    }
}

/// Runs the whole pipeline for one parameter triple: certificate (with
/// optional bracket overrides), both monotone branches, Newton seeded with
/// the descending limit, and verification of every claim.
pub fn solve_instance<T: Real + RealField>(
    params: &ProblemParams<T>,
    config: &SolverConfig<T>,
    r_choice: Option<T>,
    upper_choice: Option<T>,
) -> Result<SolveOutcome<T>, Error<T>> {
    let sign_case = params.sign_case().ok_or_else(|| Error::InvalidParams {
        reason: "mu = 0 has no certified regime; nothing to solve".into(),
    })?;
    let reflected = sign_case == SignCase::PositiveMu;
    let work = if reflected { params.reflect() } else { *params };

    let setup = certify_setup(&work, config, r_choice, upper_choice)?;
    let run_config = SolverConfig {
        lambda: Some(setup.lambda),
        ..*config
    };

    let low_start = PeriodicFunction::constant(setup.bracket.lo, run_config.n_grid)?;
    let high_start = PeriodicFunction::constant(setup.bracket.hi, run_config.n_grid)?;
    let (asc, asc_trace) = monotone_iterate(
        &low_start,
        Direction::Ascending,
        &work,
        &setup.bracket,
        &run_config,
    )?;
    let (desc, desc_trace) = monotone_iterate(
        &high_start,
        Direction::Descending,
        &work,
        &setup.bracket,
        &run_config,
    )?;
    let (newt, newton_trace) = newton_solve(&desc, &work, &run_config)?;

    let sandwich_margin = asc
        .values()
        .iter()
        .zip(desc.values())
        .fold(T::zero(), |acc, (&a, &d)| Float::max(acc, a - d));
    let cross_solver_diff = sup_diff(newt.values(), desc.values());

    let into_original = |u: PeriodicFunction<T>| if reflected { u.scale(-T::one()) } else { u };
    let report = |u: PeriodicFunction<T>, iterations: usize, solver: SolverKind| {
        SolutionReport::assemble(
            params,
            sign_case,
            setup.cert,
            setup.bracket,
            u,
            iterations,
            solver,
        )
    };

    Ok(SolveOutcome {
        params: *params,
        reflected,
        cert: setup.cert,
        barrier_signs: setup.signs,
        bracket: setup.bracket,
        lambda: setup.lambda,
        ascending: report(
            into_original(asc),
            asc_trace.iterations,
            SolverKind::MonotoneAscending,
        ),
        descending: report(
            into_original(desc),
            desc_trace.iterations,
            SolverKind::MonotoneDescending,
        ),
        newton: report(
            into_original(newt),
            newton_trace.iterations,
            SolverKind::Newton,
        ),
        sandwich_margin,
        cross_solver_diff,
        residual_tol: config.residual_tol,
    })
}
