//! The four subcommands. Exit codes partition outcomes:
//! 0 success, 1 usage error, 2 certification failure, 3 solver failure,
//! 4 verification failure.

use crate::docs::{fmt_float, CertifyDoc, RowDoc, SolveDoc, CSV_HEADER};
use crate::opts::{resolve, single, CommonArgs, OutputFormat, SweepArgs, VerifyArgs};
use rayon::prelude::*;
use resonance::barriers::{compute_barriers, verify_barrier_signs};
use resonance::model::SignCase;
use resonance::solvers::SolverKind;
use resonance::spectral::sup_diff;
use resonance::verify::residual_norm;
use resonance::{solve_instance, Error, PeriodicFunction64, ProblemParams64, SolverConfig64};
use std::path::Path;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CERTIFICATION: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

fn classify(err: &Error<f64>) -> i32 {
    match err {
        Error::InvalidParams { .. } | Error::ShapeError { .. } => EXIT_USAGE,
        Error::DegenerateDiscriminant { .. }
        | Error::WrongSignCase { .. }
        | Error::ResonanceConditionViolated { .. }
        | Error::InvalidBracketChoice { .. } => EXIT_CERTIFICATION,
        Error::NonPositiveShift { .. }
        | Error::NoConvergence { .. }
        | Error::BracketEscape { .. }
        | Error::SingularJacobian { .. } => EXIT_SOLVER,
    }
}

fn usage(message: impl AsRef<str>) -> i32 {
    eprintln!("error: {}", message.as_ref());
    EXIT_USAGE
}

fn emit(out: Option<&Path>, payload: &str) -> Result<(), i32> {
    match out {
        Some(path) => std::fs::write(path, payload).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
            EXIT_USAGE
        }),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

fn json_payload<T: serde::Serialize>(doc: &T) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("report serialization");
    text.push('\n');
    text
}

/// Builds the parameter triple, honoring the degenerate (eps = 0) mode.
fn build_params(
    mu: f64,
    eps: f64,
    omega: f64,
    allow_degenerate: bool,
) -> Result<ProblemParams64, String> {
    if eps == 0.0 || mu == 0.0 {
        if !allow_degenerate {
            return Err(
                "mu and eps must be nonzero (pass --allow-degenerate for the unforced mode)".into(),
            );
        }
        if mu == 0.0 {
            return Err("degenerate mode still needs mu != 0".into());
        }
        return ProblemParams64::degenerate(mu, eps, omega).map_err(|e| e.to_string());
    }
    ProblemParams64::new(mu, eps, omega).map_err(|e| e.to_string())
}

pub fn cmd_certify(args: &CommonArgs) -> i32 {
    let resolved = match resolve(args, None) {
        Ok(r) => r,
        Err(msg) => return usage(msg),
    };
    let triple = match (
        single("mu", &resolved.mu),
        single("eps", &resolved.eps),
        single("omega", &resolved.omega),
    ) {
        (Ok(m), Ok(e), Ok(w)) => (m, e, w),
        (m, e, w) => {
            return usage(
                [m.err(), e.err(), w.err()]
                    .into_iter()
                    .flatten()
                    .next()
                    .unwrap(),
            )
        }
    };
    let params = match ProblemParams64::new(triple.0, triple.1, triple.2) {
        Ok(p) => p,
        Err(e) => return usage(e.to_string()),
    };
    let reflected = params.sign_case() == Some(SignCase::PositiveMu);
    let work = if reflected { params.reflect() } else { params };
    let condition_4me = 4.0 * params.mu().abs() * params.epsilon().abs();

    let mut doc = CertifyDoc {
        mu: params.mu(),
        epsilon: params.epsilon(),
        omega: params.omega(),
        condition_4me,
        condition_ok: condition_4me < 1.0,
        a1: None,
        a2: None,
        b1: None,
        b2: None,
        r: None,
        upper: None,
        worst_lower: None,
        worst_upper: None,
        reflected,
    };

    match compute_barriers(&work, resolved.r, resolved.upper) {
        Ok(cert) => {
            let signs = verify_barrier_signs(&cert, &work);
            doc.a1 = Some(cert.a1);
            doc.a2 = Some(cert.a2);
            doc.b1 = Some(cert.b1);
            doc.b2 = Some(cert.b2);
            doc.r = Some(cert.lower);
            doc.upper = Some(cert.upper);
            doc.worst_lower = Some(signs.worst_lower);
            doc.worst_upper = Some(signs.worst_upper);
            if emit(resolved.out.as_deref(), &json_payload(&doc)).is_err() {
                return EXIT_USAGE;
            }
            if signs.certified() {
                EXIT_OK
            } else {
                eprintln!("error: barrier sign inequalities not met");
                EXIT_CERTIFICATION
            }
        }
        Err(err @ Error::ResonanceConditionViolated { .. }) => {
            eprintln!("error: {err}");
            if emit(resolved.out.as_deref(), &json_payload(&doc)).is_err() {
                return EXIT_USAGE;
            }
            EXIT_CERTIFICATION
        }
        Err(err) => {
            eprintln!("error: {err}");
            classify(&err)
        }
    }
}

pub fn cmd_solve(args: &CommonArgs) -> i32 {
    let resolved = match resolve(args, None) {
        Ok(r) => r,
        Err(msg) => return usage(msg),
    };
    let triple = match (
        single("mu", &resolved.mu),
        single("eps", &resolved.eps),
        single("omega", &resolved.omega),
    ) {
        (Ok(m), Ok(e), Ok(w)) => (m, e, w),
        (m, e, w) => {
            return usage(
                [m.err(), e.err(), w.err()]
                    .into_iter()
                    .flatten()
                    .next()
                    .unwrap(),
            )
        }
    };
    let params = match build_params(triple.0, triple.1, triple.2, resolved.allow_degenerate) {
        Ok(p) => p,
        Err(msg) => return usage(msg),
    };

    match solve_instance(&params, &resolved.solver, resolved.r, resolved.upper) {
        Ok(outcome) => {
            let doc = SolveDoc::from_outcome(&outcome, resolved.solver.residual_tol);
            if emit(resolved.out.as_deref(), &json_payload(&doc)).is_err() {
                return EXIT_USAGE;
            }
            if outcome.all_ok() {
                EXIT_OK
            } else {
                eprintln!(
                    "error: verification failed (certificate_ok={} residual_ok={} bracket_ok={} \
                     sign_ok={} sandwich_ok={} cross_solver_ok={})",
                    outcome.certificate_ok(),
                    outcome.residual_ok(),
                    outcome.bracket_ok(),
                    outcome.sign_ok(),
                    outcome.sandwich_ok(),
                    outcome.cross_solver_ok()
                );
                EXIT_VERIFICATION
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            classify(&err)
        }
    }
}

fn sweep_row(mu: f64, eps: f64, omega: f64, config: &SolverConfig64) -> RowDoc {
    let cond = 4.0 * mu.abs() * eps.abs();
    let mut row = RowDoc {
        mu,
        epsilon: eps,
        omega,
        cond,
        ok: false,
        a2: None,
        a1: None,
        b2: None,
        b1: None,
        r: None,
        upper: None,
        min_u: None,
        max_u: None,
        residual: None,
        iters: None,
        solver: None,
        status: "uncertified".into(),
    };
    if mu == 0.0 || eps == 0.0 || cond >= 1.0 {
        return row;
    }
    let params = match ProblemParams64::new(mu, eps, omega) {
        Ok(p) => p,
        Err(_) => return row,
    };
    match solve_instance(&params, config, None, None) {
        Ok(outcome) => {
            if let Some(cert) = outcome.cert {
                row.a2 = Some(cert.a2);
                row.a1 = Some(cert.a1);
                row.b2 = Some(cert.b2);
                row.b1 = Some(cert.b1);
                row.r = Some(cert.lower);
                row.upper = Some(cert.upper);
            }
            let branch = &outcome.descending;
            row.ok = true;
            row.min_u = Some(branch.min_u);
            row.max_u = Some(branch.max_u);
            row.residual = Some(branch.residual_sup_refined);
            row.iters = Some(branch.iterations);
            row.solver = Some(SolverKind::MonotoneDescending.as_str().to_owned());
            row.status = if outcome.all_ok() {
                "ok".into()
            } else {
                "failed".into()
            };
            row
        }
        Err(Error::ResonanceConditionViolated { .. }) => row,
        Err(_) => {
            row.ok = true;
            row.status = "failed".into();
            row
        }
    }
}

pub fn cmd_sweep(args: &SweepArgs) -> i32 {
    let resolved = match resolve(&args.common, args.format.as_deref()) {
        Ok(r) => r,
        Err(msg) => return usage(msg),
    };
    if resolved.r.is_some() || resolved.upper.is_some() {
        return usage("--r/--R overrides are not supported in sweeps");
    }
    if resolved.mu.len() == 1 && resolved.eps.len() == 1 && resolved.omega.len() == 1 {
        return usage("sweep needs at least one ranged parameter (min:max:count)");
    }

    let mut triples = Vec::new();
    for &mu in &resolved.mu {
        for &eps in &resolved.eps {
            for &omega in &resolved.omega {
                triples.push((mu, eps, omega));
            }
        }
    }

    let config = resolved.solver;
    let mut rows: Vec<(usize, RowDoc)> = triples
        .par_iter()
        .enumerate()
        .map(|(index, &(mu, eps, omega))| (index, sweep_row(mu, eps, omega, &config)))
        .collect();
    rows.sort_by_key(|(index, _)| *index);
    let rows: Vec<RowDoc> = rows.into_iter().map(|(_, row)| row).collect();

    let payload = match resolved.format {
        OutputFormat::Csv => {
            let mut text = String::from(CSV_HEADER);
            text.push('\n');
            for row in &rows {
                text.push_str(&row.to_csv_line());
                text.push('\n');
            }
            text
        }
        OutputFormat::Json => json_payload(&rows),
    };
    if emit(resolved.out.as_deref(), &payload).is_err() {
        return EXIT_USAGE;
    }

    if rows.iter().any(|row| row.ok && row.status != "ok") {
        eprintln!("error: at least one certified triple failed to solve or verify");
        EXIT_SOLVER
    } else {
        EXIT_OK
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> i32 {
    let text = match std::fs::read_to_string(&args.report) {
        Ok(t) => t,
        Err(e) => return usage(format!("cannot read {}: {e}", args.report.display())),
    };
    let doc: SolveDoc = match serde_json::from_str(&text) {
        Ok(d) => d,
        Err(e) => return usage(format!("not a solve report: {e}")),
    };
    let tol = args.tol_residual.unwrap_or(doc.residual_tol);

    let params = match build_params(doc.mu, doc.epsilon, doc.omega, doc.degenerate_mode) {
        Ok(p) => p,
        Err(msg) => return usage(msg),
    };
    let coeffs: Vec<_> = doc
        .solution
        .coeff_re
        .iter()
        .zip(&doc.solution.coeff_im)
        .map(|(&re, &im)| resonance::spectral::Complex::new(re, im))
        .collect();
    let solution = match PeriodicFunction64::from_coeffs(coeffs) {
        Ok(u) => u,
        Err(e) => return usage(format!("stored coefficients are unusable: {e}")),
    };

    let mut all_ok = true;
    let mut check = |name: &str, ok: bool, detail: String| {
        println!("{}: {name} ({detail})", if ok { "PASS" } else { "FAIL" });
        all_ok &= ok;
    };

    let reproduced = sup_diff(solution.values(), &doc.solution.values);
    check(
        "stored samples match coefficients",
        reproduced <= 1e-9,
        format!("sup diff {:.3e}", reproduced),
    );

    let residual = residual_norm(&solution, &params, 2);
    check(
        "refined-grid residual",
        residual <= tol,
        format!("{residual:.3e} <= {tol:.3e}"),
    );

    let (min_u, max_u) = (solution.min_value(), solution.max_value());
    let tol_claim = 1e-8;
    let (bracket_ok, sign_ok) = if doc.reflected {
        (
            -doc.bracket_hi - tol_claim <= min_u && max_u <= -doc.bracket_lo + tol_claim,
            max_u <= -doc.bracket_lo + tol_claim,
        )
    } else {
        (
            doc.bracket_lo - tol_claim <= min_u && max_u <= doc.bracket_hi + tol_claim,
            min_u >= doc.bracket_lo - tol_claim,
        )
    };
    check(
        "bracket containment",
        bracket_ok,
        format!(
            "min {min_u:.6} max {max_u:.6} vs [{}, {}]",
            doc.bracket_lo, doc.bracket_hi
        ),
    );
    check(
        "sign claim",
        sign_ok,
        if doc.reflected {
            format!("max {max_u:.6} <= {:.6}", -doc.bracket_lo + tol_claim)
        } else {
            format!("min {min_u:.6} >= {:.6}", doc.bracket_lo - tol_claim)
        },
    );

    let stored = &doc.branches.descending;
    check(
        "stored residual agrees",
        (stored.residual_sup_refined - residual).abs() <= 1e-9,
        format!(
            "stored {:.3e} recomputed {residual:.3e}",
            stored.residual_sup_refined
        ),
    );
    check(
        "declared checks",
        doc.checks.all_ok,
        format!("all_ok={}", doc.checks.all_ok),
    );

    if all_ok {
        println!("verified: {}", fmt_float(residual));
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    }
}
