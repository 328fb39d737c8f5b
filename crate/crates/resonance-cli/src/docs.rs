//! Machine-readable report schemas with fixed field order.
//!
//! JSON serialization follows struct declaration order; CSV floats are
//! printed with 17 significant digits so every value round-trips exactly.

use resonance::verify::back_transform;
use resonance::{SolutionReport64, SolveOutcome64};
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str =
    "mu,epsilon,omega,cond,ok,a2,a1,b2,b1,r,R,min_u,max_u,residual,iters,solver,status";

/// 17-significant-digit float used in CSV cells.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CertifyDoc {
    pub mu: f64,
    pub epsilon: f64,
    pub omega: f64,
    pub condition_4me: f64,
    pub condition_ok: bool,
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    pub b1: Option<f64>,
    pub b2: Option<f64>,
    pub r: Option<f64>,
    #[serde(rename = "R")]
    pub upper: Option<f64>,
    pub worst_lower: Option<f64>,
    pub worst_upper: Option<f64>,
    pub reflected: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub r: f64,
    #[serde(rename = "R")]
    pub upper: f64,
    pub disc_a: f64,
    pub disc_b: f64,
    pub worst_lower: f64,
    pub worst_upper: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BranchDoc {
    pub solver: String,
    pub iterations: usize,
    pub residual_sup: f64,
    pub residual_sup_refined: f64,
    pub min_u: f64,
    pub max_u: f64,
    pub bracket_ok: bool,
    pub positivity_ok: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BranchesDoc {
    pub ascending: BranchDoc,
    pub descending: BranchDoc,
    pub newton: BranchDoc,
}

/// Canonical (descending-branch) solution samples: the canonical variable
/// `s`, the original time variable `t = s/omega`, grid values, and the
/// Fourier coefficients that regenerate them.
#[derive(Debug, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    pub coeff_re: Vec<f64>,
    pub coeff_im: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ChecksDoc {
    pub certificate_ok: bool,
    pub residual_ok: bool,
    pub bracket_ok: bool,
    pub sign_ok: bool,
    pub sandwich_ok: bool,
    pub cross_solver_ok: bool,
    pub all_ok: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SolveDoc {
    pub mu: f64,
    pub epsilon: f64,
    pub omega: f64,
    pub degenerate_mode: bool,
    pub reflected: bool,
    pub n_grid: usize,
    pub lambda: f64,
    pub condition_4me: f64,
    pub certificate: Option<CertificateDoc>,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub residual_tol: f64,
    pub branches: BranchesDoc,
    pub solution: SolutionDoc,
    pub sandwich_margin: f64,
    pub cross_solver_diff: f64,
    pub checks: ChecksDoc,
}

fn branch_doc(report: &SolutionReport64) -> BranchDoc {
    BranchDoc {
        solver: report.solver.as_str().to_owned(),
        iterations: report.iterations,
        residual_sup: report.residual_sup,
        residual_sup_refined: report.residual_sup_refined,
        min_u: report.min_u,
        max_u: report.max_u,
        bracket_ok: report.bracket_ok,
        positivity_ok: report.positivity_ok,
    }
}

impl SolveDoc {
    pub fn from_outcome(outcome: &SolveOutcome64, residual_tol: f64) -> Self {
        let params = outcome.params;
        let canonical = &outcome.descending.solution;
        let time = back_transform(canonical, &params);
        Self {
            mu: params.mu(),
            epsilon: params.epsilon(),
            omega: params.omega(),
            degenerate_mode: params.is_degenerate(),
            reflected: outcome.reflected,
            n_grid: canonical.n(),
            lambda: outcome.lambda,
            condition_4me: 4.0 * params.mu().abs() * params.epsilon().abs(),
            certificate: outcome.cert.map(|cert| {
                let signs = outcome
                    .barrier_signs
                    .expect("certified outcomes carry signs");
                CertificateDoc {
                    a1: cert.a1,
                    a2: cert.a2,
                    b1: cert.b1,
                    b2: cert.b2,
                    r: cert.lower,
                    upper: cert.upper,
                    disc_a: cert.disc_a,
                    disc_b: cert.disc_b,
                    worst_lower: signs.worst_lower,
                    worst_upper: signs.worst_upper,
                }
            }),
            bracket_lo: outcome.bracket.lo,
            bracket_hi: outcome.bracket.hi,
            residual_tol,
            branches: BranchesDoc {
                ascending: branch_doc(&outcome.ascending),
                descending: branch_doc(&outcome.descending),
                newton: branch_doc(&outcome.newton),
            },
            solution: SolutionDoc {
                s: (0..canonical.n())
                    .map(|j| canonical.grid_point(j))
                    .collect(),
                t: time.t,
                values: canonical.values().to_vec(),
                coeff_re: canonical.coeffs().iter().map(|c| c.re).collect(),
                coeff_im: canonical.coeffs().iter().map(|c| c.im).collect(),
            },
            sandwich_margin: outcome.sandwich_margin,
            cross_solver_diff: outcome.cross_solver_diff,
            checks: ChecksDoc {
                certificate_ok: outcome.certificate_ok(),
                residual_ok: outcome.residual_ok(),
                bracket_ok: outcome.bracket_ok(),
                sign_ok: outcome.sign_ok(),
                sandwich_ok: outcome.sandwich_ok(),
                cross_solver_ok: outcome.cross_solver_ok(),
                all_ok: outcome.all_ok(),
            },
        }
    }
}

/// One sweep row; `None` renders as an empty CSV cell (or JSON null).
#[derive(Debug, Serialize, Deserialize)]
pub struct RowDoc {
    pub mu: f64,
    pub epsilon: f64,
    pub omega: f64,
    pub cond: f64,
    pub ok: bool,
    pub a2: Option<f64>,
    pub a1: Option<f64>,
    pub b2: Option<f64>,
    pub b1: Option<f64>,
    pub r: Option<f64>,
    #[serde(rename = "R")]
    pub upper: Option<f64>,
    pub min_u: Option<f64>,
    pub max_u: Option<f64>,
    pub residual: Option<f64>,
    pub iters: Option<usize>,
    pub solver: Option<String>,
    pub status: String,
}

impl RowDoc {
    pub fn to_csv_line(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
        [
            fmt_float(self.mu),
            fmt_float(self.epsilon),
            fmt_float(self.omega),
            fmt_float(self.cond),
            self.ok.to_string(),
            opt(self.a2),
            opt(self.a1),
            opt(self.b2),
            opt(self.b1),
            opt(self.r),
            opt(self.upper),
            opt(self.min_u),
            opt(self.max_u),
            opt(self.residual),
            self.iters.map(|i| i.to_string()).unwrap_or_default(),
            self.solver.clone().unwrap_or_default(),
            self.status.clone(),
        ]
        .join(",")
    }
}
