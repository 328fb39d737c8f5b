//! Argument and configuration handling.
//!
//! `--mu`, `--eps`, `--omega` accept either a single value or a
//! `min:max:count` range (ranges are only meaningful for `sweep`).
//! A plain `key = value` config file can supply any flag's value;
//! command-line flags win on conflict.

use clap::{Args, Parser, Subcommand};
use resonance::SolverConfig64;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(
    name = "resonance",
    version,
    about = "Certified periodic solutions of u'' + u + mu*u^2 = eps*cos(omega*t)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the barrier certificate for one parameter triple
    Certify(CommonArgs),
    /// Run the certified solve for one triple and emit a JSON report
    Solve(CommonArgs),
    /// Solve every triple on a parameter grid and emit one row per triple
    Sweep(SweepArgs),
    /// Re-verify a stored solve report
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Nonlinearity coefficient (value, or min:max:count for sweep)
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    /// Forcing amplitude (value, or min:max:count for sweep)
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<String>,
    /// Forcing angular frequency, > 0 (value, or min:max:count for sweep)
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<String>,
    /// Lower barrier constant override; must lie in [a2, a1]
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Upper barrier constant override; must be >= b1
    #[arg(long = "R", allow_negative_numbers = true)]
    pub upper: Option<f64>,
    /// Grid size, a power of two >= 8
    #[arg(long)]
    pub n_grid: Option<usize>,
    /// Refined-grid residual bound declaring a solve verified
    #[arg(long)]
    pub tol_residual: Option<f64>,
    /// Sup-norm step tolerance for the monotone iteration
    #[arg(long)]
    pub tol_step: Option<f64>,
    /// Accept eps = 0 (unforced oscillator; exact-equilibrium mode)
    #[arg(long)]
    pub allow_degenerate: bool,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key = value file supplying defaults for any of the flags above
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Output format for the sweep table
    #[arg(long, value_parser = ["json", "csv"])]
    pub format: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// JSON report produced by `resonance solve`
    pub report: PathBuf,
    /// Residual bound the stored solution must meet on the refined grid
    #[arg(long)]
    pub tol_residual: Option<f64>,
}

/// Fully resolved inputs after config-file merging.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub mu: Vec<f64>,
    pub eps: Vec<f64>,
    pub omega: Vec<f64>,
    pub r: Option<f64>,
    pub upper: Option<f64>,
    pub allow_degenerate: bool,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub solver: SolverConfig64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

pub fn resolve(args: &CommonArgs, format: Option<&str>) -> Result<Resolved, String> {
    let mut args = args.clone();
    let mut format = format.map(str::to_owned);
    if let Some(path) = args.config.clone() {
        apply_config(&mut args, &mut format, &path)?;
    }

    let mu = parse_value_or_range("mu", args.mu.as_deref().ok_or("missing --mu")?)?;
    let eps = parse_value_or_range("eps", args.eps.as_deref().ok_or("missing --eps")?)?;
    let omega = parse_value_or_range("omega", args.omega.as_deref().ok_or("missing --omega")?)?;
    if omega.iter().any(|&w| w <= 0.0) {
        return Err("omega must be positive".into());
    }

    let mut solver = SolverConfig64::default();
    if let Some(n) = args.n_grid {
        if n < 8 || !n.is_power_of_two() {
            return Err(format!("--n-grid must be a power of two >= 8, got {n}"));
        }
        solver.n_grid = n;
    }
    if let Some(tol) = args.tol_residual {
        if tol <= 0.0 {
            return Err("--tol-residual must be positive".into());
        }
        solver.residual_tol = tol;
    }
    if let Some(tol) = args.tol_step {
        if tol <= 0.0 {
            return Err("--tol-step must be positive".into());
        }
        solver.iterate_tol = tol;
    }

    let format = match format.as_deref() {
        None | Some("csv") => OutputFormat::Csv,
        Some("json") => OutputFormat::Json,
        Some(other) => return Err(format!("unknown format '{other}' (expected json or csv)")),
    };

    Ok(Resolved {
        mu,
        eps,
        omega,
        r: args.r,
        upper: args.upper,
        allow_degenerate: args.allow_degenerate,
        out: args.out,
        format,
        solver,
    })
}

/// A single value `v` or an inclusive range `min:max:count`.
pub fn parse_value_or_range(name: &str, text: &str) -> Result<Vec<f64>, String> {
    let parse = |part: &str| -> Result<f64, String> {
        part.trim()
            .parse::<f64>()
            .map_err(|_| format!("invalid number '{part}' for --{name}"))
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.len() {
        1 => Ok(vec![parse(parts[0])?]),
        3 => {
            let min = parse(parts[0])?;
            let max = parse(parts[1])?;
            let count: usize = parts[2]
                .trim()
                .parse()
                .map_err(|_| format!("invalid count '{}' for --{name}", parts[2]))?;
            if count < 1 {
                return Err(format!("--{name}: range count must be >= 1"));
            }
            if min > max {
                return Err(format!(
                    "--{name}: range needs min <= max, got {min} > {max}"
                ));
            }
            if count == 1 {
                return Ok(vec![min]);
            }
            let step = (max - min) / (count - 1) as f64;
            Ok((0..count).map(|i| min + step * i as f64).collect())
        }
        _ => Err(format!(
            "--{name}: expected a value or min:max:count, got '{text}'"
        )),
    }
}

/// Fills unset arguments from a `key = value` file; `#` starts a comment.
fn apply_config(
    args: &mut CommonArgs,
    format: &mut Option<String>,
    path: &Path,
) -> Result<(), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key = value", path.display(), lineno + 1))?;
        let key = key.trim();
        let value = value.trim().to_owned();
        let bad = |what: &str| format!("{}:{}: {what}", path.display(), lineno + 1);
        match key {
            "mu" => {
                args.mu.get_or_insert(value);
            }
            "eps" => {
                args.eps.get_or_insert(value);
            }
            "omega" => {
                args.omega.get_or_insert(value);
            }
            "r" => {
                args.r
                    .get_or_insert(value.parse().map_err(|_| bad("invalid number for r"))?);
            }
            "R" => {
                args.upper
                    .get_or_insert(value.parse().map_err(|_| bad("invalid number for R"))?);
            }
            "n-grid" => {
                args.n_grid.get_or_insert(
                    value
                        .parse()
                        .map_err(|_| bad("invalid integer for n-grid"))?,
                );
            }
            "tol-residual" => {
                args.tol_residual.get_or_insert(
                    value
                        .parse()
                        .map_err(|_| bad("invalid number for tol-residual"))?,
                );
            }
            "tol-step" => {
                args.tol_step.get_or_insert(
                    value
                        .parse()
                        .map_err(|_| bad("invalid number for tol-step"))?,
                );
            }
            "allow-degenerate" => {
                let flag: bool = value
                    .parse()
                    .map_err(|_| bad("invalid bool for allow-degenerate"))?;
                args.allow_degenerate = args.allow_degenerate || flag;
            }
            "format" => {
                format.get_or_insert(value);
            }
            "out" => {
                args.out.get_or_insert(PathBuf::from(value));
            }
            other => return Err(bad(&format!("unknown key '{other}'"))),
        }
    }
    Ok(())
}

/// Requires a parameter to be a single value, not a range.
pub fn single(name: &str, values: &[f64]) -> Result<f64, String> {
    if values.len() == 1 {
        Ok(values[0])
    } else {
        Err(format!("--{name} must be a single value for this command"))
    }
}
