//! Command-line front end: `solve`, `generate` and `check`.
//!
//! Exit codes for `solve`: 0 solved, 10 primal infeasible, 11 dual
//! infeasible, 12 iteration limit, 2 input error, 3 solver failure.
//! `check` exits 0 on pass, 1 on fail, 2 on input error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::io::{self, ConfigEcho, ProblemDocument};
use crate::lab::{self, InstanceFamily, SetFamily};
use crate::problem::CertificateMetrics;
use crate::solver::{dr, pp, DrSettings, InnerMethod, PpSettings, Status, Tolerances};

pub const EXIT_SOLVED: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_PRIMAL_INFEASIBLE: i32 = 10;
pub const EXIT_DUAL_INFEASIBLE: i32 = 11;
pub const EXIT_MAX_ITER: i32 = 12;

#[derive(Debug, Parser)]
#[command(name = "qpcert", version, about = "Convex QP solver with infeasibility certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a problem file and write the outcome as JSON.
    Solve(SolveArgs),
    /// Generate a seeded instance with its ground truth.
    Generate(GenerateArgs),
    /// Check an infeasibility certificate against a problem.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverChoice {
    Dr,
    Pp,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InnerChoice {
    Newton,
    FixedPoint,
}

#[derive(Debug, Args)]
struct SolveArgs {
    problem: PathBuf,
    #[arg(long, value_enum, default_value = "dr")]
    solver: SolverChoice,
    /// Relaxation parameter of the splitting method, in (0, 2).
    #[arg(long, default_value_t = 1.6)]
    alpha: f64,
    /// Proximal parameter of the proximal-point method.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1e-6)]
    eps_abs: f64,
    #[arg(long, default_value_t = 1e-6)]
    eps_rel: f64,
    #[arg(long, default_value_t = 1e-6)]
    eps_pinf: f64,
    #[arg(long, default_value_t = 1e-6)]
    eps_dinf: f64,
    #[arg(long, default_value_t = 20_000)]
    max_iter: usize,
    #[arg(long, default_value_t = 25)]
    check_interval: usize,
    /// Resolvent solver of the proximal-point method.
    #[arg(long, value_enum, default_value = "newton")]
    inner_method: InnerChoice,
    /// Fixed inner tolerance; adaptive when omitted.
    #[arg(long)]
    inner_tol: Option<f64>,
    #[arg(long)]
    inner_max_iter: Option<usize>,
    /// Write the per-iteration trace CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Start from the iterate in this file (an earlier outcome works).
    #[arg(long)]
    warm: Option<PathBuf>,
    /// Outcome destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyChoice {
    Feasible,
    PrimalInfeasible,
    DualInfeasible,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SetChoice {
    Box,
    Orthant,
    TranslatedCone,
    BoxSoc,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: FamilyChoice,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum, default_value = "box")]
    sets: SetChoice,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    problem: PathBuf,
    candidate: PathBuf,
    /// Tolerance; defaults to the one recorded in the candidate, else 1e-6.
    #[arg(long)]
    eps: Option<f64>,
}

struct Failure {
    code: i32,
    message: String,
}

fn input_error(path: &Path, err: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: format!("{}: {err}", path.display()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(path, e))
}

fn write_output(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    let res = match path {
        Some(p) => fs::write(p, text),
        None => stdout.write_all(text.as_bytes()),
    };
    res.map_err(|e| Failure {
        code: EXIT_INPUT,
        message: match path {
            Some(p) => format!("{}: {e}", p.display()),
            None => e.to_string(),
        },
    })
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(&a, stdout),
        Command::Generate(a) => generate(&a, stdout),
        Command::Check(a) => check(&a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn solve(a: &SolveArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let doc = io::parse_problem(&read(&a.problem)?).map_err(|e| input_error(&a.problem, e))?;
    let problem = doc.problem;
    let warm = match &a.warm {
        Some(p) => Some(io::parse_warm(&read(p)?).map_err(|e| input_error(p, e))?),
        None => None,
    };
    let tol = Tolerances {
        eps_abs: a.eps_abs,
        eps_rel: a.eps_rel,
        eps_pinf: a.eps_pinf,
        eps_dinf: a.eps_dinf,
    };
    let trace = a.trace.is_some();
    let mut echo = ConfigEcho {
        solver: String::new(),
        alpha: None,
        gamma: None,
        inner_method: None,
        inner_tol_abs: None,
        eps_abs: a.eps_abs,
        eps_rel: a.eps_rel,
        eps_pinf: a.eps_pinf,
        eps_dinf: a.eps_dinf,
        max_iter: a.max_iter,
        check_interval: a.check_interval,
        warm_start: warm.is_some(),
    };

    let outcome = match a.solver {
        SolverChoice::Dr => {
            let settings = DrSettings {
                alpha: a.alpha,
                tol,
                max_iter: a.max_iter,
                check_interval: a.check_interval,
                trace,
            };
            echo.solver = "dr".into();
            echo.alpha = Some(a.alpha);
            let start = match &warm {
                Some(w) => {
                    let v = w.splitting_v().map_err(|e| input_error(a.warm.as_deref().unwrap(), e))?;
                    Some((w.x.clone(), v))
                }
                None => None,
            };
            dr::solve(&problem, settings, start.as_ref().map(|(x, v)| (x.as_slice(), v.as_slice())))
        }
        SolverChoice::Pp => {
            let inner_method = match a.inner_method {
                InnerChoice::Newton => InnerMethod::SemismoothNewton,
                InnerChoice::FixedPoint => InnerMethod::DampedFixedPoint,
            };
            let mut settings = PpSettings {
                gamma: a.gamma,
                inner_method,
                inner_tol_abs: a.inner_tol,
                tol,
                max_iter: a.max_iter,
                check_interval: a.check_interval,
                trace,
                ..PpSettings::default()
            };
            if let Some(k) = a.inner_max_iter {
                settings.inner_max_iter = k;
            }
            echo.solver = "pp".into();
            echo.gamma = Some(a.gamma);
            echo.inner_method = Some(inner_method.as_str().into());
            echo.inner_tol_abs = a.inner_tol;
            let start = match &warm {
                Some(w) => {
                    let y = w.proximal_y().map_err(|e| input_error(a.warm.as_deref().unwrap(), e))?;
                    Some((w.x.clone(), y))
                }
                None => None,
            };
            pp::solve(&problem, settings, start.as_ref().map(|(x, y)| (x.as_slice(), y.as_slice())))
        }
    };
    let outcome = outcome.map_err(|e| match e {
        Error::InnerSolve { .. } => Failure {
            code: EXIT_SOLVER,
            message: format!("solver failure: {e}"),
        },
        other => Failure {
            code: EXIT_INPUT,
            message: other.to_string(),
        },
    })?;

    if let Some(path) = &a.trace {
        let mut buf = Vec::new();
        io::write_trace(&mut buf, &outcome.trace, matches!(a.solver, SolverChoice::Pp))
            .expect("writing to memory succeeds");
        fs::write(path, buf).map_err(|e| input_error(path, e))?;
    }
    write_output(a.out.as_deref(), &io::write_outcome(&outcome, &echo), stdout)?;
    Ok(match outcome.status {
        Status::Solved => EXIT_SOLVED,
        Status::PrimalInfeasible => EXIT_PRIMAL_INFEASIBLE,
        Status::DualInfeasible => EXIT_DUAL_INFEASIBLE,
        Status::MaxIterations => EXIT_MAX_ITER,
    })
}

fn generate(a: &GenerateArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let family = match a.family {
        FamilyChoice::Feasible => InstanceFamily::Feasible,
        FamilyChoice::PrimalInfeasible => InstanceFamily::PrimalInfeasible,
        FamilyChoice::DualInfeasible => InstanceFamily::DualInfeasible,
    };
    let sets = match a.sets {
        SetChoice::Box => SetFamily::Box,
        SetChoice::Orthant => SetFamily::Orthant,
        SetChoice::TranslatedCone => SetFamily::TranslatedCone,
        SetChoice::BoxSoc => SetFamily::BoxSoc,
    };
    let bundle = lab::generate(family, a.seed, a.n, a.m, sets).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: e.to_string(),
    })?;
    let text = io::write_problem(&ProblemDocument::from(&bundle));
    write_output(a.out.as_deref(), &text, stdout)?;
    Ok(EXIT_SOLVED)
}

fn check(a: &CheckArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let doc = io::parse_problem(&read(&a.problem)?).map_err(|e| input_error(&a.problem, e))?;
    let cand = io::parse_candidate(&read(&a.candidate)?).map_err(|e| input_error(&a.candidate, e))?;
    let eps = a.eps.or(cand.solver_eps).unwrap_or(1e-6);
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Failure {
            code: EXIT_INPUT,
            message: format!("eps must be positive, got {eps}"),
        });
    }
    let report = doc
        .problem
        .check_certificate(cand.kind, &cand.vector, eps)
        .map_err(|e| input_error(&a.candidate, e))?;
    let mut text = format!("kind: {}\n", cand.kind.as_str());
    match report.metrics {
        CertificateMetrics::Primal { norm_adjoint, support } => {
            text.push_str(&format!("norm_adjoint: {norm_adjoint:e}\nsupport: {support:e}\n"));
        }
        CertificateMetrics::Dual {
            norm_quad,
            dist_recession,
            linear_dot,
        } => {
            text.push_str(&format!(
                "norm_quad: {norm_quad:e}\ndist_recession: {dist_recession:e}\nlinear_dot: {linear_dot:e}\n"
            ));
        }
    }
    text.push_str(&format!("eps: {eps:e}\nresult: {}\n", if report.passed { "pass" } else { "fail" }));
    write_output(None, &text, stdout)?;
    Ok(if report.passed { EXIT_SOLVED } else { EXIT_CHECK_FAILED })
}
