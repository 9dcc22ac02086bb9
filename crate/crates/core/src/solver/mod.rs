//! Iterative solvers and the termination policy they share.
//!
//! Both solvers produce, at every iteration `n`, a triple `(xₙ, zₙ, yₙ)` with
//! `zₙ ∈ C` and `yₙ ∈ N_C(zₙ)`, together with the differences `δxₙ`, `δyₙ`
//! of consecutive iterates. Termination is decided on those quantities only:
//!
//! * **solved** when the KKT residuals of `(xₙ, zₙ, yₙ)` pass the
//!   absolute/relative test;
//! * **primal infeasible** when `Π_{(rec C)°}(δyₙ)` passes the primal
//!   certificate check at `eps_pinf`;
//! * **dual infeasible** when `δxₙ` passes the dual certificate check at
//!   `eps_dinf`.
//!
//! If both certificates pass at once the outcome is primal infeasible and the
//! dual certificate is attached as [`SolveOutcome::secondary_certificate`].

pub mod dr;
pub mod pp;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm_inf};
use crate::problem::{Certificate, CertificateKind, KktResiduals, Problem};

pub use dr::{DrSettings, DrSolver, DrState, ResidualPair};
pub use pp::{InnerMethod, PpSettings, PpSolver, PpState, Resolvent};

/// Optimality and infeasibility tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub eps_pinf: f64,
    pub eps_dinf: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_abs: 1e-6,
            eps_rel: 1e-6,
            eps_pinf: 1e-6,
            eps_dinf: 1e-6,
        }
    }
}

impl Tolerances {
    pub(crate) fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps_abs", self.eps_abs),
            ("eps_rel", self.eps_rel),
            ("eps_pinf", self.eps_pinf),
            ("eps_dinf", self.eps_dinf),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Solved,
    PrimalInfeasible,
    DualInfeasible,
    MaxIterations,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Solved => "solved",
            Status::PrimalInfeasible => "primal_infeasible",
            Status::DualInfeasible => "dual_infeasible",
            Status::MaxIterations => "max_iterations",
        }
    }
}

/// One row of the per-iteration trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub primal_res: f64,
    pub dual_res: f64,
    pub norm_dx: f64,
    pub norm_dy: f64,
    pub norm_at_dy: f64,
    /// `σ_C(δyₙ)`, `+∞` when unbounded.
    pub support_dy: f64,
    pub norm_q_dx: f64,
    pub q_dot_dx: f64,
    /// `dist(Aδxₙ, rec C)`
    pub dist_rec: f64,
    /// Inner iterations of the resolvent solve (proximal point only).
    pub inner_iters: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: Status,
    pub iterations: usize,
    /// Last iterate `(xₙ, zₙ, yₙ)`.
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub y: Vec<f64>,
    pub residuals: KktResiduals,
    pub certificate: Option<Certificate>,
    /// Dual certificate that passed in the same check as a primal one.
    pub secondary_certificate: Option<Certificate>,
    pub trace: Vec<TraceRecord>,
}

/// The quantities termination is decided on.
pub(crate) struct IterateView<'a> {
    pub x: &'a [f64],
    pub z: &'a [f64],
    pub y: &'a [f64],
    pub dx: &'a [f64],
    pub dy: &'a [f64],
}

pub(crate) struct Termination {
    pub status: Status,
    pub residuals: KktResiduals,
    pub certificate: Option<Certificate>,
    pub secondary: Option<Certificate>,
}

/// Absolute/relative optimality test on the KKT residuals of `(x, z, y)`.
pub fn optimality_reached(problem: &Problem, x: &[f64], z: &[f64], y: &[f64], tol: &Tolerances) -> Result<(bool, KktResiduals)> {
    let res = problem.kkt_residuals(x, z, y)?;
    let a = problem.constraint_matrix();
    let ax = a.matvec(x)?;
    let qx = problem.quad().matvec(x)?;
    let aty = a.adjoint_matvec(y)?;
    let primal_scale = norm_inf(&ax).max(norm_inf(z));
    let dual_scale = norm_inf(&qx).max(norm_inf(problem.linear())).max(norm_inf(&aty));
    let ok = res.primal <= tol.eps_abs + tol.eps_rel * primal_scale
        && res.dual <= tol.eps_abs + tol.eps_rel * dual_scale;
    Ok((ok, res))
}

/// Primal certificate candidate: `δy` projected onto `(rec C)°`.
///
/// `δyₙ` converges to an element of `(rec C)°`, but along directions where the
/// limit is zero the raw difference may sit on either side of the cone and
/// make `σ_C` infinite.
pub fn primal_candidate(problem: &Problem, dy: &[f64]) -> Vec<f64> {
    let mut rec = vec![0.0; dy.len()];
    problem.set().project_recession_into(dy, &mut rec);
    dy.iter().zip(&rec).map(|(a, b)| a - b).collect()
}

pub(crate) fn check_termination(problem: &Problem, it: &IterateView<'_>, tol: &Tolerances) -> Option<Termination> {
    let (solved, residuals) = optimality_reached(problem, it.x, it.z, it.y, tol).ok()?;
    if solved {
        return Some(Termination {
            status: Status::Solved,
            residuals,
            certificate: None,
            secondary: None,
        });
    }

    let primal = if norm_inf(it.dy) > 0.0 {
        let cand = primal_candidate(problem, it.dy);
        match problem.check_primal_certificate(&cand, tol.eps_pinf) {
            Ok(check) if check.passed => Some(Certificate {
                kind: CertificateKind::PrimalInfeasibility,
                vector: cand,
                metrics: check.metrics,
            }),
            _ => None,
        }
    } else {
        None
    };
    let dual = if norm_inf(it.dx) > 0.0 {
        match problem.check_dual_certificate(it.dx, tol.eps_dinf) {
            Ok(check) if check.passed => Some(Certificate {
                kind: CertificateKind::DualInfeasibility,
                vector: it.dx.to_vec(),
                metrics: check.metrics,
            }),
            _ => None,
        }
    } else {
        None
    };

    match (primal, dual) {
        (Some(p), secondary) => Some(Termination {
            status: Status::PrimalInfeasible,
            residuals,
            certificate: Some(p),
            secondary,
        }),
        (None, Some(d)) => Some(Termination {
            status: Status::DualInfeasible,
            residuals,
            certificate: Some(d),
            secondary: None,
        }),
        (None, None) => None,
    }
}

pub(crate) fn trace_record(
    problem: &Problem,
    iter: usize,
    residuals: KktResiduals,
    dx: &[f64],
    dy: &[f64],
    inner_iters: Option<usize>,
) -> TraceRecord {
    let a = problem.constraint_matrix();
    let mut at_dy = vec![0.0; problem.n()];
    a.adjoint_matvec_into(dy, &mut at_dy);
    let mut q_dx = vec![0.0; problem.n()];
    problem.quad().matvec_into(dx, &mut q_dx);
    let mut a_dx = vec![0.0; problem.m()];
    a.matvec_into(dx, &mut a_dx);
    let dist_rec = problem.set().distance_to_recession(&a_dx).unwrap_or(f64::NAN);
    TraceRecord {
        iter,
        primal_res: residuals.primal,
        dual_res: residuals.dual,
        norm_dx: norm_inf(dx),
        norm_dy: norm_inf(dy),
        norm_at_dy: norm_inf(&at_dy),
        support_dy: problem.set().support_unchecked(dy),
        norm_q_dx: norm_inf(&q_dx),
        q_dot_dx: dot(problem.linear(), dx),
        dist_rec,
        inner_iters,
    }
}

pub(crate) fn validate_common(tol: &Tolerances, check_interval: usize) -> Result<()> {
    tol.validate()?;
    if check_interval == 0 {
        return Err(Error::InvalidConfig("check_interval must be ≥ 1".into()));
    }
    Ok(())
}
