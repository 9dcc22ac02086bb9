//! Douglas-Rachford splitting (equivalently ADMM) on `(x, v)`.
//!
//! One iteration with relaxation `α ∈ (0, 2)`:
//!
//! ```text
//! x̃ₙ   = (Q + I + AᵀA)⁻¹ (xₙ − q + Aᵀ(2Π_C − I)vₙ)
//! xₙ₊₁ = xₙ + α(x̃ₙ − xₙ)
//! vₙ₊₁ = vₙ + α(Ax̃ₙ − Π_C vₙ)
//! ```
//!
//! with auxiliary iterates `zₙ = Π_C vₙ` and `yₙ = vₙ − zₙ`. The matrix
//! `Q + I + AᵀA` is factored once at setup.

use crate::error::{check_dim, Error, Result};
use crate::linalg::{norm_inf, DenseMatrix, SpdFactor};
use crate::problem::{KktResiduals, Problem};

use super::{check_termination, trace_record, validate_common, IterateView, SolveOutcome, Status, Tolerances, TraceRecord};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrSettings {
    /// Relaxation parameter, strictly inside `(0, 2)`.
    pub alpha: f64,
    pub tol: Tolerances,
    pub max_iter: usize,
    /// Termination is tested every `check_interval` iterations.
    pub check_interval: usize,
    /// Record a [`TraceRecord`] for every iteration.
    pub trace: bool,
}

impl Default for DrSettings {
    fn default() -> Self {
        Self {
            alpha: 1.6,
            tol: Tolerances::default(),
            max_iter: 20_000,
            check_interval: 25,
            trace: false,
        }
    }
}

impl DrSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha out of range: {} not in (0, 2)",
                self.alpha
            )));
        }
        validate_common(&self.tol, self.check_interval)
    }
}

/// Iterate `n` of the method together with the differences to iterate `n−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DrState {
    pub iter: usize,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    /// `Π_C v`
    pub z: Vec<f64>,
    /// `v − Π_C v`
    pub y: Vec<f64>,
    pub dx: Vec<f64>,
    pub dv: Vec<f64>,
    pub dz: Vec<f64>,
    pub dy: Vec<f64>,
}

/// KKT residual vectors of the pre-step iterate, evaluated directly and
/// through the differences produced by the step.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualPair {
    pub direct: KktResiduals,
    pub via_deltas: KktResiduals,
    /// `‖direct − via_deltas‖∞` for the primal residual vector.
    pub primal_gap: f64,
    /// Same for the dual residual vector.
    pub dual_gap: f64,
    /// Magnitude of the terms entering either evaluation.
    pub scale: f64,
}

pub struct DrSolver<'a> {
    problem: &'a Problem,
    settings: DrSettings,
    factor: SpdFactor,
    state: DrState,
}

impl<'a> DrSolver<'a> {
    /// Factors `Q + I + AᵀA` and starts from `x₀ = 0`, `v₀ = 0`.
    pub fn new(problem: &'a Problem, settings: DrSettings) -> Result<Self> {
        settings.validate()?;
        let factor = SpdFactor::new(&Self::system_matrix(problem))?;
        let (n, m) = (problem.n(), problem.m());
        let state = DrState {
            iter: 0,
            x: vec![0.0; n],
            v: vec![0.0; m],
            z: vec![0.0; m],
            y: vec![0.0; m],
            dx: vec![0.0; n],
            dv: vec![0.0; m],
            dz: vec![0.0; m],
            dy: vec![0.0; m],
        };
        let mut solver = Self {
            problem,
            settings,
            factor,
            state,
        };
        solver.refresh_split();
        Ok(solver)
    }

    /// `Q + I + AᵀA`
    pub fn system_matrix(problem: &Problem) -> DenseMatrix {
        let mut m = problem.constraint_matrix().gram();
        for i in 0..problem.n() {
            for j in 0..problem.n() {
                let extra = problem.quad().get(i, j) + if i == j { 1.0 } else { 0.0 };
                m.set(i, j, m.get(i, j) + extra);
            }
        }
        m
    }

    pub fn warm_start(&mut self, x: &[f64], v: &[f64]) -> Result<()> {
        check_dim("warm start x", self.problem.n(), x.len())?;
        check_dim("warm start v", self.problem.m(), v.len())?;
        if x.iter().chain(v).any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("warm start"));
        }
        self.state.x.copy_from_slice(x);
        self.state.v.copy_from_slice(v);
        self.refresh_split();
        Ok(())
    }

    pub fn state(&self) -> &DrState {
        &self.state
    }

    pub fn settings(&self) -> &DrSettings {
        &self.settings
    }

    /// One application of the iteration map `(x, v) ↦ T(x, v)`, leaving the
    /// solver untouched.
    pub fn apply(&self, x: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (x_next, v_next, _) = self.map(x, v);
        (x_next, v_next)
    }

    /// Returns `(xₙ₊₁, vₙ₊₁, x̃ₙ)`.
    fn map(&self, x: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let p = self.problem;
        let a = p.constraint_matrix();
        let alpha = self.settings.alpha;
        let mut z = vec![0.0; v.len()];
        p.set().project_into(v, &mut z);
        let reflected: Vec<f64> = z.iter().zip(v).map(|(zi, vi)| 2.0 * zi - vi).collect();
        let mut rhs = vec![0.0; x.len()];
        a.adjoint_matvec_into(&reflected, &mut rhs);
        for i in 0..x.len() {
            rhs[i] += x[i] - p.linear()[i];
        }
        self.factor.solve_in_place(&mut rhs);
        let xt = rhs;
        let mut axt = vec![0.0; v.len()];
        a.matvec_into(&xt, &mut axt);
        let x_next = x.iter().zip(&xt).map(|(xi, ti)| xi + alpha * (ti - xi)).collect();
        let v_next = (0..v.len()).map(|i| v[i] + alpha * (axt[i] - z[i])).collect();
        (x_next, v_next, xt)
    }

    /// Advances one iteration.
    pub fn step(&mut self) {
        let (x_next, v_next, _) = self.map(&self.state.x, &self.state.v);
        self.advance(x_next, v_next);
    }

    /// Advances one iteration and evaluates the KKT residuals of the
    /// pre-step iterate both directly and from the new differences:
    ///
    /// ```text
    /// Axₙ − Π_C vₙ                 = −α⁻¹(Aδxₙ₊₁ − δvₙ₊₁)
    /// Qxₙ + q + Aᵀ(I − Π_C)vₙ      = −α⁻¹((Q + I)δxₙ₊₁ + Aᵀδvₙ₊₁)
    /// ```
    pub fn step_with_residuals(&mut self) -> ResidualPair {
        let p = self.problem;
        let a = p.constraint_matrix();
        let (n, m) = (p.n(), p.m());
        let inv_alpha = 1.0 / self.settings.alpha;

        let mut ax = vec![0.0; m];
        a.matvec_into(&self.state.x, &mut ax);
        let mut qx = vec![0.0; n];
        p.quad().matvec_into(&self.state.x, &mut qx);
        let mut aty = vec![0.0; n];
        a.adjoint_matvec_into(&self.state.y, &mut aty);
        let primal_direct: Vec<f64> = (0..m).map(|i| ax[i] - self.state.z[i]).collect();
        let dual_direct: Vec<f64> = (0..n).map(|i| qx[i] + p.linear()[i] + aty[i]).collect();
        let scale = [
            norm_inf(&ax),
            norm_inf(&self.state.z),
            norm_inf(&qx),
            norm_inf(p.linear()),
            norm_inf(&aty),
            norm_inf(&self.state.x),
            norm_inf(&self.state.v),
        ]
        .into_iter()
        .fold(0.0, f64::max);

        self.step();

        let s = &self.state;
        let mut adx = vec![0.0; m];
        a.matvec_into(&s.dx, &mut adx);
        let mut qdx = vec![0.0; n];
        p.quad().matvec_into(&s.dx, &mut qdx);
        let mut atdv = vec![0.0; n];
        a.adjoint_matvec_into(&s.dv, &mut atdv);
        let primal_delta: Vec<f64> = (0..m).map(|i| -inv_alpha * (adx[i] - s.dv[i])).collect();
        let dual_delta: Vec<f64> = (0..n)
            .map(|i| -inv_alpha * (qdx[i] + s.dx[i] + atdv[i]))
            .collect();

        let gap = |u: &[f64], w: &[f64]| u.iter().zip(w).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        ResidualPair {
            direct: KktResiduals {
                primal: norm_inf(&primal_direct),
                dual: norm_inf(&dual_direct),
            },
            via_deltas: KktResiduals {
                primal: norm_inf(&primal_delta),
                dual: norm_inf(&dual_delta),
            },
            primal_gap: gap(&primal_direct, &primal_delta),
            dual_gap: gap(&dual_direct, &dual_delta),
            scale,
        }
    }

    fn advance(&mut self, x_next: Vec<f64>, v_next: Vec<f64>) {
        let s = &mut self.state;
        for i in 0..x_next.len() {
            s.dx[i] = x_next[i] - s.x[i];
        }
        for i in 0..v_next.len() {
            s.dv[i] = v_next[i] - s.v[i];
        }
        let z_old = s.z.clone();
        let y_old = s.y.clone();
        s.x = x_next;
        s.v = v_next;
        s.iter += 1;
        self.refresh_split();
        let s = &mut self.state;
        for i in 0..s.z.len() {
            s.dz[i] = s.z[i] - z_old[i];
            s.dy[i] = s.y[i] - y_old[i];
        }
    }

    fn refresh_split(&mut self) {
        let s = &mut self.state;
        self.problem.set().project_into(&s.v, &mut s.z);
        for i in 0..s.v.len() {
            s.y[i] = s.v[i] - s.z[i];
        }
    }

    /// KKT residuals of the current iterate `(xₙ, zₙ, yₙ)`.
    pub fn residuals(&self) -> KktResiduals {
        let s = &self.state;
        self.problem
            .kkt_residuals(&s.x, &s.z, &s.y)
            .expect("state dimensions match the problem")
    }

    /// Applies the termination policy to the current iterate. Requires at
    /// least two iterations so that the differences are meaningful.
    pub fn check_termination(&self) -> Option<SolveOutcome> {
        if self.state.iter < 2 {
            return None;
        }
        let s = &self.state;
        let view = IterateView {
            x: &s.x,
            z: &s.z,
            y: &s.y,
            dx: &s.dx,
            dy: &s.dy,
        };
        check_termination(self.problem, &view, &self.settings.tol).map(|t| SolveOutcome {
            status: t.status,
            iterations: s.iter,
            x: s.x.clone(),
            z: s.z.clone(),
            y: s.y.clone(),
            residuals: t.residuals,
            certificate: t.certificate,
            secondary_certificate: t.secondary,
            trace: Vec::new(),
        })
    }

    fn trace_row(&self) -> TraceRecord {
        let s = &self.state;
        trace_record(self.problem, s.iter, self.residuals(), &s.dx, &s.dy, None)
    }

    /// Iterates until a termination test fires or `max_iter` is reached. The
    /// solver keeps the final state.
    pub fn run(&mut self) -> SolveOutcome {
        let mut trace = Vec::new();
        let interval = self.settings.check_interval;
        while self.state.iter < self.settings.max_iter {
            self.step();
            if self.settings.trace {
                trace.push(self.trace_row());
            }
            if self.state.iter.is_multiple_of(interval) {
                if let Some(mut out) = self.check_termination() {
                    out.trace = trace;
                    return out;
                }
            }
        }
        if let Some(mut out) = self.check_termination() {
            out.trace = trace;
            return out;
        }
        let s = &self.state;
        SolveOutcome {
            status: Status::MaxIterations,
            iterations: s.iter,
            x: s.x.clone(),
            z: s.z.clone(),
            y: s.y.clone(),
            residuals: self.residuals(),
            certificate: None,
            secondary_certificate: None,
            trace,
        }
    }
}

/// Sets up, optionally warm-starts from `(x, v)`, and runs the solver.
pub fn solve(problem: &Problem, settings: DrSettings, warm: Option<(&[f64], &[f64])>) -> Result<SolveOutcome> {
    let mut solver = DrSolver::new(problem, settings)?;
    if let Some((x, v)) = warm {
        solver.warm_start(x, v)?;
    }
    Ok(solver.run())
}
