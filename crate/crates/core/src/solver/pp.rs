//! Proximal-point iteration on the KKT operator.
//!
//! Each outer step evaluates the resolvent `(xₙ₊₁, yₙ₊₁) = (I + γM)⁻¹(xₙ, yₙ)`.
//! Eliminating `y` leaves the strongly monotone equation
//!
//! ```text
//! F(x) = (I + γQ)x − xₙ + γq + γ²Aᵀ(I − Π_C)(Ax + γ⁻¹yₙ) = 0
//! ```
//!
//! after which `yₙ₊₁ = γ(I − Π_C)(Axₙ₊₁ + γ⁻¹yₙ)`. `F` is the gradient of a
//! 1-strongly convex function, so the root is unique. It is found either by a
//! semismooth Newton method with a backtracking line search on `‖F‖₂` or by
//! the damped fixed-point iteration `x ← x − τF(x)`.
//!
//! The resolvent is only computed to a tolerance, which lies outside the
//! exact-resolvent assumption the limit theory relies on. The default
//! tolerance is tightened with the outer residual to keep the inexactness
//! well below the quantities being detected.

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm2, norm_inf, DenseMatrix, SpdFactor};
use crate::problem::{KktResiduals, Problem};

use super::dr::ResidualPair;
use super::{check_termination, trace_record, validate_common, IterateView, SolveOutcome, Status, Tolerances, TraceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerMethod {
    SemismoothNewton,
    DampedFixedPoint,
}

impl InnerMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            InnerMethod::SemismoothNewton => "semismooth_newton",
            InnerMethod::DampedFixedPoint => "damped_fixed_point",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpSettings {
    /// Regularization parameter, `γ > 0`.
    pub gamma: f64,
    pub inner_method: InnerMethod,
    /// Fixed inner tolerance on `‖F‖∞`. `None` selects the adaptive default
    /// `max(1e-12, min(1e-10, 1e-3·outer residual))`.
    pub inner_tol_abs: Option<f64>,
    pub inner_max_iter: usize,
    pub tol: Tolerances,
    pub max_iter: usize,
    pub check_interval: usize,
    pub trace: bool,
}

impl Default for PpSettings {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            inner_method: InnerMethod::SemismoothNewton,
            inner_tol_abs: None,
            inner_max_iter: 1000,
            tol: Tolerances::default(),
            max_iter: 20_000,
            check_interval: 25,
            trace: false,
        }
    }
}

impl PpSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidConfig(format!("gamma must be positive, got {}", self.gamma)));
        }
        if let Some(t) = self.inner_tol_abs {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidConfig(format!("inner_tol_abs must be positive, got {t}")));
            }
        }
        if self.inner_max_iter == 0 {
            return Err(Error::InvalidConfig("inner_max_iter must be ≥ 1".into()));
        }
        validate_common(&self.tol, self.check_interval)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PpState {
    pub iter: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `Axₙ + γ⁻¹yₙ₋₁`
    pub v: Vec<f64>,
    /// `Π_C v`
    pub z: Vec<f64>,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub dv: Vec<f64>,
    pub dz: Vec<f64>,
    /// Inner iterations spent on the last resolvent.
    pub inner_iters: usize,
    /// Tolerance on `‖F‖∞` the last resolvent was solved to.
    pub inner_tol: f64,
}

/// Result of one resolvent evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolvent {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `Ax + γ⁻¹y_prev`
    pub v: Vec<f64>,
    pub inner_iters: usize,
    /// `‖F(x)‖∞` at the returned point.
    pub residual: f64,
}

pub struct PpSolver<'a> {
    problem: &'a Problem,
    settings: PpSettings,
    /// `1 / (1 + γ‖Q‖₂ + γ²‖A‖₂²)`
    tau: f64,
    /// `1 + γ‖Q‖₂ + γ‖A‖₂ + γ²‖A‖₂²`, used for the rounding floor.
    lipschitz: f64,
    state: PpState,
    last_outer_residual: f64,
}

impl<'a> PpSolver<'a> {
    /// Starts from `x₀ = 0`, `y₀ = 0`.
    pub fn new(problem: &'a Problem, settings: PpSettings) -> Result<Self> {
        settings.validate()?;
        let g = settings.gamma;
        let norm_q = problem.quad().spectral_norm_estimate();
        let norm_a = problem.constraint_matrix().spectral_norm_estimate();
        let (n, m) = (problem.n(), problem.m());
        let mut solver = Self {
            problem,
            settings,
            tau: 1.0 / (1.0 + g * norm_q + g * g * norm_a * norm_a),
            lipschitz: 1.0 + g * norm_q + g * norm_a + g * g * norm_a * norm_a,
            state: PpState {
                iter: 0,
                x: vec![0.0; n],
                y: vec![0.0; m],
                v: vec![0.0; m],
                z: vec![0.0; m],
                dx: vec![0.0; n],
                dy: vec![0.0; m],
                dv: vec![0.0; m],
                dz: vec![0.0; m],
                inner_iters: 0,
                inner_tol: 0.0,
            },
            last_outer_residual: f64::INFINITY,
        };
        solver.refresh_aux();
        Ok(solver)
    }

    /// Replaces `(x₀, y₀)`.
    pub fn warm_start(&mut self, x: &[f64], y: &[f64]) -> Result<()> {
        check_dim("warm start x", self.problem.n(), x.len())?;
        check_dim("warm start y", self.problem.m(), y.len())?;
        if x.iter().chain(y).any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("warm start"));
        }
        self.state.x.copy_from_slice(x);
        self.state.y.copy_from_slice(y);
        self.refresh_aux();
        self.last_outer_residual = f64::INFINITY;
        Ok(())
    }

    fn refresh_aux(&mut self) {
        let s = &mut self.state;
        self.problem.constraint_matrix().matvec_into(&s.x, &mut s.v);
        let inv_g = 1.0 / self.settings.gamma;
        for i in 0..s.v.len() {
            s.v[i] += inv_g * s.y[i];
        }
        self.problem.set().project_into(&s.v, &mut s.z);
    }

    pub fn state(&self) -> &PpState {
        &self.state
    }

    pub fn settings(&self) -> &PpSettings {
        &self.settings
    }

    /// Step size of the damped fixed-point inner method.
    pub fn fixed_point_step(&self) -> f64 {
        self.tau
    }

    /// Inner tolerance for a resolvent at `(x_prev, y_prev)`.
    ///
    /// Besides the configured or adaptive target, `‖F‖∞` cannot be driven
    /// below the rounding error of evaluating `F`, which grows with the
    /// magnitude of the iterates; the tolerance is never set below that.
    pub fn inner_tolerance(&self, x_prev: &[f64], y_prev: &[f64]) -> f64 {
        let target = self
            .settings
            .inner_tol_abs
            .unwrap_or_else(|| (1e-3 * self.last_outer_residual).clamp(1e-12, 1e-10));
        target.max(self.rounding_floor(x_prev, y_prev))
    }

    fn rounding_floor(&self, x_prev: &[f64], y_prev: &[f64]) -> f64 {
        let g = self.settings.gamma;
        let mag = 1.0 + norm_inf(x_prev) + g * norm_inf(self.problem.linear()) + norm_inf(y_prev);
        let dims = ((self.problem.n() + self.problem.m()) as f64).sqrt();
        16.0 * f64::EPSILON * mag * self.lipschitz * dims
    }

    /// Evaluates `F(x)`; returns `(F, y, v)` with `v = Ax + γ⁻¹y_prev` and
    /// `y = γ(v − Π_C v)`.
    fn residual_map(&self, x: &[f64], x_prev: &[f64], y_prev: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let p = self.problem;
        let g = self.settings.gamma;
        let (n, m) = (p.n(), p.m());
        let mut v = vec![0.0; m];
        p.constraint_matrix().matvec_into(x, &mut v);
        for i in 0..m {
            v[i] += y_prev[i] / g;
        }
        let mut z = vec![0.0; m];
        p.set().project_into(&v, &mut z);
        let y: Vec<f64> = (0..m).map(|i| g * (v[i] - z[i])).collect();
        let mut f = vec![0.0; n];
        p.quad().matvec_into(x, &mut f);
        let mut aty = vec![0.0; n];
        p.constraint_matrix().adjoint_matvec_into(&y, &mut aty);
        for i in 0..n {
            f[i] = x[i] - x_prev[i] + g * (f[i] + p.linear()[i]) + g * aty[i];
        }
        (f, y, v)
    }

    /// `I + γQ + γ²Aᵀ(I − D)A` with `D` an element of `∂Π_C(v)`.
    fn newton_matrix(&self, v: &[f64]) -> DenseMatrix {
        let p = self.problem;
        let g = self.settings.gamma;
        let (n, m) = (p.n(), p.m());
        let a = p.constraint_matrix();
        let mut d = DenseMatrix::zeros(m, m);
        p.set().projection_jacobian_into(v, &mut d, 0);
        // (I − D)A
        let mut b = DenseMatrix::zeros(m, n);
        for i in 0..m {
            for k in 0..m {
                let w = if i == k { 1.0 } else { 0.0 } - d.get(i, k);
                if w != 0.0 {
                    for j in 0..n {
                        b.set(i, j, b.get(i, j) + w * a.get(k, j));
                    }
                }
            }
        }
        let mut j = DenseMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = 0.0;
                for i in 0..m {
                    acc += a.get(i, r) * b.get(i, c);
                }
                let id = if r == c { 1.0 } else { 0.0 };
                j.set(r, c, id + g * p.quad().get(r, c) + g * g * acc);
            }
        }
        for r in 0..n {
            for c in r + 1..n {
                let s = 0.5 * (j.get(r, c) + j.get(c, r));
                j.set(r, c, s);
                j.set(c, r, s);
            }
        }
        j
    }

    /// Solves the resolvent equation at `(x_prev, y_prev)` to `‖F‖∞ ≤ tol`,
    /// starting the inner method from `guess`.
    pub fn resolvent(&self, x_prev: &[f64], y_prev: &[f64], tol: f64, guess: &[f64]) -> Result<Resolvent> {
        let p = self.problem;
        check_dim("resolvent x", p.n(), x_prev.len())?;
        check_dim("resolvent y", p.m(), y_prev.len())?;
        check_dim("resolvent guess", p.n(), guess.len())?;
        let mut x = guess.to_vec();
        let (mut f, mut y, mut v) = self.residual_map(&x, x_prev, y_prev);
        let mut best = (norm_inf(&f), x.clone());
        let mut iters = 0;
        loop {
            let res = norm_inf(&f);
            if res < best.0 {
                best = (res, x.clone());
            }
            if res <= tol {
                return Ok(Resolvent {
                    x,
                    y,
                    v,
                    inner_iters: iters,
                    residual: res,
                });
            }
            if iters == self.settings.inner_max_iter {
                return Err(Error::InnerSolve {
                    iterations: iters,
                    residual: best.0,
                    best: best.1,
                });
            }
            iters += 1;
            let newton = match self.settings.inner_method {
                InnerMethod::SemismoothNewton => self.newton_step(&x, &f, &v, x_prev, y_prev),
                InnerMethod::DampedFixedPoint => None,
            };
            match newton {
                Some((xn, fnew, yn, vn)) => {
                    x = xn;
                    f = fnew;
                    y = yn;
                    v = vn;
                }
                None => {
                    for i in 0..x.len() {
                        x[i] -= self.tau * f[i];
                    }
                    (f, y, v) = self.residual_map(&x, x_prev, y_prev);
                }
            }
        }
    }

    /// Newton direction with Armijo backtracking on `‖F‖₂²`. `None` when the
    /// direction cannot be computed or no acceptable step is found.
    #[allow(clippy::type_complexity)]
    fn newton_step(
        &self,
        x: &[f64],
        f: &[f64],
        v: &[f64],
        x_prev: &[f64],
        y_prev: &[f64],
    ) -> Option<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
        let factor = SpdFactor::new(&self.newton_matrix(v)).ok()?;
        let mut d: Vec<f64> = f.iter().map(|a| -a).collect();
        factor.solve_in_place(&mut d);
        let f0 = dot(f, f);
        let mut t = 1.0;
        for _ in 0..40 {
            let xt: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            let (ft, yt, vt) = self.residual_map(&xt, x_prev, y_prev);
            if norm2(&ft).powi(2) <= (1.0 - 1e-4 * t) * f0 {
                return Some((xt, ft, yt, vt));
            }
            t *= 0.5;
        }
        None
    }

    /// One outer step: resolvent, auxiliary iterates and differences.
    pub fn step(&mut self) -> Result<()> {
        let tol = self.inner_tolerance(&self.state.x, &self.state.y);
        let r = self.resolvent(&self.state.x, &self.state.y, tol, &self.state.x)?;
        let g = self.settings.gamma;
        let s = &mut self.state;
        let mut z = vec![0.0; r.v.len()];
        self.problem.set().project_into(&r.v, &mut z);
        for i in 0..s.x.len() {
            s.dx[i] = r.x[i] - s.x[i];
        }
        for i in 0..s.y.len() {
            s.dy[i] = r.y[i] - s.y[i];
            s.dv[i] = r.v[i] - s.v[i];
            s.dz[i] = z[i] - s.z[i];
        }
        s.x = r.x;
        s.y = r.y;
        s.v = r.v;
        s.z = z;
        s.iter += 1;
        s.inner_iters = r.inner_iters;
        s.inner_tol = tol;
        self.last_outer_residual = norm_inf(&s.dx).max(norm_inf(&s.dy)) / g;
        Ok(())
    }

    /// One outer step applied to `(x, y)` without touching the solver.
    /// Uses the configured inner tolerance, or `1e-12` when adaptive.
    pub fn apply(&self, x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let tol = self
            .settings
            .inner_tol_abs
            .unwrap_or(1e-12)
            .max(self.rounding_floor(x, y));
        let r = self.resolvent(x, y, tol, x)?;
        Ok((r.x, r.y))
    }

    /// KKT residuals of the current iterate `(xₙ, zₙ, yₙ)` evaluated directly
    /// and through the last differences:
    ///
    /// ```text
    /// Axₙ − Π_C vₙ                 =  γ⁻¹δyₙ
    /// Qxₙ + q + γAᵀ(I − Π_C)vₙ     = −γ⁻¹δxₙ   (up to ‖F‖/γ)
    /// ```
    pub fn residual_pair(&self) -> ResidualPair {
        let p = self.problem;
        let a = p.constraint_matrix();
        let (n, m) = (p.n(), p.m());
        let s = &self.state;
        let inv_g = 1.0 / self.settings.gamma;

        let mut ax = vec![0.0; m];
        a.matvec_into(&s.x, &mut ax);
        let mut qx = vec![0.0; n];
        p.quad().matvec_into(&s.x, &mut qx);
        let mut aty = vec![0.0; n];
        a.adjoint_matvec_into(&s.y, &mut aty);
        let primal_direct: Vec<f64> = (0..m).map(|i| ax[i] - s.z[i]).collect();
        let dual_direct: Vec<f64> = (0..n).map(|i| qx[i] + p.linear()[i] + aty[i]).collect();
        let primal_delta: Vec<f64> = s.dy.iter().map(|d| inv_g * d).collect();
        let dual_delta: Vec<f64> = s.dx.iter().map(|d| -inv_g * d).collect();
        let scale = [
            norm_inf(&ax),
            norm_inf(&s.z),
            norm_inf(&qx),
            norm_inf(p.linear()),
            norm_inf(&aty),
            norm_inf(&s.x),
            norm_inf(&s.v),
        ]
        .into_iter()
        .fold(0.0, f64::max);
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

    pub fn residuals(&self) -> KktResiduals {
        let s = &self.state;
        self.problem
            .kkt_residuals(&s.x, &s.z, &s.y)
            .expect("state dimensions match the problem")
    }

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
        trace_record(self.problem, s.iter, self.residuals(), &s.dx, &s.dy, Some(s.inner_iters))
    }

    /// Iterates until a termination test fires or `max_iter` is reached. The
    /// solver keeps the final state.
    pub fn run(&mut self) -> Result<SolveOutcome> {
        let mut trace = Vec::new();
        let interval = self.settings.check_interval;
        while self.state.iter < self.settings.max_iter {
            self.step()?;
            if self.settings.trace {
                trace.push(self.trace_row());
            }
            if self.state.iter.is_multiple_of(interval) {
                if let Some(mut out) = self.check_termination() {
                    out.trace = trace;
                    return Ok(out);
                }
            }
        }
        if let Some(mut out) = self.check_termination() {
            out.trace = trace;
            return Ok(out);
        }
        let s = &self.state;
        Ok(SolveOutcome {
            status: Status::MaxIterations,
            iterations: s.iter,
            x: s.x.clone(),
            z: s.z.clone(),
            y: s.y.clone(),
            residuals: self.residuals(),
            certificate: None,
            secondary_certificate: None,
            trace,
        })
    }
}

/// Sets up, optionally warm-starts from `(x, y)`, and runs the solver.
pub fn solve(problem: &Problem, settings: PpSettings, warm: Option<(&[f64], &[f64])>) -> Result<SolveOutcome> {
    let mut solver = PpSolver::new(problem, settings)?;
    if let Some((x, y)) = warm {
        solver.warm_start(x, y)?;
    }
    solver.run()
}
