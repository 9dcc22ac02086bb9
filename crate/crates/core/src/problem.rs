//! The convex QP `minimize ½⟨Qx,x⟩ + ⟨q,x⟩ subject to Ax ∈ C`, its KKT
//! residuals, and checkers for strong-infeasibility certificates.
//!
//! Certificate tests are made scale-free by comparing every quantity against
//! `eps · ‖candidate‖∞`:
//!
//! * primal infeasibility, candidate `ȳ`: `‖Aᵀȳ‖∞ ≤ eps‖ȳ‖∞` and
//!   `σ_C(ȳ) ≤ −eps‖ȳ‖∞`;
//! * dual infeasibility, candidate `x̄`: `‖Qx̄‖∞ ≤ eps‖x̄‖∞`,
//!   `dist(Ax̄, rec C) ≤ eps‖x̄‖∞` and `⟨q,x̄⟩ ≤ −eps‖x̄‖∞`.

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm_inf, DenseMatrix, SYMMETRY_TOL};
use crate::sets::ConvexSet;

/// Relative slack on the smallest eigenvalue of `Q` accepted as PSD.
const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    q_mat: DenseMatrix,
    q: Vec<f64>,
    a: DenseMatrix,
    set: ConvexSet,
}

impl Problem {
    /// Validates and assembles a problem. `Q` is symmetrized as `(Q + Qᵀ)/2`
    /// after the symmetry check.
    pub fn new(q_mat: DenseMatrix, q: Vec<f64>, a: DenseMatrix, set: ConvexSet) -> Result<Self> {
        let n = q.len();
        check_dim("Q rows", n, q_mat.rows())?;
        check_dim("Q cols", n, q_mat.cols())?;
        check_dim("A cols", n, a.cols())?;
        check_dim("set dimension", a.rows(), set.dim())?;
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("q"));
        }
        set.validate()?;
        let (diff, row, col) = q_mat.asymmetry();
        if diff > SYMMETRY_TOL {
            return Err(Error::NotSymmetric { row, col, diff });
        }
        let mut sym = q_mat.clone();
        for i in 0..n {
            for j in 0..n {
                sym.set(i, j, 0.5 * (q_mat.get(i, j) + q_mat.get(j, i)));
            }
        }
        let min_eig = sym.min_symmetric_eigenvalue();
        let scale = sym.as_slice().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if min_eig < -PSD_TOL * scale {
            return Err(Error::NotPositiveSemidefinite { min_eig });
        }
        Ok(Self {
            q_mat: sym,
            q,
            a,
            set,
        })
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// Number of constraint rows.
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn quad(&self) -> &DenseMatrix {
        &self.q_mat
    }

    pub fn linear(&self) -> &[f64] {
        &self.q
    }

    pub fn constraint_matrix(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn set(&self) -> &ConvexSet {
        &self.set
    }

    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        let qx = self.q_mat.matvec(x)?;
        Ok(0.5 * dot(&qx, x) + dot(&self.q, x))
    }

    /// Primal and dual KKT residuals of the triple `(x, z, y)`.
    pub fn kkt_residuals(&self, x: &[f64], z: &[f64], y: &[f64]) -> Result<KktResiduals> {
        check_dim("kkt x", self.n(), x.len())?;
        check_dim("kkt z", self.m(), z.len())?;
        check_dim("kkt y", self.m(), y.len())?;
        let ax = self.a.matvec(x)?;
        let primal = ax
            .iter()
            .zip(z)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        let qx = self.q_mat.matvec(x)?;
        let aty = self.a.adjoint_matvec(y)?;
        let dual = (0..self.n()).fold(0.0f64, |acc, i| acc.max((qx[i] + self.q[i] + aty[i]).abs()));
        Ok(KktResiduals { primal, dual })
    }

    /// Tests `ȳ` against the primal strong-infeasibility conditions.
    pub fn check_primal_certificate(&self, ybar: &[f64], eps: f64) -> Result<CertificateCheck> {
        check_dim("primal certificate", self.m(), ybar.len())?;
        let scale = norm_inf(ybar);
        if scale == 0.0 {
            return Err(Error::ZeroCertificate);
        }
        let metrics = self.primal_metrics(ybar);
        let CertificateMetrics::Primal {
            norm_adjoint,
            support,
        } = metrics
        else {
            unreachable!()
        };
        let passed = norm_adjoint <= eps * scale && support <= -eps * scale;
        Ok(CertificateCheck { passed, metrics })
    }

    /// Tests `x̄` against the dual strong-infeasibility conditions.
    pub fn check_dual_certificate(&self, xbar: &[f64], eps: f64) -> Result<CertificateCheck> {
        check_dim("dual certificate", self.n(), xbar.len())?;
        let scale = norm_inf(xbar);
        if scale == 0.0 {
            return Err(Error::ZeroCertificate);
        }
        let metrics = self.dual_metrics(xbar);
        let CertificateMetrics::Dual {
            norm_quad,
            dist_recession,
            linear_dot,
        } = metrics
        else {
            unreachable!()
        };
        let passed =
            norm_quad <= eps * scale && dist_recession <= eps * scale && linear_dot <= -eps * scale;
        Ok(CertificateCheck { passed, metrics })
    }

    /// Dispatches on `kind`.
    pub fn check_certificate(&self, kind: CertificateKind, vector: &[f64], eps: f64) -> Result<CertificateCheck> {
        match kind {
            CertificateKind::PrimalInfeasibility => self.check_primal_certificate(vector, eps),
            CertificateKind::DualInfeasibility => self.check_dual_certificate(vector, eps),
        }
    }

    pub(crate) fn primal_metrics(&self, ybar: &[f64]) -> CertificateMetrics {
        let mut aty = vec![0.0; self.n()];
        self.a.adjoint_matvec_into(ybar, &mut aty);
        CertificateMetrics::Primal {
            norm_adjoint: norm_inf(&aty),
            support: self.set.support_unchecked(ybar),
        }
    }

    pub(crate) fn dual_metrics(&self, xbar: &[f64]) -> CertificateMetrics {
        let mut qx = vec![0.0; self.n()];
        self.q_mat.matvec_into(xbar, &mut qx);
        let mut ax = vec![0.0; self.m()];
        self.a.matvec_into(xbar, &mut ax);
        let mut rec = vec![0.0; self.m()];
        self.set.project_recession_into(&ax, &mut rec);
        let dist = ax
            .iter()
            .zip(&rec)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        CertificateMetrics::Dual {
            norm_quad: norm_inf(&qx),
            dist_recession: dist,
            linear_dot: dot(&self.q, xbar),
        }
    }
}

/// `primal = ‖Ax − z‖∞`, `dual = ‖Qx + q + Aᵀy‖∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResiduals {
    pub primal: f64,
    pub dual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateKind {
    PrimalInfeasibility,
    DualInfeasibility,
}

impl CertificateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CertificateKind::PrimalInfeasibility => "primal_infeasibility",
            CertificateKind::DualInfeasibility => "dual_infeasibility",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CertificateMetrics {
    /// `‖Aᵀȳ‖∞` and `σ_C(ȳ)` (possibly `+∞`).
    Primal { norm_adjoint: f64, support: f64 },
    /// `‖Qx̄‖∞`, `dist(Ax̄, rec C)` and `⟨q, x̄⟩`.
    Dual {
        norm_quad: f64,
        dist_recession: f64,
        linear_dot: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateCheck {
    pub passed: bool,
    pub metrics: CertificateMetrics,
}

/// A nonzero vector proving primal or dual strong infeasibility, with the
/// metrics it was accepted on.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub vector: Vec<f64>,
    pub metrics: CertificateMetrics,
}

impl Certificate {
    /// Computes metrics for `vector` against `problem`.
    pub fn new(problem: &Problem, kind: CertificateKind, vector: Vec<f64>) -> Result<Self> {
        let expected = match kind {
            CertificateKind::PrimalInfeasibility => problem.m(),
            CertificateKind::DualInfeasibility => problem.n(),
        };
        check_dim("certificate", expected, vector.len())?;
        if norm_inf(&vector) == 0.0 {
            return Err(Error::ZeroCertificate);
        }
        let metrics = match kind {
            CertificateKind::PrimalInfeasibility => problem.primal_metrics(&vector),
            CertificateKind::DualInfeasibility => problem.dual_metrics(&vector),
        };
        Ok(Self { kind, vector, metrics })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    fn scalar_problem(qq: f64, q: f64, set: ConvexSet) -> Problem {
        Problem::new(
            DenseMatrix::from_rows(&[&[qq]]),
            vec![q],
            DenseMatrix::from_rows(&[&[1.0]]),
            set,
        )
        .unwrap()
    }

    fn half_line() -> ConvexSet {
        ConvexSet::Box {
            lower: vec![0.0],
            upper: vec![INF],
        }
    }

    fn disjoint_intervals() -> Problem {
        Problem::new(
            DenseMatrix::zeros(1, 1),
            vec![0.0],
            DenseMatrix::from_rows(&[&[1.0], &[1.0]]),
            ConvexSet::Box {
                lower: vec![1.0, 3.0],
                upper: vec![2.0, 4.0],
            },
        )
        .unwrap()
    }

    #[test]
    fn kkt_examples() {
        let p = scalar_problem(0.0, 0.0, half_line());
        let r = p.kkt_residuals(&[1.0], &[1.0], &[0.0]).unwrap();
        assert_eq!((r.primal, r.dual), (0.0, 0.0));
        let r = p.kkt_residuals(&[1.0], &[0.0], &[0.0]).unwrap();
        assert_eq!((r.primal, r.dual), (1.0, 0.0));
        let p = scalar_problem(1.0, 1.0, half_line());
        let r = p.kkt_residuals(&[0.0], &[0.0], &[2.0]).unwrap();
        assert_eq!(r.dual, 3.0);
        assert!(p.kkt_residuals(&[0.0, 1.0], &[0.0], &[0.0]).is_err());
    }

    #[test]
    fn primal_certificate_examples() {
        let p = disjoint_intervals();
        let ok = p.check_primal_certificate(&[1.0, -1.0], 1e-6).unwrap();
        assert!(ok.passed);
        assert_eq!(
            ok.metrics,
            CertificateMetrics::Primal {
                norm_adjoint: 0.0,
                support: -1.0
            }
        );
        let bad = p.check_primal_certificate(&[1.0, 1.0], 1e-6).unwrap();
        assert!(!bad.passed);
        assert!(matches!(bad.metrics, CertificateMetrics::Primal { norm_adjoint, .. } if norm_adjoint == 2.0));
        assert!(matches!(p.check_primal_certificate(&[0.0, 0.0], 1e-6), Err(Error::ZeroCertificate)));

        let orthant = Problem::new(
            DenseMatrix::zeros(1, 1),
            vec![0.0],
            DenseMatrix::from_rows(&[&[1.0], &[-1.0]]),
            ConvexSet::Nonnegative(2),
        )
        .unwrap();
        let c = orthant.check_primal_certificate(&[1.0, 1.0], 1e-6).unwrap();
        assert!(!c.passed);
        assert!(matches!(c.metrics, CertificateMetrics::Primal { support, .. } if support == INF));
    }

    #[test]
    fn dual_certificate_examples() {
        let p = scalar_problem(0.0, -1.0, half_line());
        assert!(p.check_dual_certificate(&[1.0], 1e-6).unwrap().passed);
        let p = scalar_problem(0.0, 1.0, half_line());
        let c = p.check_dual_certificate(&[1.0], 1e-6).unwrap();
        assert!(!c.passed);
        assert!(matches!(c.metrics, CertificateMetrics::Dual { linear_dot, .. } if linear_dot == 1.0));
        let p = scalar_problem(1.0, -1.0, half_line());
        let c = p.check_dual_certificate(&[1.0], 1e-6).unwrap();
        assert!(!c.passed);
        assert!(matches!(c.metrics, CertificateMetrics::Dual { norm_quad, .. } if norm_quad == 1.0));
        assert!(p.check_dual_certificate(&[0.0], 1e-6).is_err());
    }

    #[test]
    fn certificate_checks_are_scale_free() {
        let p = disjoint_intervals();
        for t in [1e-8, 1e-3, 1.0, 1e5] {
            assert!(p.check_primal_certificate(&[t, -t], 1e-6).unwrap().passed);
            assert!(!p.check_primal_certificate(&[t, t], 1e-6).unwrap().passed);
        }
    }

    #[test]
    fn rejects_invalid_problems() {
        let nonsym = DenseMatrix::from_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let a = DenseMatrix::identity(2);
        assert!(matches!(
            Problem::new(nonsym, vec![0.0; 2], a.clone(), ConvexSet::Zero(2)),
            Err(Error::NotSymmetric { .. })
        ));
        let indefinite = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert!(matches!(
            Problem::new(indefinite, vec![0.0; 2], a.clone(), ConvexSet::Zero(2)),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
        assert!(Problem::new(DenseMatrix::identity(2), vec![0.0; 2], a, ConvexSet::Zero(3)).is_err());
    }
}
