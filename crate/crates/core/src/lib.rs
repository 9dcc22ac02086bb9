//! Convex quadratic programs over closed convex sets, solved by
//! Douglas-Rachford splitting or the proximal-point method, with detection of
//! primal and dual infeasibility through certificates built from the
//! differences of successive iterates.

pub mod cli;
pub mod error;
pub mod io;
pub mod lab;
pub mod linalg;
pub mod problem;
pub mod sets;
pub mod solver;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, SpdFactor};
pub use problem::{Certificate, CertificateCheck, CertificateKind, CertificateMetrics, KktResiduals, Problem};
pub use sets::{ConvexSet, SetKind};
pub use solver::{SolveOutcome, Status, Tolerances};
