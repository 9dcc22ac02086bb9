//! Text formats: problem files (with an optional truth sidecar), outcome
//! files, warm-start and candidate files, and the per-iteration trace CSV.
//!
//! Problem and outcome files are JSON. Infinite values are written as the
//! strings `"inf"` and `"-inf"`; NaN is rejected everywhere. `Q` is stored as
//! its upper triangle and mirrored on load; `A` as a triplet list. Writing
//! is deterministic (shortest round-trip float formatting, fixed key order,
//! row-major triplets, zero entries omitted), so a parsed file written back
//! out is byte-identical to the input.

use std::fmt;
use std::io::Write;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::lab::{InstanceBundle, InstanceFamily, SetFamily, Truth};
use crate::linalg::DenseMatrix;
use crate::problem::{Certificate, CertificateKind, CertificateMetrics, Problem};
use crate::sets::ConvexSet;
use crate::solver::{SolveOutcome, TraceRecord};

/// A float that may be infinite, stored as a JSON number or `"inf"`/`"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ext(pub f64);

impl Serialize for Ext {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() {
            s.serialize_f64(v)
        } else if v == f64::INFINITY {
            s.serialize_str("inf")
        } else if v == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            Err(serde::ser::Error::custom("NaN cannot be written"))
        }
    }
}

impl<'de> Deserialize<'de> for Ext {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Ext;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Ext, E> {
                Ok(Ext(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Ext, E> {
                Ok(Ext(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Ext, E> {
                Ok(Ext(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Ext, E> {
                match v {
                    "inf" | "+inf" => Ok(Ext(f64::INFINITY)),
                    "-inf" => Ok(Ext(f64::NEG_INFINITY)),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

fn to_ext(v: &[f64]) -> Vec<Ext> {
    v.iter().map(|x| Ext(*x)).collect()
}

fn from_ext(v: &[Ext]) -> Vec<f64> {
    v.iter().map(|x| x.0).collect()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    n: usize,
    m: usize,
    #[serde(rename = "Q")]
    q_mat: Vec<(usize, usize, Ext)>,
    q: Vec<Ext>,
    #[serde(rename = "A")]
    a: Vec<(usize, usize, Ext)>,
    set: SetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    truth: Option<TruthSpec>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum SetSpec {
    Box { l: Vec<Ext>, u: Vec<Ext> },
    Nonneg { dim: usize },
    Zero { dim: usize },
    Point { value: Vec<Ext> },
    Halfspace { normal: Vec<Ext>, offset: Ext },
    Ball { center: Vec<Ext>, radius: Ext },
    Soc { dim: usize },
    TranslatedCone { offset: Vec<Ext>, cone: Box<SetSpec> },
    Cartesian { parts: Vec<SetSpec> },
}

impl SetSpec {
    fn from_set(set: &ConvexSet) -> Self {
        match set {
            ConvexSet::Box { lower, upper } => SetSpec::Box {
                l: to_ext(lower),
                u: to_ext(upper),
            },
            ConvexSet::Nonnegative(d) => SetSpec::Nonneg { dim: *d },
            ConvexSet::Zero(d) => SetSpec::Zero { dim: *d },
            ConvexSet::Point(p) => SetSpec::Point { value: to_ext(p) },
            ConvexSet::Halfspace { normal, offset } => SetSpec::Halfspace {
                normal: to_ext(normal),
                offset: Ext(*offset),
            },
            ConvexSet::Ball { center, radius } => SetSpec::Ball {
                center: to_ext(center),
                radius: Ext(*radius),
            },
            ConvexSet::SecondOrderCone(d) => SetSpec::Soc { dim: *d },
            ConvexSet::TranslatedCone { offset, cone } => SetSpec::TranslatedCone {
                offset: to_ext(offset),
                cone: Box::new(SetSpec::from_set(cone)),
            },
            ConvexSet::Cartesian(parts) => SetSpec::Cartesian {
                parts: parts.iter().map(SetSpec::from_set).collect(),
            },
        }
    }

    fn into_set(self) -> ConvexSet {
        match self {
            SetSpec::Box { l, u } => ConvexSet::Box {
                lower: from_ext(&l),
                upper: from_ext(&u),
            },
            SetSpec::Nonneg { dim } => ConvexSet::Nonnegative(dim),
            SetSpec::Zero { dim } => ConvexSet::Zero(dim),
            SetSpec::Point { value } => ConvexSet::Point(from_ext(&value)),
            SetSpec::Halfspace { normal, offset } => ConvexSet::Halfspace {
                normal: from_ext(&normal),
                offset: offset.0,
            },
            SetSpec::Ball { center, radius } => ConvexSet::Ball {
                center: from_ext(&center),
                radius: radius.0,
            },
            SetSpec::Soc { dim } => ConvexSet::SecondOrderCone(dim),
            SetSpec::TranslatedCone { offset, cone } => ConvexSet::TranslatedCone {
                offset: from_ext(&offset),
                cone: Box::new(cone.into_set()),
            },
            SetSpec::Cartesian { parts } => ConvexSet::Cartesian(parts.into_iter().map(SetSpec::into_set).collect()),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TruthSpec {
    family: String,
    set_family: String,
    seed: u64,
    unique_direction: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kkt: Option<KktSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    primal_cert: Option<Vec<Ext>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dual_cert: Option<Vec<Ext>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KktSpec {
    x: Vec<Ext>,
    z: Vec<Ext>,
    y: Vec<Ext>,
}

/// Ground truth carried next to a problem.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthRecord {
    pub family: InstanceFamily,
    pub set_family: SetFamily,
    pub seed: u64,
    pub unique_direction: bool,
    pub truth: Truth,
}

/// Contents of a problem file.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemDocument {
    pub problem: Problem,
    pub truth: Option<TruthRecord>,
}

impl From<&InstanceBundle> for ProblemDocument {
    fn from(b: &InstanceBundle) -> Self {
        ProblemDocument {
            problem: b.problem.clone(),
            truth: Some(TruthRecord {
                family: b.family,
                set_family: b.set_family,
                seed: b.seed,
                unique_direction: b.unique_direction,
                truth: b.truth.clone(),
            }),
        }
    }
}

impl ProblemDocument {
    pub fn into_bundle(self) -> Option<InstanceBundle> {
        let t = self.truth?;
        Some(InstanceBundle {
            problem: self.problem,
            truth: t.truth,
            seed: t.seed,
            family: t.family,
            set_family: t.set_family,
            unique_direction: t.unique_direction,
        })
    }
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn triplets(rows: usize, cols: usize, list: &[(usize, usize, Ext)], name: &str, upper: bool) -> Result<DenseMatrix> {
    let mut mat = DenseMatrix::zeros(rows, cols);
    let mut seen = std::collections::HashSet::new();
    for (k, &(i, j, Ext(v))) in list.iter().enumerate() {
        if i >= rows || j >= cols {
            return Err(format_err(format!(
                "\"{name}\" entry {k}: index ({i}, {j}) outside {rows}×{cols}"
            )));
        }
        if upper && i > j {
            return Err(format_err(format!(
                "\"{name}\" entry {k}: ({i}, {j}) lies below the diagonal; only the upper triangle is stored"
            )));
        }
        if !v.is_finite() {
            return Err(format_err(format!("\"{name}\" entry {k}: value must be finite")));
        }
        if !seen.insert((i, j)) {
            return Err(format_err(format!("\"{name}\" entry {k}: duplicate index ({i}, {j})")));
        }
        mat.set(i, j, v);
        if upper {
            mat.set(j, i, v);
        }
    }
    Ok(mat)
}

fn to_triplets(mat: &DenseMatrix, upper: bool) -> Vec<(usize, usize, Ext)> {
    let mut out = Vec::new();
    for i in 0..mat.rows() {
        let start = if upper { i } else { 0 };
        for j in start..mat.cols() {
            let v = mat.get(i, j);
            if v != 0.0 {
                out.push((i, j, Ext(v)));
            }
        }
    }
    out
}

fn truth_from_spec(spec: TruthSpec) -> Result<TruthRecord> {
    let family = InstanceFamily::parse(&spec.family)
        .ok_or_else(|| format_err(format!("truth: unknown family \"{}\"", spec.family)))?;
    let set_family = SetFamily::parse(&spec.set_family)
        .ok_or_else(|| format_err(format!("truth: unknown set family \"{}\"", spec.set_family)))?;
    let truth = match (spec.kkt, spec.primal_cert, spec.dual_cert) {
        (Some(k), None, None) => Truth::Kkt {
            x: from_ext(&k.x),
            z: from_ext(&k.z),
            y: from_ext(&k.y),
        },
        (None, Some(c), None) => Truth::PrimalCertificate(from_ext(&c)),
        (None, None, Some(c)) => Truth::DualCertificate(from_ext(&c)),
        _ => {
            return Err(format_err(
                "truth: exactly one of \"kkt\", \"primal_cert\", \"dual_cert\" is required",
            ))
        }
    };
    Ok(TruthRecord {
        family,
        set_family,
        seed: spec.seed,
        unique_direction: spec.unique_direction,
        truth,
    })
}

fn truth_to_spec(t: &TruthRecord) -> TruthSpec {
    let (mut kkt, mut primal_cert, mut dual_cert) = (None, None, None);
    match &t.truth {
        Truth::Kkt { x, z, y } => {
            kkt = Some(KktSpec {
                x: to_ext(x),
                z: to_ext(z),
                y: to_ext(y),
            })
        }
        Truth::PrimalCertificate(c) => primal_cert = Some(to_ext(c)),
        Truth::DualCertificate(c) => dual_cert = Some(to_ext(c)),
    }
    TruthSpec {
        family: t.family.as_str().to_string(),
        set_family: t.set_family.as_str().to_string(),
        seed: t.seed,
        unique_direction: t.unique_direction,
        kkt,
        primal_cert,
        dual_cert,
    }
}

/// Parses and validates a problem file.
pub fn parse_problem(text: &str) -> Result<ProblemDocument> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| format_err(e.to_string()))?;
    let (n, m) = (file.n, file.m);
    if file.q.len() != n {
        return Err(format_err(format!("\"q\" has {} entries, expected n = {n}", file.q.len())));
    }
    let q_mat = triplets(n, n, &file.q_mat, "Q", true)?;
    let a = triplets(m, n, &file.a, "A", false)?;
    let set = file.set.into_set();
    if set.dim() != m {
        return Err(format_err(format!("\"set\" has dimension {}, expected m = {m}", set.dim())));
    }
    let problem = Problem::new(q_mat, from_ext(&file.q), a, set)?;
    let truth = file.truth.map(truth_from_spec).transpose()?;
    Ok(ProblemDocument { problem, truth })
}

/// Serializes a problem document; the inverse of [`parse_problem`].
pub fn write_problem(doc: &ProblemDocument) -> String {
    let p = &doc.problem;
    let file = ProblemFile {
        n: p.n(),
        m: p.m(),
        q_mat: to_triplets(p.quad(), true),
        q: to_ext(p.linear()),
        a: to_triplets(p.constraint_matrix(), false),
        set: SetSpec::from_set(p.set()),
        truth: doc.truth.as_ref().map(truth_to_spec),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("finite problem data serializes");
    s.push('\n');
    s
}

/// Solver configuration recorded in an outcome file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub solver: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_tol_abs: Option<f64>,
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub eps_pinf: f64,
    pub eps_dinf: f64,
    pub max_iter: usize,
    pub check_interval: usize,
    pub warm_start: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct OutcomeFile {
    status: String,
    iterations: usize,
    residuals: ResidualSpec,
    x: Vec<Ext>,
    z: Vec<Ext>,
    y: Vec<Ext>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    secondary_certificate: Option<CertificateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config_echo: Option<ConfigEcho>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ResidualSpec {
    primal: Ext,
    dual: Ext,
}

#[derive(Debug, Serialize, Deserialize)]
struct CertificateSpec {
    kind: String,
    vector: Vec<Ext>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metrics: Option<MetricsSpec>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MetricsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    norm_adjoint: Option<Ext>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    support: Option<Ext>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    norm_quad: Option<Ext>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dist_recession: Option<Ext>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    linear_dot: Option<Ext>,
}

impl MetricsSpec {
    fn from_metrics(m: &CertificateMetrics) -> Self {
        match *m {
            CertificateMetrics::Primal { norm_adjoint, support } => MetricsSpec {
                norm_adjoint: Some(Ext(norm_adjoint)),
                support: Some(Ext(support)),
                norm_quad: None,
                dist_recession: None,
                linear_dot: None,
            },
            CertificateMetrics::Dual {
                norm_quad,
                dist_recession,
                linear_dot,
            } => MetricsSpec {
                norm_adjoint: None,
                support: None,
                norm_quad: Some(Ext(norm_quad)),
                dist_recession: Some(Ext(dist_recession)),
                linear_dot: Some(Ext(linear_dot)),
            },
        }
    }
}

fn certificate_spec(c: &Certificate) -> CertificateSpec {
    CertificateSpec {
        kind: c.kind.as_str().to_string(),
        vector: to_ext(&c.vector),
        metrics: Some(MetricsSpec::from_metrics(&c.metrics)),
    }
}

pub fn parse_kind(s: &str) -> Result<CertificateKind> {
    match s {
        "primal_infeasibility" => Ok(CertificateKind::PrimalInfeasibility),
        "dual_infeasibility" => Ok(CertificateKind::DualInfeasibility),
        other => Err(format_err(format!(
            "unknown certificate kind \"{other}\" (expected primal_infeasibility or dual_infeasibility)"
        ))),
    }
}

/// Serializes a solve outcome; the trace is written separately.
pub fn write_outcome(out: &SolveOutcome, config: &ConfigEcho) -> String {
    let file = OutcomeFile {
        status: out.status.as_str().to_string(),
        iterations: out.iterations,
        residuals: ResidualSpec {
            primal: Ext(out.residuals.primal),
            dual: Ext(out.residuals.dual),
        },
        x: to_ext(&out.x),
        z: to_ext(&out.z),
        y: to_ext(&out.y),
        certificate: out.certificate.as_ref().map(certificate_spec),
        secondary_certificate: out.secondary_certificate.as_ref().map(certificate_spec),
        config_echo: Some(config.clone()),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("outcome serializes");
    s.push('\n');
    s
}

/// Certificate candidate read for checking.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub kind: CertificateKind,
    pub vector: Vec<f64>,
    /// Tolerance the producing solver used for this kind, when recorded.
    pub solver_eps: Option<f64>,
}

/// Reads a candidate from an outcome file (its `certificate` member) or from
/// a bare `{"kind": ..., "vector": [...]}` object.
pub fn parse_candidate(text: &str) -> Result<Candidate> {
    let value: Value = serde_json::from_str(text).map_err(|e| format_err(e.to_string()))?;
    let (spec, echo) = if value.get("status").is_some() {
        let file: OutcomeFile = serde_json::from_value(value).map_err(|e| format_err(e.to_string()))?;
        let cert = file
            .certificate
            .ok_or_else(|| format_err(format!("outcome has status \"{}\" and no certificate", file.status)))?;
        (cert, file.config_echo)
    } else {
        let cert: CertificateSpec = serde_json::from_value(value).map_err(|e| format_err(e.to_string()))?;
        (cert, None)
    };
    let kind = parse_kind(&spec.kind)?;
    let vector = from_ext(&spec.vector);
    if vector.iter().any(|v| !v.is_finite()) {
        return Err(format_err("candidate vector must be finite"));
    }
    let solver_eps = echo.map(|e| match kind {
        CertificateKind::PrimalInfeasibility => e.eps_pinf,
        CertificateKind::DualInfeasibility => e.eps_dinf,
    });
    Ok(Candidate {
        kind,
        vector,
        solver_eps,
    })
}

/// Starting point read from a warm-start file: any JSON object with `"x"`
/// and some of `"v"`, `"y"`, `"z"`. Outcome files qualify.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct WarmStart {
    pub x: Vec<f64>,
    #[serde(default)]
    pub v: Option<Vec<f64>>,
    #[serde(default)]
    pub y: Option<Vec<f64>>,
    #[serde(default)]
    pub z: Option<Vec<f64>>,
}

impl WarmStart {
    /// `v` for the splitting method: `v` itself, else `z + y`.
    pub fn splitting_v(&self) -> Result<Vec<f64>> {
        if let Some(v) = &self.v {
            return Ok(v.clone());
        }
        match (&self.z, &self.y) {
            (Some(z), Some(y)) if z.len() == y.len() => Ok(z.iter().zip(y).map(|(a, b)| a + b).collect()),
            _ => Err(format_err("warm start needs \"v\", or both \"z\" and \"y\" of equal length")),
        }
    }

    /// `y` for the proximal-point method.
    pub fn proximal_y(&self) -> Result<Vec<f64>> {
        self.y
            .clone()
            .ok_or_else(|| format_err("warm start for the proximal-point method needs \"y\""))
    }
}

pub fn parse_warm(text: &str) -> Result<WarmStart> {
    serde_json::from_str(text).map_err(|e| format_err(e.to_string()))
}

const TRACE_COLUMNS: [&str; 10] = [
    "iter",
    "primal_res",
    "dual_res",
    "norm_dx",
    "norm_dy",
    "norm_At_dy",
    "support_dy",
    "norm_Q_dx",
    "q_dot_dx",
    "dist_rec",
];

/// Writes the trace CSV. The `inner_iters` column is added when
/// `with_inner` is set.
pub fn write_trace<W: Write>(w: &mut W, records: &[TraceRecord], with_inner: bool) -> std::io::Result<()> {
    let mut header = TRACE_COLUMNS.join(",");
    if with_inner {
        header.push_str(",inner_iters");
    }
    writeln!(w, "{header}")?;
    for r in records {
        write!(
            w,
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            r.iter,
            r.primal_res,
            r.dual_res,
            r.norm_dx,
            r.norm_dy,
            r.norm_at_dy,
            r.support_dy,
            r.norm_q_dx,
            r.q_dot_dx,
            r.dist_rec
        )?;
        if with_inner {
            write!(w, ",{}", r.inner_iters.unwrap_or(0))?;
        }
        writeln!(w)?;
    }
    Ok(())
}
