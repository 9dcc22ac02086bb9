//! Closed convex sets with exact projection, support-function, and
//! recession-cone calculus.
//!
//! Every [`ConvexSet`] denotes a nonempty closed convex subset of `ℝᵐ`. The
//! family is compositional: cones may be translated, and any sets may be
//! combined into a Cartesian product. Whole-space `ℝᵐ` is a box with all
//! bounds infinite.
//!
//! Second-order cones use the convention `{(t, x) : ‖x‖ ≤ t}` with the scalar
//! part `t` in the first coordinate.

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm2, norm_inf, DenseMatrix};

/// Relative tolerance used when deciding whether a vector lies in a polar
/// cone whose boundary is curved or lower dimensional (second-order cone,
/// halfspace normal ray).
pub const POLAR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    /// `{z : lower ≤ z ≤ upper}`; bounds may be infinite.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// `ℝᵐ₊`
    Nonnegative(usize),
    /// `{0} ⊂ ℝᵐ`
    Zero(usize),
    /// A single point.
    Point(Vec<f64>),
    /// `{z : ⟨normal, z⟩ ≤ offset}`
    Halfspace { normal: Vec<f64>, offset: f64 },
    /// `{z : ‖z − center‖ ≤ radius}`
    Ball { center: Vec<f64>, radius: f64 },
    /// `{(t, x) : ‖x‖ ≤ t}` in `ℝᵐ`.
    SecondOrderCone(usize),
    /// `offset + K` for `K` one of [`ConvexSet::Nonnegative`],
    /// [`ConvexSet::Zero`], [`ConvexSet::SecondOrderCone`].
    TranslatedCone {
        offset: Vec<f64>,
        cone: Box<ConvexSet>,
    },
    /// Product of the parts, in order.
    Cartesian(Vec<ConvexSet>),
}

/// Discriminant of a [`ConvexSet`], handy for reporting and test coverage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetKind {
    Box,
    Nonnegative,
    Zero,
    Point,
    Halfspace,
    Ball,
    SecondOrderCone,
    TranslatedCone,
    Cartesian,
}

impl SetKind {
    pub const ALL: [SetKind; 9] = [
        SetKind::Box,
        SetKind::Nonnegative,
        SetKind::Zero,
        SetKind::Point,
        SetKind::Halfspace,
        SetKind::Ball,
        SetKind::SecondOrderCone,
        SetKind::TranslatedCone,
        SetKind::Cartesian,
    ];
}

impl ConvexSet {
    pub fn whole_space(dim: usize) -> Self {
        ConvexSet::Box {
            lower: vec![f64::NEG_INFINITY; dim],
            upper: vec![f64::INFINITY; dim],
        }
    }

    pub fn kind(&self) -> SetKind {
        match self {
            ConvexSet::Box { .. } => SetKind::Box,
            ConvexSet::Nonnegative(_) => SetKind::Nonnegative,
            ConvexSet::Zero(_) => SetKind::Zero,
            ConvexSet::Point(_) => SetKind::Point,
            ConvexSet::Halfspace { .. } => SetKind::Halfspace,
            ConvexSet::Ball { .. } => SetKind::Ball,
            ConvexSet::SecondOrderCone(_) => SetKind::SecondOrderCone,
            ConvexSet::TranslatedCone { .. } => SetKind::TranslatedCone,
            ConvexSet::Cartesian(_) => SetKind::Cartesian,
        }
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Box { lower, .. } => lower.len(),
            ConvexSet::Nonnegative(d) | ConvexSet::Zero(d) | ConvexSet::SecondOrderCone(d) => *d,
            ConvexSet::Point(p) => p.len(),
            ConvexSet::Halfspace { normal, .. } => normal.len(),
            ConvexSet::Ball { center, .. } => center.len(),
            ConvexSet::TranslatedCone { offset, .. } => offset.len(),
            ConvexSet::Cartesian(parts) => parts.iter().map(ConvexSet::dim).sum(),
        }
    }

    /// Checks that the descriptor denotes a nonempty closed convex set.
    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidSet(msg));
        match self {
            ConvexSet::Box { lower, upper } => {
                check_dim("box bounds", lower.len(), upper.len())?;
                for (i, (&l, &u)) in lower.iter().zip(upper).enumerate() {
                    if l.is_nan() || u.is_nan() {
                        return invalid(format!("box bound {i} is NaN"));
                    }
                    if l == f64::INFINITY || u == f64::NEG_INFINITY {
                        return invalid(format!("box bound {i} excludes every real value"));
                    }
                    if l > u {
                        return invalid(format!("box lower bound {i} exceeds upper bound ({l} > {u})"));
                    }
                }
                Ok(())
            }
            ConvexSet::Nonnegative(_) | ConvexSet::Zero(_) => Ok(()),
            ConvexSet::SecondOrderCone(d) => {
                if *d == 0 {
                    invalid("second-order cone needs dimension ≥ 1".into())
                } else {
                    Ok(())
                }
            }
            ConvexSet::Point(p) => finite("point", p),
            ConvexSet::Halfspace { normal, offset } => {
                finite("halfspace normal", normal)?;
                if !offset.is_finite() {
                    return invalid("halfspace offset must be finite".into());
                }
                if norm_inf(normal) == 0.0 {
                    return invalid("halfspace normal must be nonzero".into());
                }
                Ok(())
            }
            ConvexSet::Ball { center, radius } => {
                finite("ball center", center)?;
                if !radius.is_finite() || *radius < 0.0 {
                    return invalid(format!("ball radius must be finite and ≥ 0, got {radius}"));
                }
                Ok(())
            }
            ConvexSet::TranslatedCone { offset, cone } => {
                finite("cone offset", offset)?;
                match cone.as_ref() {
                    ConvexSet::Nonnegative(_) | ConvexSet::Zero(_) | ConvexSet::SecondOrderCone(_) => {
                        cone.validate()?;
                        check_dim("translated cone offset", cone.dim(), offset.len())
                    }
                    other => invalid(format!(
                        "translated cone must wrap nonneg, zero or soc, got {:?}",
                        other.kind()
                    )),
                }
            }
            ConvexSet::Cartesian(parts) => {
                if parts.is_empty() {
                    return invalid("cartesian product needs at least one part".into());
                }
                parts.iter().try_for_each(ConvexSet::validate)
            }
        }
    }

    /// Euclidean projection `Π_C(v)`.
    pub fn project(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_dim("project", self.dim(), v.len())?;
        let mut out = vec![0.0; v.len()];
        self.project_into(v, &mut out);
        Ok(out)
    }

    /// Writes `Π_C(v)` into `out`. Dimensions are only debug-checked.
    pub fn project_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.dim());
        debug_assert_eq!(out.len(), v.len());
        match self {
            ConvexSet::Box { lower, upper } => {
                for i in 0..v.len() {
                    out[i] = v[i].max(lower[i]).min(upper[i]);
                }
            }
            ConvexSet::Nonnegative(_) => {
                for (o, &vi) in out.iter_mut().zip(v) {
                    *o = vi.max(0.0);
                }
            }
            ConvexSet::Zero(_) => out.iter_mut().for_each(|o| *o = 0.0),
            ConvexSet::Point(p) => out.copy_from_slice(p),
            ConvexSet::Halfspace { normal, offset } => {
                out.copy_from_slice(v);
                let excess = dot(normal, v) - offset;
                if excess > 0.0 {
                    let s = excess / dot(normal, normal);
                    for (o, a) in out.iter_mut().zip(normal) {
                        *o -= s * a;
                    }
                }
            }
            ConvexSet::Ball { center, radius } => {
                let dist = v
                    .iter()
                    .zip(center)
                    .map(|(a, c)| (a - c) * (a - c))
                    .sum::<f64>()
                    .sqrt();
                if dist <= *radius {
                    out.copy_from_slice(v);
                } else {
                    let s = radius / dist;
                    for i in 0..v.len() {
                        out[i] = center[i] + s * (v[i] - center[i]);
                    }
                }
            }
            ConvexSet::SecondOrderCone(_) => project_soc(v, out),
            ConvexSet::TranslatedCone { offset, cone } => {
                let shifted: Vec<f64> = v.iter().zip(offset).map(|(a, b)| a - b).collect();
                cone.project_into(&shifted, out);
                for (o, b) in out.iter_mut().zip(offset) {
                    *o += b;
                }
            }
            ConvexSet::Cartesian(parts) => {
                let mut start = 0;
                for part in parts {
                    let end = start + part.dim();
                    part.project_into(&v[start..end], &mut out[start..end]);
                    start = end;
                }
            }
        }
    }

    /// Support function `σ_C(y) = sup_{z∈C} ⟨z, y⟩`; returns `f64::INFINITY`
    /// when the supremum is unbounded.
    pub fn support(&self, y: &[f64]) -> Result<f64> {
        check_dim("support", self.dim(), y.len())?;
        Ok(self.support_unchecked(y))
    }

    pub(crate) fn support_unchecked(&self, y: &[f64]) -> f64 {
        match self {
            ConvexSet::Box { lower, upper } => {
                let mut total = 0.0;
                for i in 0..y.len() {
                    // 0·∞ = 0: zero components contribute nothing.
                    let term = if y[i] > 0.0 {
                        upper[i] * y[i]
                    } else if y[i] < 0.0 {
                        lower[i] * y[i]
                    } else {
                        0.0
                    };
                    if term == f64::INFINITY {
                        return f64::INFINITY;
                    }
                    total += term;
                }
                total
            }
            ConvexSet::Nonnegative(_) => {
                if y.iter().all(|&v| v <= 0.0) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ConvexSet::Zero(_) => 0.0,
            ConvexSet::Point(p) => dot(p, y),
            ConvexSet::Halfspace { normal, offset } => match halfspace_ray_coefficient(normal, y) {
                Some(t) => offset * t,
                None => f64::INFINITY,
            },
            ConvexSet::Ball { center, radius } => dot(center, y) + radius * norm2(y),
            ConvexSet::SecondOrderCone(_) => {
                if in_negative_soc(y) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ConvexSet::TranslatedCone { offset, cone } => {
                if cone.support_unchecked(y).is_finite() {
                    dot(offset, y)
                } else {
                    f64::INFINITY
                }
            }
            ConvexSet::Cartesian(parts) => {
                let mut total = 0.0;
                let mut start = 0;
                for part in parts {
                    let end = start + part.dim();
                    let s = part.support_unchecked(&y[start..end]);
                    if s == f64::INFINITY {
                        return f64::INFINITY;
                    }
                    total += s;
                    start = end;
                }
                total
            }
        }
    }

    /// Projection onto the recession cone `rec C`.
    pub fn project_recession(&self, d: &[f64]) -> Result<Vec<f64>> {
        check_dim("project_recession", self.dim(), d.len())?;
        let mut out = vec![0.0; d.len()];
        self.project_recession_into(d, &mut out);
        Ok(out)
    }

    pub(crate) fn project_recession_into(&self, d: &[f64], out: &mut [f64]) {
        match self {
            ConvexSet::Box { lower, upper } => {
                for i in 0..d.len() {
                    out[i] = match (lower[i].is_finite(), upper[i].is_finite()) {
                        (true, true) => 0.0,
                        (true, false) => d[i].max(0.0),
                        (false, true) => d[i].min(0.0),
                        (false, false) => d[i],
                    };
                }
            }
            ConvexSet::Nonnegative(_) | ConvexSet::Zero(_) | ConvexSet::SecondOrderCone(_) => {
                self.project_into(d, out)
            }
            ConvexSet::Point(_) | ConvexSet::Ball { .. } => out.iter_mut().for_each(|o| *o = 0.0),
            ConvexSet::Halfspace { normal, .. } => {
                out.copy_from_slice(d);
                let ad = dot(normal, d);
                if ad > 0.0 {
                    let s = ad / dot(normal, normal);
                    for (o, a) in out.iter_mut().zip(normal) {
                        *o -= s * a;
                    }
                }
            }
            ConvexSet::TranslatedCone { cone, .. } => cone.project_into(d, out),
            ConvexSet::Cartesian(parts) => {
                let mut start = 0;
                for part in parts {
                    let end = start + part.dim();
                    part.project_recession_into(&d[start..end], &mut out[start..end]);
                    start = end;
                }
            }
        }
    }

    /// Projection onto the polar of the recession cone, computed by Moreau
    /// subtraction `d − Π_{rec C}(d)`.
    pub fn project_polar_recession(&self, d: &[f64]) -> Result<Vec<f64>> {
        let rec = self.project_recession(d)?;
        Ok(d.iter().zip(&rec).map(|(a, b)| a - b).collect())
    }

    /// Euclidean distance from `d` to `rec C`.
    pub fn distance_to_recession(&self, d: &[f64]) -> Result<f64> {
        let rec = self.project_recession(d)?;
        Ok(d
            .iter()
            .zip(&rec)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }

    /// `true` iff `‖v − Π_C(v)‖∞ ≤ tol`.
    pub fn contains(&self, v: &[f64], tol: f64) -> Result<bool> {
        let p = self.project(v)?;
        Ok(v.iter().zip(&p).all(|(a, b)| (a - b).abs() <= tol))
    }

    /// Adds an element of the generalized Jacobian of `Π_C` at `v` into the
    /// diagonal block of `out` starting at `(offset, offset)`.
    ///
    /// At kinks the clamped branch is selected (derivative 0 for clamped
    /// coordinates, the projecting formula for curved boundaries).
    pub fn projection_jacobian_into(&self, v: &[f64], out: &mut DenseMatrix, offset: usize) {
        let k = v.len();
        let mut put = |i: usize, j: usize, val: f64| {
            let cur = out.get(offset + i, offset + j);
            out.set(offset + i, offset + j, cur + val);
        };
        match self {
            ConvexSet::Box { lower, upper } => {
                for i in 0..k {
                    if v[i] > lower[i] && v[i] < upper[i] {
                        put(i, i, 1.0);
                    }
                }
            }
            ConvexSet::Nonnegative(_) => {
                for i in 0..k {
                    if v[i] > 0.0 {
                        put(i, i, 1.0);
                    }
                }
            }
            ConvexSet::Zero(_) | ConvexSet::Point(_) => {}
            ConvexSet::Halfspace { normal, offset: b } => {
                for i in 0..k {
                    put(i, i, 1.0);
                }
                if dot(normal, v) >= *b {
                    let nn = dot(normal, normal);
                    for i in 0..k {
                        for j in 0..k {
                            put(i, j, -normal[i] * normal[j] / nn);
                        }
                    }
                }
            }
            ConvexSet::Ball { center, radius } => {
                let w: Vec<f64> = v.iter().zip(center).map(|(a, c)| a - c).collect();
                let nw = norm2(&w);
                if nw < *radius {
                    for i in 0..k {
                        put(i, i, 1.0);
                    }
                } else if nw > 0.0 {
                    let s = radius / nw;
                    for i in 0..k {
                        put(i, i, s);
                        for j in 0..k {
                            put(i, j, -s * w[i] * w[j] / (nw * nw));
                        }
                    }
                }
            }
            ConvexSet::SecondOrderCone(_) => soc_jacobian(v, &mut put),
            ConvexSet::TranslatedCone { offset: a, cone } => {
                let shifted: Vec<f64> = v.iter().zip(a).map(|(x, y)| x - y).collect();
                cone.projection_jacobian_into(&shifted, out, offset);
            }
            ConvexSet::Cartesian(parts) => {
                let mut start = 0;
                for part in parts {
                    let end = start + part.dim();
                    part.projection_jacobian_into(&v[start..end], out, offset + start);
                    start = end;
                }
            }
        }
    }
}

fn finite(what: &'static str, v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

fn project_soc(v: &[f64], out: &mut [f64]) {
    let t = v[0];
    let nx = norm2(&v[1..]);
    if nx <= t {
        out.copy_from_slice(v);
    } else if nx <= -t {
        out.iter_mut().for_each(|o| *o = 0.0);
    } else {
        let a = 0.5 * (t + nx);
        out[0] = a;
        let s = a / nx;
        for (o, x) in out[1..].iter_mut().zip(&v[1..]) {
            *o = s * x;
        }
    }
}

fn soc_jacobian(v: &[f64], put: &mut impl FnMut(usize, usize, f64)) {
    let k = v.len();
    let t = v[0];
    let nx = norm2(&v[1..]);
    if nx < t {
        for i in 0..k {
            put(i, i, 1.0);
        }
    } else if nx <= -t || nx == 0.0 {
        // clamped to the apex
    } else {
        let ratio = t / nx;
        put(0, 0, 0.5);
        for i in 1..k {
            let xi = v[i] / nx;
            put(0, i, 0.5 * xi);
            put(i, 0, 0.5 * xi);
            put(i, i, 0.5 * (1.0 + ratio));
            for j in 1..k {
                let xj = v[j] / nx;
                put(i, j, -0.5 * ratio * xi * xj);
            }
        }
    }
}

/// Membership in `−K` (the polar of the second-order cone), relative tolerance
/// [`POLAR_TOL`].
fn in_negative_soc(y: &[f64]) -> bool {
    let nx = norm2(&y[1..]);
    nx <= -y[0] + POLAR_TOL * norm2(y)
}

/// If `y = t·normal` with `t ≥ 0` (within [`POLAR_TOL`]), returns `t`.
fn halfspace_ray_coefficient(normal: &[f64], y: &[f64]) -> Option<f64> {
    let ny = norm2(y);
    if ny == 0.0 {
        return Some(0.0);
    }
    let nn = dot(normal, normal);
    let ay = dot(normal, y);
    let t = ay / nn;
    let off_ray = y
        .iter()
        .zip(normal)
        .map(|(yi, ai)| (yi - t * ai) * (yi - t * ai))
        .sum::<f64>()
        .sqrt();
    if off_ray <= POLAR_TOL * ny && ay >= -POLAR_TOL * ny * nn.sqrt() {
        Some(t.max(0.0))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const INF: f64 = f64::INFINITY;

    fn boxed(l: &[f64], u: &[f64]) -> ConvexSet {
        ConvexSet::Box {
            lower: l.to_vec(),
            upper: u.to_vec(),
        }
    }

    #[test]
    fn dims() {
        assert_eq!(boxed(&[0.0, 0.0], &[1.0, 1.0]).dim(), 2);
        let cart = ConvexSet::Cartesian(vec![boxed(&[0.0, 0.0], &[1.0, 1.0]), ConvexSet::SecondOrderCone(3)]);
        assert_eq!(cart.dim(), 5);
        assert_eq!(ConvexSet::Zero(4).dim(), 4);
    }

    #[test]
    fn projection_examples() {
        assert_eq!(boxed(&[0.0], &[1.0]).project(&[1.5]).unwrap(), vec![1.0]);
        let p = ConvexSet::SecondOrderCone(3).project(&[0.0, 2.0, 0.0]).unwrap();
        assert_abs_diff_eq!(p.as_slice(), [1.0, 1.0, 0.0].as_slice(), epsilon = 1e-15);
        let h = ConvexSet::Halfspace {
            normal: vec![1.0, 0.0],
            offset: 0.0,
        };
        assert_eq!(h.project(&[2.0, 3.0]).unwrap(), vec![0.0, 3.0]);
        assert!(h.project(&[1.0]).is_err());
    }

    #[test]
    fn projection_returns_members_unchanged() {
        let ball = ConvexSet::Ball {
            center: vec![1.0, 1.0],
            radius: 2.0,
        };
        assert_eq!(ball.project(&[1.5, 0.5]).unwrap(), vec![1.5, 0.5]);
        let soc = ConvexSet::SecondOrderCone(3);
        assert_eq!(soc.project(&[2.0, 1.0, -1.0]).unwrap(), vec![2.0, 1.0, -1.0]);
        assert_eq!(soc.project(&[-2.0, 1.0, -1.0]).unwrap(), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn support_examples() {
        assert_eq!(boxed(&[1.0, 3.0], &[2.0, 4.0]).support(&[1.0, -1.0]).unwrap(), -1.0);
        assert_eq!(ConvexSet::Nonnegative(2).support(&[-1.0, -2.0]).unwrap(), 0.0);
        assert_eq!(ConvexSet::Nonnegative(2).support(&[1.0, -2.0]).unwrap(), INF);
        let ball = ConvexSet::Ball {
            center: vec![0.0, 0.0],
            radius: 1.0,
        };
        assert_abs_diff_eq!(ball.support(&[3.0, 4.0]).unwrap(), 5.0, epsilon = 1e-15);
    }

    #[test]
    fn box_support_infinite_bounds() {
        let b = boxed(&[0.0, f64::NEG_INFINITY], &[INF, 2.0]);
        // zero components against infinite bounds contribute nothing
        assert_eq!(b.support(&[0.0, 1.0]).unwrap(), 2.0);
        assert_eq!(b.support(&[1.0, 1.0]).unwrap(), INF);
        assert_eq!(b.support(&[-1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(b.support(&[0.0, -1.0]).unwrap(), INF);
    }

    #[test]
    fn halfspace_support_needs_parallel_direction() {
        let h = ConvexSet::Halfspace {
            normal: vec![1.0, 1.0],
            offset: 3.0,
        };
        assert_abs_diff_eq!(h.support(&[2.0, 2.0]).unwrap(), 6.0, epsilon = 1e-14);
        assert_eq!(h.support(&[2.0, 1.0]).unwrap(), INF);
        assert_eq!(h.support(&[-1.0, -1.0]).unwrap(), INF);
        assert_eq!(h.support(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn translated_cone_support() {
        let c = ConvexSet::TranslatedCone {
            offset: vec![1.0, 2.0],
            cone: Box::new(ConvexSet::Nonnegative(2)),
        };
        assert_eq!(c.support(&[-1.0, -1.0]).unwrap(), -3.0);
        assert_eq!(c.support(&[1.0, -1.0]).unwrap(), INF);
        let s = ConvexSet::TranslatedCone {
            offset: vec![1.0, 0.0, 0.0],
            cone: Box::new(ConvexSet::SecondOrderCone(3)),
        };
        assert_eq!(s.support(&[-2.0, 1.0, 1.0]).unwrap(), -2.0);
        assert_eq!(s.support(&[-1.0, 1.0, 1.0]).unwrap(), INF);
    }

    #[test]
    fn recession_examples() {
        let half_line = boxed(&[0.0], &[INF]);
        assert_eq!(half_line.project_recession(&[-3.0]).unwrap(), vec![0.0]);
        assert_eq!(half_line.project_polar_recession(&[-3.0]).unwrap(), vec![-3.0]);
        let ball = ConvexSet::Ball {
            center: vec![4.0, -1.0],
            radius: 0.5,
        };
        assert_eq!(ball.project_recession(&[5.0, 5.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(ball.project_polar_recession(&[5.0, 5.0]).unwrap(), vec![5.0, 5.0]);
        let h = ConvexSet::Halfspace {
            normal: vec![1.0, 0.0],
            offset: 7.0,
        };
        assert_eq!(h.project_recession(&[2.0, 1.0]).unwrap(), vec![0.0, 1.0]);
        assert_eq!(
            ConvexSet::Nonnegative(2).project_polar_recession(&[3.0, -4.0]).unwrap(),
            vec![0.0, -4.0]
        );
    }

    #[test]
    fn distance_to_recession_examples() {
        assert_eq!(ConvexSet::Nonnegative(1).distance_to_recession(&[1.0]).unwrap(), 0.0);
        assert_eq!(ConvexSet::Nonnegative(1).distance_to_recession(&[-2.0]).unwrap(), 2.0);
        let b = boxed(&[0.0, 0.0], &[1.0, 1.0]);
        assert_abs_diff_eq!(b.distance_to_recession(&[3.0, 4.0]).unwrap(), 5.0, epsilon = 1e-15);
    }

    #[test]
    fn contains_examples() {
        let b = boxed(&[0.0], &[1.0]);
        assert!(b.contains(&[0.5], 0.0).unwrap());
        assert!(!b.contains(&[1.0000001], 1e-9).unwrap());
        assert!(ConvexSet::Zero(2).contains(&[0.0, 0.0], 0.0).unwrap());
        assert!(b.contains(&[0.5, 0.5], 0.0).is_err());
    }

    #[test]
    fn validation() {
        assert!(boxed(&[1.0], &[0.0]).validate().is_err());
        assert!(boxed(&[INF], &[INF]).validate().is_err());
        assert!(boxed(&[f64::NAN], &[1.0]).validate().is_err());
        assert!(ConvexSet::Halfspace {
            normal: vec![0.0, 0.0],
            offset: 1.0
        }
        .validate()
        .is_err());
        assert!(ConvexSet::Ball {
            center: vec![0.0],
            radius: -1.0
        }
        .validate()
        .is_err());
        let bad = ConvexSet::TranslatedCone {
            offset: vec![0.0],
            cone: Box::new(boxed(&[0.0], &[1.0])),
        };
        assert!(bad.validate().is_err());
        let mismatched = ConvexSet::TranslatedCone {
            offset: vec![0.0],
            cone: Box::new(ConvexSet::Nonnegative(2)),
        };
        assert!(mismatched.validate().is_err());
        assert!(ConvexSet::whole_space(3).validate().is_ok());
    }

    #[test]
    fn soc_jacobian_matches_finite_differences() {
        let soc = ConvexSet::SecondOrderCone(3);
        let v = [0.3, 1.0, -0.5];
        let mut jac = DenseMatrix::zeros(3, 3);
        soc.projection_jacobian_into(&v, &mut jac, 0);
        let h = 1e-7;
        for j in 0..3 {
            let mut vp = v;
            let mut vm = v;
            vp[j] += h;
            vm[j] -= h;
            let pp = soc.project(&vp).unwrap();
            let pm = soc.project(&vm).unwrap();
            for i in 0..3 {
                assert_abs_diff_eq!(jac.get(i, j), (pp[i] - pm[i]) / (2.0 * h), epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn ball_jacobian_matches_finite_differences() {
        let ball = ConvexSet::Ball {
            center: vec![0.5, -0.2],
            radius: 0.7,
        };
        let v = [2.0, 1.0];
        let mut jac = DenseMatrix::zeros(2, 2);
        ball.projection_jacobian_into(&v, &mut jac, 0);
        let h = 1e-7;
        for j in 0..2 {
            let mut vp = v;
            let mut vm = v;
            vp[j] += h;
            vm[j] -= h;
            let pp = ball.project(&vp).unwrap();
            let pm = ball.project(&vm).unwrap();
            for i in 0..2 {
                assert_abs_diff_eq!(jac.get(i, j), (pp[i] - pm[i]) / (2.0 * h), epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn cartesian_jacobian_is_block_diagonal() {
        let set = ConvexSet::Cartesian(vec![
            ConvexSet::Nonnegative(2),
            ConvexSet::Halfspace {
                normal: vec![1.0, 0.0],
                offset: 0.0,
            },
        ]);
        let mut jac = DenseMatrix::zeros(4, 4);
        set.projection_jacobian_into(&[1.0, -1.0, 2.0, 3.0], &mut jac, 0);
        let expected = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(jac.get(i, j), expected[i][j]);
            }
        }
    }
}
