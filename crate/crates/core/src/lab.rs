//! Seeded instance generators with known ground truth, and the Cesàro
//! oracle for projections of linearly diverging sequences.
//!
//! All randomness comes from SplitMix64 with the seed used directly as the
//! initial state; a uniform draw on `[−1, 1]` is `2·((u >> 11)·2⁻⁵³) − 1`
//! for the next output `u`. Every generator is a pure function of its
//! arguments.
//!
//! Generated constraint matrices are rescaled to unit spectral-norm estimate
//! and quadratic terms `Q = GᵀG` to unit spectral-norm estimate. Any
//! structural modification of `A` (row flips, rank-one corrections that place
//! `Ax*` on a prescribed point) happens before the rescaling and the
//! affected vectors are rescaled along with it.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm2, DenseMatrix};
use crate::problem::Problem;
use crate::sets::{ConvexSet, SetKind};

const INF: f64 = f64::INFINITY;

/// Deterministic source of uniform draws.
#[derive(Debug, Clone)]
pub struct Rng(SplitMix64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[−1, 1)`.
    pub fn symmetric(&mut self) -> f64 {
        2.0 * self.unit() - 1.0
    }

    /// Uniform on `[lo, hi)`.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn int(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    pub fn sign(&mut self) -> f64 {
        if self.next_u64() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn vector(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.symmetric()).collect()
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> DenseMatrix {
        let data = (0..rows * cols).map(|_| self.symmetric()).collect();
        DenseMatrix::new(rows, cols, data).expect("finite entries")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetFamily {
    Box,
    Orthant,
    TranslatedCone,
    BoxSoc,
}

impl SetFamily {
    pub const ALL: [SetFamily; 4] = [SetFamily::Box, SetFamily::Orthant, SetFamily::TranslatedCone, SetFamily::BoxSoc];

    pub fn as_str(self) -> &'static str {
        match self {
            SetFamily::Box => "box",
            SetFamily::Orthant => "orthant",
            SetFamily::TranslatedCone => "translated_cone",
            SetFamily::BoxSoc => "box_soc",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstanceFamily {
    Feasible,
    PrimalInfeasible,
    DualInfeasible,
}

impl InstanceFamily {
    pub const ALL: [InstanceFamily; 3] = [
        InstanceFamily::Feasible,
        InstanceFamily::PrimalInfeasible,
        InstanceFamily::DualInfeasible,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InstanceFamily::Feasible => "feasible",
            InstanceFamily::PrimalInfeasible => "primal_infeasible",
            InstanceFamily::DualInfeasible => "dual_infeasible",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Truth {
    Kkt { x: Vec<f64>, z: Vec<f64>, y: Vec<f64> },
    PrimalCertificate(Vec<f64>),
    DualCertificate(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceBundle {
    pub problem: Problem,
    pub truth: Truth,
    pub seed: u64,
    pub family: InstanceFamily,
    pub set_family: SetFamily,
    /// The certificate direction is unique up to positive scaling.
    pub unique_direction: bool,
}

impl InstanceBundle {
    /// Checks the stored truth: KKT residuals at most `eps`, or the
    /// certificate check at `eps`.
    pub fn truth_holds(&self, eps: f64) -> Result<bool> {
        let p = &self.problem;
        Ok(match &self.truth {
            Truth::Kkt { x, z, y } => {
                let r = p.kkt_residuals(x, z, y)?;
                r.primal <= eps && r.dual <= eps && p.set().contains(z, eps)? && {
                    // y ∈ N_C(z) ⟺ z = Π_C(z + y)
                    let v: Vec<f64> = z.iter().zip(y).map(|(a, b)| a + b).collect();
                    let pz = p.set().project(&v)?;
                    pz.iter().zip(z).all(|(a, b)| (a - b).abs() <= eps * (1.0 + b.abs()))
                }
            }
            Truth::PrimalCertificate(c) => p.check_primal_certificate(c, eps)?.passed,
            Truth::DualCertificate(c) => p.check_dual_certificate(c, eps)?.passed,
        })
    }
}

/// Dispatches to the generator for `family`.
pub fn generate(family: InstanceFamily, seed: u64, n: usize, m: usize, set_family: SetFamily) -> Result<InstanceBundle> {
    match family {
        InstanceFamily::Feasible => gen_feasible(seed, n, m, set_family),
        InstanceFamily::PrimalInfeasible => gen_primal_infeasible(seed, n, m, set_family),
        InstanceFamily::DualInfeasible => gen_dual_infeasible(seed, n, m, set_family),
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidInstance(msg.to_string()))
    }
}

/// `Q = GᵀG` with `G` of size `2n × n`, each row of `G` first projected onto
/// the orthogonal complement of `null_dir` when given, scaled to unit
/// spectral-norm estimate.
fn random_psd(rng: &mut Rng, n: usize, null_dir: Option<&[f64]>) -> DenseMatrix {
    let mut g = rng.matrix(2 * n, n);
    if null_dir.is_some() && n == 1 {
        return DenseMatrix::zeros(1, 1);
    }
    if let Some(d) = null_dir {
        for i in 0..g.rows() {
            remove_component(g.row_mut(i), d);
        }
    }
    let mut q = g.gram();
    let s = q.spectral_norm_estimate();
    if s > 0.0 {
        q.scale(1.0 / s);
    }
    symmetrize(&mut q);
    q
}

fn symmetrize(q: &mut DenseMatrix) {
    let n = q.rows();
    for i in 0..n {
        for j in i + 1..n {
            let s = 0.5 * (q.get(i, j) + q.get(j, i));
            q.set(i, j, s);
            q.set(j, i, s);
        }
    }
}

/// `v ← v − (⟨v,d⟩/‖d‖²)d`
fn remove_component(v: &mut [f64], d: &[f64]) {
    let c = dot(v, d) / dot(d, d);
    for (a, b) in v.iter_mut().zip(d) {
        *a -= c * b;
    }
}

fn project_columns_out(a: &mut DenseMatrix, d: &[f64]) {
    for j in 0..a.cols() {
        let col: Vec<f64> = (0..a.rows()).map(|i| a.get(i, j)).collect();
        let c = dot(&col, d) / dot(d, d);
        for i in 0..a.rows() {
            a.set(i, j, col[i] - c * d[i]);
        }
    }
}

/// Scales `a` to unit spectral-norm estimate; returns the factor `s` with
/// `a_new = a_old / s`.
fn normalize(a: &mut DenseMatrix) -> f64 {
    let s = a.spectral_norm_estimate();
    if s > 0.0 {
        a.scale(1.0 / s);
        s
    } else {
        1.0
    }
}

/// Entry away from zero: magnitude in `[lo, hi)` with random sign.
fn signed(rng: &mut Rng, lo: f64, hi: f64) -> f64 {
    rng.sign() * rng.range(lo, hi)
}

/// Vector with entries bounded away from zero and random signs.
fn separated_vector(rng: &mut Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| signed(rng, 0.3, 1.0)).collect()
}

/// Splits `m` constraint rows into `(box rows, cone rows)` for the Box×SOC
/// family.
fn box_soc_split(m: usize) -> (usize, usize) {
    let m2 = (m / 2).max(1);
    (m - m2, m2)
}

/// Number of equality rows for the translated-cone family. The set is
/// `(a₁ + {0}) × (a₂ + ℝ₊)`, or just the second factor when there are none.
fn zero_rows(m: usize) -> usize {
    m / 4
}

fn translated_cone(offset: Vec<f64>, k: usize) -> ConvexSet {
    let m = offset.len();
    let nonneg = ConvexSet::TranslatedCone {
        offset: offset[k..].to_vec(),
        cone: Box::new(ConvexSet::Nonnegative(m - k)),
    };
    if k == 0 {
        return nonneg;
    }
    let zero = ConvexSet::TranslatedCone {
        offset: offset[..k].to_vec(),
        cone: Box::new(ConvexSet::Zero(k)),
    };
    ConvexSet::Cartesian(vec![zero, nonneg])
}

fn box_soc(lower: Vec<f64>, upper: Vec<f64>, m2: usize) -> ConvexSet {
    if lower.is_empty() {
        ConvexSet::Cartesian(vec![ConvexSet::SecondOrderCone(m2)])
    } else {
        ConvexSet::Cartesian(vec![ConvexSet::Box { lower, upper }, ConvexSet::SecondOrderCone(m2)])
    }
}

/// Box bounds around `z` with a prescribed multiplier sign. Pushes
/// `(lower, upper, y)` for one coordinate.
fn box_coordinate(rng: &mut Rng, z: f64) -> (f64, f64, f64) {
    let r = rng.unit();
    let gap = |rng: &mut Rng| rng.range(0.2, 1.2);
    let far = |rng: &mut Rng, dir: f64| {
        if rng.chance(0.25) {
            dir * INF
        } else {
            z + dir * rng.range(0.2, 1.2)
        }
    };
    if r < 0.1 {
        (z, z, signed(rng, 0.2, 1.2))
    } else if r < 0.4 {
        let u = far(rng, 1.0);
        (z, u, -gap(rng))
    } else if r < 0.7 {
        let l = far(rng, -1.0);
        (l, z, gap(rng))
    } else {
        let l = far(rng, -1.0);
        let u = far(rng, 1.0);
        (l, u, 0.0)
    }
}

/// SOC point and normal with strict complementarity. Modes: interior,
/// boundary, apex.
fn soc_pair(rng: &mut Rng, k: usize) -> (Vec<f64>, Vec<f64>) {
    let mode = rng.int(0, 2);
    let tail = if k > 1 { rng.vector(k - 1) } else { Vec::new() };
    let nt = norm2(&tail);
    let mut z = vec![0.0; k];
    let mut y = vec![0.0; k];
    match mode {
        0 => {
            z[0] = nt + rng.range(0.2, 1.2);
            z[1..].copy_from_slice(&tail);
        }
        1 if k > 1 && nt > 0.0 => {
            let lambda = rng.range(0.2, 1.2);
            z[0] = nt;
            z[1..].copy_from_slice(&tail);
            y[0] = -lambda * nt;
            for i in 1..k {
                y[i] = lambda * tail[i - 1];
            }
        }
        _ => {
            y[0] = -(nt + rng.range(0.2, 1.2));
            y[1..].copy_from_slice(&tail);
        }
    }
    (z, y)
}

/// `A ← A + (target − Ax)xᵀ/‖x‖²` restricted to `rows`, so that
/// `(Ax)_rows = target` afterwards.
fn place_rows(a: &mut DenseMatrix, x: &[f64], rows: std::ops::Range<usize>, target: &[f64]) {
    let xx = dot(x, x);
    for (k, i) in rows.enumerate() {
        let c = (target[k] - dot(a.row(i), x)) / xx;
        for (aij, xj) in a.row_mut(i).iter_mut().zip(x) {
            *aij += c * xj;
        }
    }
}

/// Feasible problem with a known KKT triple `(x*, z*, y*)` and strict
/// complementarity. `Q` is positive definite, so `x*` is the unique
/// minimizer.
pub fn gen_feasible(seed: u64, n: usize, m: usize, set_family: SetFamily) -> Result<InstanceBundle> {
    require(n >= 1 && m >= 1, "feasible instances need n, m ≥ 1")?;
    let mut rng = Rng::new(seed);
    let q_mat = random_psd(&mut rng, n, None);
    let mut a = rng.matrix(m, n);
    let mut x = separated_vector(&mut rng, n);

    let (set, z, y) = match set_family {
        SetFamily::Box => {
            let s = normalize(&mut a);
            x.iter_mut().for_each(|v| *v *= s);
            let z = a.matvec(&x)?;
            let (mut lower, mut upper, mut y) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
            for i in 0..m {
                (lower[i], upper[i], y[i]) = box_coordinate(&mut rng, z[i]);
            }
            (ConvexSet::Box { lower, upper }, z, y)
        }
        SetFamily::Orthant => {
            let mut z = vec![0.0; m];
            let mut y = vec![0.0; m];
            for i in 0..m {
                if rng.chance(0.5) {
                    y[i] = -rng.range(0.2, 1.2);
                } else {
                    z[i] = rng.range(0.2, 1.2);
                }
            }
            place_rows(&mut a, &x, 0..m, &z);
            let s = normalize(&mut a);
            x.iter_mut().for_each(|v| *v *= s);
            (ConvexSet::Nonnegative(m), z, y)
        }
        SetFamily::TranslatedCone => {
            let s = normalize(&mut a);
            x.iter_mut().for_each(|v| *v *= s);
            let z = a.matvec(&x)?;
            let k = zero_rows(m);
            let mut offset = z.clone();
            let mut y = vec![0.0; m];
            for i in 0..m {
                if i < k {
                    y[i] = signed(&mut rng, 0.2, 1.2);
                } else if rng.chance(0.5) {
                    y[i] = -rng.range(0.2, 1.2);
                } else {
                    offset[i] -= rng.range(0.2, 1.2);
                }
            }
            (translated_cone(offset, k), z, y)
        }
        SetFamily::BoxSoc => {
            let (m1, m2) = box_soc_split(m);
            let (zc, yc) = soc_pair(&mut rng, m2);
            place_rows(&mut a, &x, m1..m, &zc);
            let s = normalize(&mut a);
            x.iter_mut().for_each(|v| *v *= s);
            let mut z = a.matvec(&x)?;
            z[m1..].copy_from_slice(&zc);
            let (mut lower, mut upper, mut y) = (vec![0.0; m1], vec![0.0; m1], vec![0.0; m]);
            for i in 0..m1 {
                (lower[i], upper[i], y[i]) = box_coordinate(&mut rng, z[i]);
            }
            y[m1..].copy_from_slice(&yc);
            (box_soc(lower, upper, m2), z, y)
        }
    };

    let qx = q_mat.matvec(&x)?;
    let aty = a.adjoint_matvec(&y)?;
    let q = qx.iter().zip(&aty).map(|(a, b)| -(a + b)).collect();
    let problem = Problem::new(q_mat, q, a, set)?;
    Ok(InstanceBundle {
        problem,
        truth: Truth::Kkt { x, z, y },
        seed,
        family: InstanceFamily::Feasible,
        set_family,
        unique_direction: false,
    })
}

/// Instance `index` of the seeded test suite for `family`: sizes drawn from
/// `1 ≤ n ≤ 20`, `2 ≤ m ≤ 20`, set families in rotation.
pub fn suite_instance(family: InstanceFamily, index: u64) -> InstanceBundle {
    let salt = match family {
        InstanceFamily::Feasible => 0x5eed_0001,
        InstanceFamily::PrimalInfeasible => 0x5eed_0002,
        InstanceFamily::DualInfeasible => 0x5eed_0003,
    };
    let mut rng = Rng::new(salt ^ (index << 20));
    let n = rng.int(1, 20);
    let m = rng.int(2, 20);
    let set_family = SetFamily::ALL[(index % 4) as usize];
    let seed = rng.next_u64();
    generate(family, seed, n, m, set_family).expect("suite sizes are valid")
}

/// Strongly primal infeasible problem with certificate `ȳ`: the columns of
/// `A` are orthogonal to `ȳ` and `σ_C(ȳ) < 0`. `Q` is positive definite, so
/// the dual is feasible. The certificate direction is unique when
/// `n ≥ m − 1`.
pub fn gen_primal_infeasible(seed: u64, n: usize, m: usize, set_family: SetFamily) -> Result<InstanceBundle> {
    require(n >= 1 && m >= 2, "primal infeasible instances need n ≥ 1, m ≥ 2")?;
    let mut rng = Rng::new(seed);
    let q_mat = random_psd(&mut rng, n, None);
    let mut a = rng.matrix(m, n);
    let beta = rng.range(0.5, 1.5);

    // Certificate with the sign pattern the set family requires, and the set.
    let (ybar, set) = match set_family {
        SetFamily::Box => {
            let ybar = box_certificate(&mut rng, m);
            let (lower, upper) = box_around(&mut rng, &ybar, beta);
            (ybar, ConvexSet::Box { lower, upper })
        }
        SetFamily::Orthant | SetFamily::TranslatedCone => {
            let k = if set_family == SetFamily::Orthant { 0 } else { zero_rows(m) };
            let mut ybar = vec![0.0; m];
            for (i, v) in ybar.iter_mut().enumerate() {
                *v = if i < k {
                    signed(&mut rng, 0.3, 1.0)
                } else if rng.chance(0.8) {
                    -rng.range(0.3, 1.0)
                } else {
                    0.0
                };
            }
            if ybar.iter().all(|v| *v == 0.0) {
                ybar[m - 1] = -rng.range(0.3, 1.0);
            }
            let offset = shifted_center(&mut rng, &ybar, beta);
            (ybar, translated_cone(offset, k))
        }
        SetFamily::BoxSoc => {
            let (m1, m2) = box_soc_split(m);
            let mut ybar = box_certificate(&mut rng, m1);
            let tail = rng.vector(m2 - 1);
            ybar.push(-(norm2(&tail) + rng.range(0.2, 1.0)));
            ybar.extend(tail);
            let (lower, upper) = box_around(&mut rng, &ybar[..m1], beta);
            (ybar, box_soc(lower, upper, m2))
        }
    };

    project_columns_out(&mut a, &ybar);
    normalize(&mut a);
    let q = rng.vector(n);
    let problem = Problem::new(q_mat, q, a, set)?;
    Ok(InstanceBundle {
        problem,
        truth: Truth::PrimalCertificate(ybar),
        seed,
        family: InstanceFamily::PrimalInfeasible,
        set_family,
        unique_direction: n + 1 >= m,
    })
}

/// Nonzero entries with random signs; one in five entries is zero.
fn box_certificate(rng: &mut Rng, len: usize) -> Vec<f64> {
    let mut y: Vec<f64> = (0..len)
        .map(|_| if rng.chance(0.2) { 0.0 } else { signed(rng, 0.3, 1.0) })
        .collect();
    if y.iter().all(|v| *v == 0.0) {
        y[0] = signed(rng, 0.3, 1.0);
    }
    y
}

/// `c = −βȳ + w` with `w ⟂ ȳ`, so `⟨c, ȳ⟩ = −β‖ȳ‖²`.
fn shifted_center(rng: &mut Rng, ybar: &[f64], beta: f64) -> Vec<f64> {
    let mut w = rng.vector(ybar.len());
    remove_component(&mut w, ybar);
    w.iter().zip(ybar).map(|(a, b)| a - beta * b).collect()
}

/// Box around a shifted center with `σ_C(ȳ) ≤ −½β‖ȳ‖²`: the side probed by
/// `ȳᵢ` sits at most `½β|ȳᵢ|` beyond the center, the other side is free and
/// possibly infinite.
fn box_around(rng: &mut Rng, ybar: &[f64], beta: f64) -> (Vec<f64>, Vec<f64>) {
    let c = shifted_center(rng, ybar, beta);
    let mut lower = vec![0.0; c.len()];
    let mut upper = vec![0.0; c.len()];
    for i in 0..c.len() {
        let near = 0.5 * beta * ybar[i].abs() * rng.unit();
        let far = if rng.chance(0.3) { INF } else { rng.range(0.1, 1.0) };
        if ybar[i] > 0.0 {
            upper[i] = c[i] + near;
            lower[i] = c[i] - far;
        } else if ybar[i] < 0.0 {
            lower[i] = c[i] - near;
            upper[i] = c[i] + far;
        } else {
            lower[i] = c[i] - far;
            upper[i] = c[i] + if rng.chance(0.3) { INF } else { rng.range(0.1, 1.0) };
        }
    }
    (lower, upper)
}

/// Strongly dual infeasible problem with certificate `x̄`: `null(Q) = span x̄`,
/// `Ax̄ ∈ rec C` and `⟨q, x̄⟩ < 0`. The primal is feasible, and the
/// certificate direction is always unique.
pub fn gen_dual_infeasible(seed: u64, n: usize, m: usize, set_family: SetFamily) -> Result<InstanceBundle> {
    require(n >= 1 && m >= 1, "dual infeasible instances need n, m ≥ 1")?;
    let mut rng = Rng::new(seed);
    let xbar = separated_vector(&mut rng, n);
    let q_mat = random_psd(&mut rng, n, Some(&xbar));
    let mut a = rng.matrix(m, n);

    // Rows orthogonal to x̄ keep Ax̄ at zero in that coordinate.
    let flat_rows = |rng: &mut Rng, a: &mut DenseMatrix, rows: std::ops::Range<usize>, p: f64| {
        for i in rows {
            if rng.chance(p) {
                remove_component(a.row_mut(i), &xbar);
            }
        }
    };
    // Flip rows so that (Ax̄)ᵢ ≥ 0.
    let flip_rows = |a: &mut DenseMatrix, rows: std::ops::Range<usize>| {
        for i in rows {
            if dot(a.row(i), &xbar) < 0.0 {
                a.row_mut(i).iter_mut().for_each(|v| *v = -*v);
            }
        }
    };

    let set = match set_family {
        SetFamily::Box => {
            flat_rows(&mut rng, &mut a, 0..m, 0.2);
            normalize(&mut a);
            let x0 = rng.vector(n);
            let (lower, upper) = recession_box(&mut rng, &a, &xbar, &x0, 0..m);
            ConvexSet::Box { lower, upper }
        }
        SetFamily::Orthant => {
            flat_rows(&mut rng, &mut a, 0..m, 0.2);
            flip_rows(&mut a, 0..m);
            normalize(&mut a);
            ConvexSet::Nonnegative(m)
        }
        SetFamily::TranslatedCone => {
            let k = zero_rows(m);
            flat_rows(&mut rng, &mut a, 0..k, 1.0);
            flat_rows(&mut rng, &mut a, k..m, 0.2);
            flip_rows(&mut a, k..m);
            normalize(&mut a);
            let x0 = rng.vector(n);
            let mut offset = a.matvec(&x0)?;
            for v in offset.iter_mut().skip(k) {
                *v -= rng.range(0.0, 1.0);
            }
            translated_cone(offset, k)
        }
        SetFamily::BoxSoc => {
            let (m1, m2) = box_soc_split(m);
            flat_rows(&mut rng, &mut a, 0..m1, 0.2);
            // Ax̄ strictly inside the cone.
            let w = a.matvec(&xbar)?;
            let tail_norm = norm2(&w[m1 + 1..]);
            let target = [tail_norm + rng.range(0.2, 1.0)];
            place_rows(&mut a, &xbar, m1..m1 + 1, &target);
            normalize(&mut a);
            // x0 = τx̄ is feasible for the cone block.
            let tau = rng.range(0.5, 1.5);
            let x0: Vec<f64> = xbar.iter().map(|v| tau * v).collect();
            let (lower, upper) = recession_box(&mut rng, &a, &xbar, &x0, 0..m1);
            box_soc(lower, upper, m2)
        }
    };

    let kappa = rng.range(0.5, 1.5);
    let mut q = rng.vector(n);
    remove_component(&mut q, &xbar);
    let xx = dot(&xbar, &xbar);
    for (qi, xi) in q.iter_mut().zip(&xbar) {
        *qi -= kappa * xi;
    }
    debug_assert!((dot(&q, &xbar) + kappa * xx).abs() <= 1e-12 * (1.0 + xx));
    let problem = Problem::new(q_mat, q, a, set)?;
    Ok(InstanceBundle {
        problem,
        truth: Truth::DualCertificate(xbar),
        seed,
        family: InstanceFamily::DualInfeasible,
        set_family,
        unique_direction: true,
    })
}

/// Box rows containing `Ax0`, unbounded along the sign of `(Ax̄)ᵢ` and
/// finite on both sides where `(Ax̄)ᵢ` vanishes.
fn recession_box(
    rng: &mut Rng,
    a: &DenseMatrix,
    xbar: &[f64],
    x0: &[f64],
    rows: std::ops::Range<usize>,
) -> (Vec<f64>, Vec<f64>) {
    let mut lower = Vec::with_capacity(rows.len());
    let mut upper = Vec::with_capacity(rows.len());
    // rows made orthogonal to x̄ carry only rounding error
    let tol = 1e-12;
    for i in rows {
        let w = dot(a.row(i), xbar);
        let z0 = dot(a.row(i), x0);
        let mut lo = z0 - rng.range(0.2, 1.2);
        let mut hi = z0 + rng.range(0.2, 1.2);
        if w > tol {
            hi = INF;
            if rng.chance(0.3) {
                lo = -INF;
            }
        } else if w < -tol {
            lo = -INF;
            if rng.chance(0.3) {
                hi = INF;
            }
        }
        lower.push(lo);
        upper.push(hi);
    }
    (lower, upper)
}

/// The disjoint-interval instance: `x ∈ ℝ`, `(x, x) ∈ [1, 2] × [3, 4]`.
/// Certificate `(1, −1)`.
pub fn disjoint_interval() -> InstanceBundle {
    let problem = Problem::new(
        DenseMatrix::zeros(1, 1),
        vec![0.0],
        DenseMatrix::from_rows(&[&[1.0], &[1.0]]),
        ConvexSet::Box {
            lower: vec![1.0, 3.0],
            upper: vec![2.0, 4.0],
        },
    )
    .expect("valid instance");
    InstanceBundle {
        problem,
        truth: Truth::PrimalCertificate(vec![1.0, -1.0]),
        seed: 0,
        family: InstanceFamily::PrimalInfeasible,
        set_family: SetFamily::Box,
        unique_direction: true,
    }
}

/// The unbounded-linear instance: minimize `−x` over `x ≥ 0`. Certificate
/// `(1)`.
pub fn unbounded_linear() -> InstanceBundle {
    let problem = Problem::new(
        DenseMatrix::zeros(1, 1),
        vec![-1.0],
        DenseMatrix::from_rows(&[&[1.0]]),
        ConvexSet::Box {
            lower: vec![0.0],
            upper: vec![INF],
        },
    )
    .expect("valid instance");
    InstanceBundle {
        problem,
        truth: Truth::DualCertificate(vec![1.0]),
        seed: 0,
        family: InstanceFamily::DualInfeasible,
        set_family: SetFamily::Box,
        unique_direction: true,
    }
}

/// Minimize `½x² − ½x` over `x ∈ [0, 1]`: `x* = 0.5`, `y* = 0`.
pub fn scalar_feasible() -> InstanceBundle {
    let problem = Problem::new(
        DenseMatrix::from_rows(&[&[1.0]]),
        vec![-0.5],
        DenseMatrix::from_rows(&[&[1.0]]),
        ConvexSet::Box {
            lower: vec![0.0],
            upper: vec![1.0],
        },
    )
    .expect("valid instance");
    InstanceBundle {
        problem,
        truth: Truth::Kkt {
            x: vec![0.5],
            z: vec![0.5],
            y: vec![0.0],
        },
        seed: 0,
        family: InstanceFamily::Feasible,
        set_family: SetFamily::Box,
        unique_direction: false,
    }
}

/// Random set of the given kind and dimension. Composite kinds draw their
/// parts from the non-composite kinds.
pub fn random_set(rng: &mut Rng, kind: SetKind, dim: usize) -> ConvexSet {
    match kind {
        SetKind::Box => {
            let mut lower = vec![0.0; dim];
            let mut upper = vec![0.0; dim];
            for i in 0..dim {
                let c = rng.symmetric();
                lower[i] = if rng.chance(0.25) { -INF } else { c - rng.range(0.0, 1.0) };
                upper[i] = if rng.chance(0.25) { INF } else { c + rng.range(0.0, 1.0) };
            }
            ConvexSet::Box { lower, upper }
        }
        SetKind::Nonnegative => ConvexSet::Nonnegative(dim),
        SetKind::Zero => ConvexSet::Zero(dim),
        SetKind::Point => ConvexSet::Point(rng.vector(dim)),
        SetKind::Halfspace => {
            let mut normal = rng.vector(dim);
            if norm2(&normal) < 1e-3 {
                normal[0] = 1.0;
            }
            ConvexSet::Halfspace {
                normal,
                offset: rng.symmetric(),
            }
        }
        SetKind::Ball => ConvexSet::Ball {
            center: rng.vector(dim),
            radius: rng.range(0.1, 2.0),
        },
        SetKind::SecondOrderCone => ConvexSet::SecondOrderCone(dim),
        SetKind::TranslatedCone => {
            let cone = match rng.int(0, 2) {
                0 => ConvexSet::Nonnegative(dim),
                1 => ConvexSet::SecondOrderCone(dim),
                _ => ConvexSet::Zero(dim),
            };
            ConvexSet::TranslatedCone {
                offset: rng.vector(dim),
                cone: Box::new(cone),
            }
        }
        SetKind::Cartesian => {
            let simple = [
                SetKind::Box,
                SetKind::Nonnegative,
                SetKind::Zero,
                SetKind::Point,
                SetKind::Halfspace,
                SetKind::Ball,
                SetKind::SecondOrderCone,
                SetKind::TranslatedCone,
            ];
            let mut parts = Vec::new();
            let mut left = dim;
            while left > 0 {
                let d = rng.int(1, left);
                let k = simple[rng.int(0, simple.len() - 1)];
                parts.push(random_set(rng, k, d));
                left -= d;
            }
            ConvexSet::Cartesian(parts)
        }
    }
}

/// Averages along `sₖ = s₀ + k·δs` at `k = n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CesaroWitness {
    /// `(1/n)Π_S(sₙ)`
    pub p_avg: Vec<f64>,
    /// `(1/n)(sₙ − Π_S(sₙ))`
    pub r_avg: Vec<f64>,
    /// `(1/n)⟨Π_S(sₙ), sₙ − Π_S(sₙ)⟩`
    pub inner_avg: f64,
    /// `sₙ − Π_S(sₙ)` itself.
    pub r: Vec<f64>,
}

/// Numerical witnesses for the limits of `(1/n)pₙ`, `(1/n)rₙ` and
/// `(1/n)⟨pₙ, rₙ⟩` with `pₙ = Π_S(sₙ)`, `rₙ = sₙ − pₙ`. They converge to
/// `Π_{rec S}(δs)`, `Π_{(rec S)°}(δs)` and `σ_S(Π_{(rec S)°}(δs))`.
pub fn cesaro_oracle(set: &ConvexSet, delta_s: &[f64], s0: &[f64], n: u64) -> Result<CesaroWitness> {
    check_dim("cesaro delta", set.dim(), delta_s.len())?;
    check_dim("cesaro start", set.dim(), s0.len())?;
    require(n >= 1, "cesaro oracle needs n ≥ 1")?;
    let nf = n as f64;
    let s: Vec<f64> = s0.iter().zip(delta_s).map(|(a, d)| a + nf * d).collect();
    let p = set.project(&s)?;
    let r: Vec<f64> = s.iter().zip(&p).map(|(a, b)| a - b).collect();
    Ok(CesaroWitness {
        p_avg: p.iter().map(|v| v / nf).collect(),
        r_avg: r.iter().map(|v| v / nf).collect(),
        inner_avg: dot(&p, &r) / nf,
        r,
    })
}
