//! Acceptance suite. Each criterion prints one `criterion N: PASS|FAIL` line
//! (written past the test harness capture) and then asserts.

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;

use qpcert::io::{self as qio, ProblemDocument};
use qpcert::lab::{self, cesaro_oracle, random_set, suite_instance, InstanceBundle, InstanceFamily, Rng, Truth};
use qpcert::linalg::{dot, norm2, norm_inf, sub};
use qpcert::solver::{primal_candidate, DrSettings, DrSolver, PpSettings, PpSolver};
use qpcert::{CertificateKind, ConvexSet, SetKind, SolveOutcome, Status};

const SUITE: u64 = 100;

fn report(n: u32, pass: bool, detail: &str) {
    let line = format!("criterion {n}: {} {detail}\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(pass, "criterion {n}: {detail}");
}

fn angle(a: &[f64], b: &[f64]) -> f64 {
    (dot(a, b) / (norm2(a) * norm2(b))).clamp(-1.0, 1.0).acos()
}

fn truth_vector(b: &InstanceBundle) -> Option<&[f64]> {
    match &b.truth {
        Truth::PrimalCertificate(v) | Truth::DualCertificate(v) => Some(v),
        Truth::Kkt { .. } => None,
    }
}

fn expected_status(f: InstanceFamily) -> Status {
    match f {
        InstanceFamily::Feasible => Status::Solved,
        InstanceFamily::PrimalInfeasible => Status::PrimalInfeasible,
        InstanceFamily::DualInfeasible => Status::DualInfeasible,
    }
}

/// Final differences of a run, kept for the identity checks.
struct Deltas {
    dx: Vec<f64>,
    dy: Vec<f64>,
}

struct Run {
    index: u64,
    bundle: InstanceBundle,
    dr: SolveOutcome,
    dr_deltas: Deltas,
    pp: Result<SolveOutcome, String>,
    pp_deltas: Deltas,
}

fn run_instance(family: InstanceFamily, index: u64) -> Run {
    let bundle = suite_instance(family, index);
    let p = &bundle.problem;
    let mut dr = DrSolver::new(p, DrSettings::default()).expect("suite instance is valid");
    let dr_out = dr.run();
    let dr_deltas = Deltas {
        dx: dr.state().dx.clone(),
        dy: dr.state().dy.clone(),
    };
    let mut pp = PpSolver::new(p, PpSettings::default()).expect("suite instance is valid");
    let pp_out = pp.run().map_err(|e| e.to_string());
    let pp_deltas = Deltas {
        dx: pp.state().dx.clone(),
        dy: pp.state().dy.clone(),
    };
    Run {
        index,
        bundle,
        dr: dr_out,
        dr_deltas,
        pp: pp_out,
        pp_deltas,
    }
}

/// Both solvers on the 3 × 100 detection suite, computed once.
fn suite() -> &'static Vec<Run> {
    static CELL: OnceLock<Vec<Run>> = OnceLock::new();
    CELL.get_or_init(|| {
        let jobs: Vec<(InstanceFamily, u64)> = InstanceFamily::ALL
            .iter()
            .flat_map(|&f| (0..SUITE).map(move |i| (f, i)))
            .collect();
        let workers = std::thread::available_parallelism().map_or(4, |n| n.get()).min(16);
        let mut slots: Vec<Option<Run>> = (0..jobs.len()).map(|_| None).collect();
        std::thread::scope(|s| {
            let chunk = jobs.len().div_ceil(workers);
            for (jobs, slots) in jobs.chunks(chunk).zip(slots.chunks_mut(chunk)) {
                s.spawn(move || {
                    for ((f, i), slot) in jobs.iter().zip(slots.iter_mut()) {
                        *slot = Some(run_instance(*f, *i));
                    }
                });
            }
        });
        slots.into_iter().map(|r| r.expect("every job ran")).collect()
    })
}

fn family_runs(f: InstanceFamily) -> impl Iterator<Item = &'static Run> {
    suite().iter().filter(move |r| r.bundle.family == f)
}

fn certificate_rechecks(run: &Run, out: &SolveOutcome) -> bool {
    match &out.certificate {
        Some(c) => run
            .bundle
            .problem
            .check_certificate(c.kind, &c.vector, 1e-6)
            .map(|chk| chk.passed)
            .unwrap_or(false),
        None => true,
    }
}

#[test]
fn criterion_1_detection() {
    let mut details = Vec::new();
    let mut pass = true;
    for f in InstanceFamily::ALL {
        let mut correct = 0;
        let mut bad_certs = 0;
        let mut misses = Vec::new();
        for r in family_runs(f) {
            if r.dr.status == expected_status(f) {
                correct += 1;
            } else {
                misses.push(format!("#{}:{}", r.index, r.dr.status.as_str()));
            }
            if !certificate_rechecks(r, &r.dr) {
                bad_certs += 1;
            }
        }
        pass &= correct >= 99 && bad_certs == 0;
        details.push(format!(
            "{} {correct}/{SUITE} misses {misses:?} bad certificates {bad_certs}",
            f.as_str()
        ));
    }
    report(1, pass, &details.join("; "));
}

#[test]
fn criterion_2_pp_parity() {
    let mut mismatches = Vec::new();
    let mut inner_failures = 0;
    let mut bad_certs = 0;
    let mut worst: f64 = 0.0;
    let mut worst_truth: f64 = 0.0;
    let mut compared = 0;
    for r in suite() {
        let pp = match &r.pp {
            Ok(o) => o,
            Err(_) => {
                inner_failures += 1;
                continue;
            }
        };
        if !certificate_rechecks(r, pp) {
            bad_certs += 1;
        }
        if r.dr.status == Status::MaxIterations || pp.status == Status::MaxIterations {
            continue;
        }
        if r.dr.status != pp.status {
            mismatches.push(format!("{}#{}: dr {} pp {}", r.bundle.family.as_str(), r.index, r.dr.status.as_str(), pp.status.as_str()));
            continue;
        }
        if r.bundle.unique_direction {
            if let (Some(a), Some(b)) = (&r.dr.certificate, &pp.certificate) {
                worst = worst.max(angle(&a.vector, &b.vector));
                if let Some(t) = truth_vector(&r.bundle) {
                    worst_truth = worst_truth.max(angle(&a.vector, t)).max(angle(&b.vector, t));
                }
                compared += 1;
            }
        }
    }
    let pass = mismatches.is_empty() && inner_failures == 0 && bad_certs == 0 && worst <= 1e-3;
    report(
        2,
        pass,
        &format!(
            "status mismatches {} {:?}, inner failures {inner_failures}, bad certificates {bad_certs}, worst angle {worst:.2e} rad over {compared} unique-direction pairs (to truth {worst_truth:.2e})",
            mismatches.len(),
            mismatches
        ),
    );
}

#[test]
fn criterion_3_residual_identities() {
    let mut worst_dr: f64 = 0.0;
    let mut worst_pp: f64 = 0.0;
    let mut pass = true;
    for k in 0..20u64 {
        let b = suite_instance(InstanceFamily::ALL[(k % 3) as usize], 2000 + k);
        let p = &b.problem;
        let mut dr = DrSolver::new(p, DrSettings::default()).unwrap();
        let mut pp = PpSolver::new(p, PpSettings::default()).unwrap();
        for _ in 0..200 {
            let g = dr.step_with_residuals();
            let e = g.primal_gap.max(g.dual_gap) / (1.0 + g.scale);
            worst_dr = worst_dr.max(e);
            pass &= e <= 1e-10;

            pp.step().unwrap();
            let g = pp.residual_pair();
            let tol = f64::max(1e-10, 10.0 * pp.state().inner_tol);
            let e = g.primal_gap.max(g.dual_gap) / (1.0 + g.scale);
            worst_pp = worst_pp.max(e / tol);
            pass &= e <= tol;
        }
    }
    report(
        3,
        pass,
        &format!("worst relative gap dr {worst_dr:.2e} (tol 1e-10); pp worst gap/tol ratio {worst_pp:.2e}"),
    );
}

/// Relative errors of the `⟨q,δx⟩` identity and, when `σ_C` is finite
/// there, of the `σ_C` identity. `with_a` adds the `‖Aδx‖²` term of the
/// splitting method.
fn identity_errors(run: &Run, d: &Deltas, inv: f64, with_a: bool) -> (f64, Option<f64>) {
    let p = &run.bundle.problem;
    let nx = dot(&d.dx, &d.dx);
    let na = if with_a {
        let ax = p.constraint_matrix().matvec(&d.dx).unwrap();
        dot(&ax, &ax)
    } else {
        0.0
    };
    let eq = (dot(p.linear(), &d.dx) + inv * (nx + na)).abs() / (1.0 + nx);
    let c = primal_candidate(p, &d.dy);
    let s = p.set().support(&c).unwrap();
    let nc = dot(&c, &c);
    let es = s.is_finite().then(|| (s + inv * nc).abs() / (1.0 + nc));
    (eq, es)
}

#[test]
fn criterion_4_delta_identities() {
    let mut worst = [0.0f64; 4];
    let mut failures = Vec::new();
    let alpha = DrSettings::default().alpha;
    let gamma = PpSettings::default().gamma;
    let detected = |s: Status| matches!(s, Status::PrimalInfeasible | Status::DualInfeasible);
    for r in suite().iter().filter(|r| r.bundle.family != InstanceFamily::Feasible) {
        let id = format!("{}#{}", r.bundle.family.as_str(), r.index);
        let mut cases = Vec::new();
        if detected(r.dr.status) {
            cases.push(("dr", identity_errors(r, &r.dr_deltas, 1.0 / alpha, true), 0));
        }
        if r.pp.as_ref().is_ok_and(|o| detected(o.status)) {
            cases.push(("pp", identity_errors(r, &r.pp_deltas, 1.0 / gamma, false), 2));
        }
        for (name, (eq, es), slot) in cases {
            worst[slot] = worst[slot].max(eq);
            if eq > 1e-4 {
                failures.push(format!("{name} q-identity {id} {eq:.1e}"));
            }
            if let Some(es) = es {
                worst[slot + 1] = worst[slot + 1].max(es);
                if es > 1e-4 {
                    failures.push(format!("{name} σ-identity {id} {es:.1e}"));
                }
            }
        }
    }
    report(
        4,
        failures.is_empty(),
        &format!(
            "worst dr q {:.1e} σ {:.1e}, pp q {:.1e} σ {:.1e} (tol 1e-4); violations {:?}",
            worst[0], worst[1], worst[2], worst[3], failures
        ),
    );
}

#[test]
fn criterion_5_cesaro_oracle() {
    const N: u64 = 1_000_000;
    let mut worst = [0.0f64; 3];
    let mut worst_membership = f64::NEG_INFINITY;
    let mut kinds = std::collections::HashSet::new();
    let mut rng = Rng::new(0xce5a_0000);
    for i in 0..50 {
        let kind = SetKind::ALL[i % SetKind::ALL.len()];
        let dim = rng.int(1, 6);
        let set = random_set(&mut rng, kind, dim);
        kinds.insert(set.kind());
        let ds = rng.vector(dim);
        let s0 = rng.vector(dim);
        let w = cesaro_oracle(&set, &ds, &s0, N).unwrap();
        let rec = set.project_recession(&ds).unwrap();
        let polar = set.project_polar_recession(&ds).unwrap();
        worst[0] = worst[0].max(norm2(&sub(&w.p_avg, &rec)));
        worst[1] = worst[1].max(norm2(&sub(&w.r_avg, &polar)));
        let sigma = set.support(&polar).unwrap();
        if sigma.is_finite() {
            worst[2] = worst[2].max((w.inner_avg - sigma).abs());
        }
        // residuals lie in the polar of the recession cone; d comes from
        // unit-scale inputs, r is scaled down when it is large
        for _ in 0..20 {
            let d = set.project_recession(&rng.vector(dim)).unwrap();
            for r in [&w.r, &sub(&s0, &set.project(&s0).unwrap())] {
                worst_membership = worst_membership.max(dot(r, &d) / norm2(r).max(1.0));
            }
        }
    }
    let covered = kinds.len() == SetKind::ALL.len();
    let pass = covered && worst.iter().all(|&e| e <= 1e-3) && worst_membership <= 1e-10;
    report(
        5,
        pass,
        &format!(
            "n = 1e6 errors p {:.1e} r {:.1e} inner {:.1e} (tol 1e-3); worst ⟨r, d⟩/max(1, ‖r‖) {worst_membership:.1e} (tol 1e-10); kinds covered {}/9",
            worst[0],
            worst[1],
            worst[2],
            kinds.len()
        ),
    );
}

struct CalculusWorst {
    idempotence: f64,
    firm: f64,
    moreau_sum: f64,
    moreau_inner: f64,
    support: f64,
    normal_cone: f64,
    membership: f64,
}

fn calculus_for(kind: SetKind, w: &mut CalculusWorst) {
    let mut rng = Rng::new(0xca1c_0000 ^ ((kind as u64) << 32));
    for _ in 0..1000 {
        let dim = rng.int(1, 8);
        let set = random_set(&mut rng, kind, dim);
        let scale = [0.1, 1.0, 10.0][rng.int(0, 2)];
        let draw = |rng: &mut Rng| -> Vec<f64> { rng.vector(dim).iter().map(|v| v * scale).collect() };
        let (u, v, y) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));

        let pu = set.project(&u).unwrap();
        let pv = set.project(&v).unwrap();
        w.idempotence = w.idempotence.max(norm_inf(&sub(&set.project(&pv).unwrap(), &pv)));

        let dp = sub(&pu, &pv);
        w.firm = w.firm.max(dot(&dp, &dp) - dot(&dp, &sub(&u, &v)));

        let rec = set.project_recession(&v).unwrap();
        let pol = set.project_polar_recession(&v).unwrap();
        let sum: Vec<f64> = rec.iter().zip(&pol).map(|(a, b)| a + b).collect();
        w.moreau_sum = w.moreau_sum.max(norm_inf(&sub(&sum, &v)) / (f64::EPSILON * (1.0 + norm_inf(&v))));
        w.moreau_inner = w.moreau_inner.max(dot(&rec, &pol) / (1.0 + dot(&v, &v)));

        let sy = set.support(&y).unwrap();
        if sy.is_finite() {
            w.support = w.support.max(dot(&pu, &y) - sy);
        }

        let r = sub(&v, &pv);
        let sr = set.support(&r).unwrap();
        if sr.is_finite() {
            let pr = dot(&pv, &r);
            w.normal_cone = w.normal_cone.max((pr - sr).abs() / (1.0 + pr.abs()));
        }

        let d = set.project_recession(&u).unwrap();
        w.membership = w.membership.max(dot(&r, &d));
    }
}

fn soc_member(z: &[f64]) -> bool {
    norm2(&z[1..]) <= z[0] + 1e-12 * (1.0 + z[0].abs())
}

/// Largest amount by which any of 10⁴ sampled points of the set beats the
/// computed projection, over 20 cases.
fn brute_force(kind: SetKind) -> f64 {
    let mut rng = Rng::new(0xb2u64 ^ ((kind as u64) << 40));
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..20 {
        let dim = rng.int(2, 6);
        let set = random_set(&mut rng, kind, dim);
        let member = |z: &[f64]| match &set {
            ConvexSet::SecondOrderCone(_) => soc_member(z),
            ConvexSet::Halfspace { normal, offset } => dot(normal, z) <= offset + 1e-12,
            _ => unreachable!(),
        };
        let v: Vec<f64> = rng.vector(dim).iter().map(|x| 3.0 * x).collect();
        let p = set.project(&v).unwrap();
        assert!(member(&p), "projection must lie in the set");
        let dp = norm2(&sub(&v, &p));
        let mut best = f64::INFINITY;
        let mut samples = 0;
        while samples < 10_000 {
            // half global, half near the candidate
            let z: Vec<f64> = if samples % 2 == 0 {
                match &set {
                    ConvexSet::SecondOrderCone(_) => {
                        let mut z = rng.vector(dim);
                        let t = rng.range(0.0, 4.0);
                        let nx = norm2(&z[1..]).max(1e-300);
                        let radius = t * rng.unit();
                        for c in z[1..].iter_mut() {
                            *c *= radius / nx;
                        }
                        z[0] = t;
                        z
                    }
                    _ => rng.vector(dim).iter().map(|x| 4.0 * x).collect(),
                }
            } else {
                let radius = 10f64.powi(-(rng.int(1, 5) as i32));
                p.iter().map(|c| c + radius * rng.symmetric()).collect()
            };
            if !member(&z) {
                continue;
            }
            samples += 1;
            best = best.min(norm2(&sub(&v, &z)));
        }
        worst = worst.max(dp - best);
    }
    worst
}

#[test]
fn criterion_6_projection_calculus() {
    let mut w = CalculusWorst {
        idempotence: 0.0,
        firm: f64::NEG_INFINITY,
        moreau_sum: 0.0,
        moreau_inner: f64::NEG_INFINITY,
        support: f64::NEG_INFINITY,
        normal_cone: 0.0,
        membership: f64::NEG_INFINITY,
    };
    for kind in SetKind::ALL {
        calculus_for(kind, &mut w);
    }
    let soc = brute_force(SetKind::SecondOrderCone);
    let half = brute_force(SetKind::Halfspace);
    let pass = w.idempotence <= 1e-12
        && w.firm <= 1e-12
        && w.moreau_sum <= 1.0
        && w.moreau_inner <= 1e-10
        && w.support <= 1e-10
        && w.normal_cone <= 1e-9
        && w.membership <= 1e-10
        && soc <= 1e-6
        && half <= 1e-6;
    report(
        6,
        pass,
        &format!(
            "9 kinds × 1000: idempotence {:.1e}, firm excess {:.1e}, moreau sum {:.1}ε inner {:.1e}, support excess {:.1e}, normal cone {:.1e}, ⟨r,d⟩ {:.1e}; brute force soc {soc:.1e} halfspace {half:.1e}",
            w.idempotence, w.firm, w.moreau_sum, w.moreau_inner, w.support, w.normal_cone, w.membership
        ),
    );
}

#[test]
fn criterion_7_feasible_accuracy() {
    let mut ok = [0; 2];
    let mut worst = [0.0f64; 2];
    for r in family_runs(InstanceFamily::Feasible) {
        let Truth::Kkt { x, .. } = &r.bundle.truth else {
            unreachable!("feasible bundles carry KKT truth")
        };
        let outs = [Some(&r.dr), r.pp.as_ref().ok()];
        for (k, out) in outs.iter().enumerate() {
            if let Some(o) = out {
                let e = norm_inf(&sub(&o.x, x));
                worst[k] = worst[k].max(e);
                if o.status == Status::Solved && e <= 1e-4 {
                    ok[k] += 1;
                }
            }
        }
    }
    report(
        7,
        ok[0] >= 99 && ok[1] >= 99,
        &format!(
            "dr {}/{SUITE} (worst ‖x − x*‖∞ {:.2e}), pp {}/{SUITE} (worst {:.2e}), tol 1e-4",
            ok[0], worst[0], ok[1], worst[1]
        ),
    );
}

#[test]
fn criterion_8_nonexpansive() {
    const INNER_TOL: f64 = 1e-12;
    let mut worst_dr = f64::NEG_INFINITY;
    let mut worst_pp = f64::NEG_INFINITY;
    for k in 0..10u64 {
        let b = suite_instance(InstanceFamily::ALL[(k % 3) as usize], 1000 + k);
        let p = &b.problem;
        let (n, m) = (p.n(), p.m());
        let dr = DrSolver::new(p, DrSettings::default()).unwrap();
        let pp = PpSolver::new(
            p,
            PpSettings {
                inner_tol_abs: Some(INNER_TOL),
                ..Default::default()
            },
        )
        .unwrap();
        let mut rng = Rng::new(0x0e8 + k);
        let dist = |a: &[f64], b: &[f64], c: &[f64], d: &[f64]| {
            let (e, f) = (sub(a, c), sub(b, d));
            (dot(&e, &e) + dot(&f, &f)).sqrt()
        };
        for _ in 0..1000 {
            let sc = [0.1, 1.0, 10.0][rng.int(0, 2)];
            let mut draw = |len| -> Vec<f64> { rng.vector(len).iter().map(|v| v * sc).collect() };
            let (x1, v1, x2, v2) = (draw(n), draw(m), draw(n), draw(m));
            let before = dist(&x1, &v1, &x2, &v2);
            let (a1, b1) = dr.apply(&x1, &v1);
            let (a2, b2) = dr.apply(&x2, &v2);
            worst_dr = worst_dr.max(dist(&a1, &b1, &a2, &b2) - before);
            let (a1, b1) = pp.apply(&x1, &v1).unwrap();
            let (a2, b2) = pp.apply(&x2, &v2).unwrap();
            worst_pp = worst_pp.max(dist(&a1, &b1, &a2, &b2) - before);
        }
    }
    let pp_tol = 1e-9 + 10.0 * INNER_TOL;
    report(
        8,
        worst_dr <= 1e-12 && worst_pp <= pp_tol,
        &format!("worst excess dr {worst_dr:.2e} (tol 1e-12), pp {worst_pp:.2e} (tol {pp_tol:.1e}) over 10 × 1000 pairs"),
    );
}

fn qpcert(args: &[&str], dir: &Path) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qpcert"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn criterion_9_cli_contract() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut round_trip_ok = 0;
    let mut problems = Vec::new();
    for k in 0..50usize {
        let family = ["feasible", "primal-infeasible", "dual-infeasible"][k % 3];
        let sets = ["box", "orthant", "translated-cone", "box-soc"][(k / 3) % 4];
        let n = (1 + (7 * k) % 12).to_string();
        let m = (2 + (5 * k) % 11).to_string();
        let seed = (1000 + k).to_string();
        let name = format!("gen{k}.json");
        let args = ["generate", "--family", family, "--sets", sets, "--seed", &seed, "--n", &n, "--m", &m, "--out", &name];
        let (code, _) = qpcert(&args, d);
        if code != 0 {
            problems.push(format!("generate {k} exit {code}"));
            continue;
        }
        let text = std::fs::read_to_string(d.join(&name)).unwrap();
        match qio::parse_problem(&text) {
            Ok(doc) if qio::write_problem(&doc) == text => round_trip_ok += 1,
            Ok(_) => problems.push(format!("{name} changed on round trip")),
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    }

    let canonical = [
        ("disjoint.json", lab::disjoint_interval(), 10),
        ("unbounded.json", lab::unbounded_linear(), 11),
        ("feasible.json", lab::scalar_feasible(), 0),
    ];
    let mut codes = Vec::new();
    for (name, bundle, expected) in &canonical {
        std::fs::write(d.join(name), qio::write_problem(&ProblemDocument::from(bundle))).unwrap();
        for solver in ["dr", "pp"] {
            let out = format!("{solver}-{name}");
            let (code, _) = qpcert(&["solve", name, "--solver", solver, "--out", &out], d);
            codes.push(format!("{name}/{solver}→{code}"));
            if code != *expected {
                problems.push(format!("{name} with {solver}: exit {code}, expected {expected}"));
                continue;
            }
            let outcome: serde_json::Value =
                serde_json::from_str(&std::fs::read_to_string(d.join(&out)).unwrap()).unwrap();
            if let Truth::Kkt { x, .. } = &bundle.truth {
                let got: Vec<f64> = serde_json::from_value(outcome["x"].clone()).unwrap();
                if norm_inf(&sub(&got, x)) > 1e-4 {
                    problems.push(format!("{name} with {solver}: x off by more than 1e-4"));
                }
            } else {
                let (check, _) = qpcert(&["check", name, &out], d);
                if check != 0 {
                    problems.push(format!("{name} with {solver}: emitted certificate fails check"));
                }
                let kind = outcome["certificate"]["kind"].as_str().unwrap_or("");
                let want = if *expected == 10 {
                    CertificateKind::PrimalInfeasibility
                } else {
                    CertificateKind::DualInfeasibility
                };
                if kind != want.as_str() {
                    problems.push(format!("{name} with {solver}: certificate kind {kind}"));
                }
            }
        }
    }
    report(
        9,
        round_trip_ok == 50 && problems.is_empty(),
        &format!("{round_trip_ok}/50 byte-identical round trips; exits {}; problems {problems:?}", codes.join(" ")),
    );
}
