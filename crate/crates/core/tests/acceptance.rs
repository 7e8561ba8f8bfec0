//! Acceptance summary: one line per criterion on stdout, uncaptured.

mod common;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::props::{self, Check};
use common::{eval_diffpoly, field_for, random_bpoly, random_extension, rf, t, Gen};
use diffweil::coeff::{BaseField, RatFunc};
use diffweil::diffpoly::{
    autoreduce, divide, index_factorial, indices_up_to, membership_test, Autoreduced, DerIndet, DiffPoly, DiffRing,
    PolPoly, RankedSet,
};
use diffweil::kernels::{alpha_beta, bound_c, validate_kernel, CoordSpec, KernelPresentation, KernelRejection};
use diffweil::prolong::{prolongation_equations, tau1_explicit};
use diffweil::weil::{
    check_thm32, check_thm33, descend_presentation, eval_b, prolong_b_point, standardize_descent, validate_extension,
    Coords, DerivationExpr, Descent, FreeExtension,
};
use proptest::test_runner::{Config, TestRunner};

const CORPUS_SIZE: usize = 24;

fn report(n: u32, ok: bool, detail: &str) {
    let line = format!("acceptance criterion {:>2}: {} ({})\n", n, if ok { "PASS" } else { "FAIL" }, detail);
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
}

fn finish(n: u32, failures: &[String], elapsed: Duration, limit: Duration, detail: &str) {
    let ok = failures.is_empty() && elapsed < limit;
    report(n, ok, &format!("{}; {} failures; {:.2?} of {:?} allowed", detail, failures.len(), elapsed, limit));
    assert!(failures.is_empty(), "criterion {}: {:?}", n, &failures);
    assert!(elapsed < limit, "criterion {}: took {:?}, limit {:?}", n, elapsed, limit);
}

fn example_43(delta_t: i64) -> Descent {
    let field = Arc::new(BaseField::new(vec!["t".into()], vec![vec![rf(delta_t)]]).unwrap());
    Descent::new(Arc::new(FreeExtension::quadratic(field, t(), "b").unwrap()), vec!["x".into()])
}

fn standardized(desc: &Descent) -> Vec<String> {
    let dx = DiffPoly::indet(DerIndet::new(0, vec![1]));
    let out = descend_presentation(desc, &[desc.scalar(&dx)], 1).unwrap();
    let ring = desc.y_ring();
    standardize_descent(desc, &out).iter().map(|p| ring.fmt(p)).collect()
}

#[test]
fn criterion_01_example_43() {
    let start = Instant::now();
    let got = standardized(&example_43(1));
    let elapsed = start.elapsed();
    let want = ["d y1", "d y2 + (1/(2*t))*y2"];
    // structural oracle: δy₂ + y₂/(2t) built directly
    let y = |var, o| DiffPoly::indet(DerIndet::new(var, vec![o]));
    let half_t = RatFunc::one().div(&(&t() * &rf(2))).unwrap();
    let desc = example_43(1);
    let dx = DiffPoly::indet(DerIndet::new(0, vec![1]));
    let out = descend_presentation(&desc, &[desc.scalar(&dx)], 1).unwrap();
    let polys = standardize_descent(&desc, &out);
    let mut failures = Vec::new();
    if got != want {
        failures.push(format!("got {:?}", got));
    }
    if polys != vec![y(0, 1), y(1, 1).add(&y(1, 0).scale(&half_t))] {
        failures.push("polynomials differ from δy₁, δy₂ + y₂/(2t)".into());
    }
    finish(1, &failures, elapsed, Duration::from_secs(1), &format!("{{{}}}", got.join(", ")));
}

#[test]
fn criterion_02_constant_basis() {
    let start = Instant::now();
    let desc = example_43(0);
    let got = standardized(&desc);
    let mut failures = Vec::new();
    if desc.ext().der(0, 1, 1) != &RatFunc::zero() {
        failures.push("δb should vanish when δt = 0".into());
    }
    if got != ["d y1", "d y2"] {
        failures.push(format!("got {:?}", got));
    }
    finish(2, &failures, start.elapsed(), Duration::from_secs(1), &format!("{{{}}}", got.join(", ")));
}

struct Case {
    desc: Descent,
    relations: Vec<Coords>,
}

fn corpus() -> Vec<Case> {
    let mut g = Gen::new(0xD1FF);
    (0..CORPUS_SIZE)
        .map(|i| {
            let ell = 2 + i % 2;
            let m = 1 + (i / 2) % 2;
            let ext = random_extension(&mut g, ell, m);
            let k = ext.base().k();
            let n = 1 + g.below(2);
            let relations = (0..1 + g.below(2)).map(|_| random_bpoly(&mut g, ell, k, n, m, 2)).collect();
            let gens = (1..=n).map(|j| format!("x{}", j)).collect();
            Case { desc: Descent::new(Arc::new(ext), gens), relations }
        })
        .collect()
}

/// A random B-point prolonged to order `s`, with its λ-coordinates.
fn random_point(g: &mut Gen, desc: &Descent, s: u32) -> (BTreeMap<DerIndet, Vec<RatFunc>>, BTreeMap<DerIndet, RatFunc>) {
    let ext = desc.ext();
    let k = ext.base().k();
    let base: Vec<_> = (0..desc.gens().len()).map(|_| (0..ext.ell()).map(|_| g.small_value(k)).collect()).collect();
    let bpt = prolong_b_point(ext, &base, s);
    let mut wpt = BTreeMap::new();
    for (v, val) in &bpt {
        for (i, c) in val.iter().enumerate() {
            wpt.insert(desc.w_var(v.var, i, &v.xi), c.clone());
        }
    }
    (bpt, wpt)
}

#[test]
fn criterion_03_unit_map_identity() {
    let start = Instant::now();
    let cases = corpus();
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut g = Gen::new(3);
    for (c, case) in cases.iter().enumerate() {
        let ext = case.desc.ext();
        if let Some(r) = validate_extension(ext) {
            failures.push(format!("case {}: extension rejected: {}", c, r.identity));
            continue;
        }
        // |θ| ≤ 2 on the generators needs the fragment up to order 3
        let rep = check_thm32(&case.desc, &case.relations, 3);
        checked += rep.checked;
        failures.extend(rep.failures.iter().map(|f| format!("case {}: {}", c, f)));
        // evaluation oracle on a fresh order-1 relation: λ(W(∂f)) at the
        // coordinates of a differential point equals the coordinates of δ(f(b))
        let (ell, k, n, m) = (ext.ell(), ext.base().k(), case.desc.gens().len(), ext.m());
        let f: Coords = random_bpoly(&mut g, ell, k, n, m, 1)
            .iter()
            .map(|p| p.map_coeffs(|c| RatFunc::from_poly(c.numer().clone())))
            .collect();
        let (bpt, wpt) = random_point(&mut g, &case.desc, 2);
        let fb = eval_b(ext, &f, &bpt).unwrap();
        for d in 0..m {
            let lhs: Vec<RatFunc> =
                case.desc.descend_poly(&case.desc.derive_bpoly(d, &f)).iter().map(|p| eval_diffpoly(p, &wpt)).collect();
            checked += 1;
            if lhs != ext.derive(d, &fb) {
                failures.push(format!("case {}: evaluation oracle disagrees for d{}", c, d + 1));
            }
        }
    }
    finish(
        3,
        &failures,
        start.elapsed(),
        Duration::from_secs(60),
        &format!("{} extensions, {} identities", cases.len(), checked),
    );
}

#[test]
fn criterion_04_descended_derivations() {
    let start = Instant::now();
    let cases = corpus();
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut g = Gen::new(4);
    for (c, case) in cases.iter().enumerate() {
        let desc = &case.desc;
        let base = desc.ext().base();
        let k = base.k();
        let (a1, a2) = (g.nonzero_ratfunc(k), g.nonzero_ratfunc(k));
        let (p1, p2) = (DerivationExpr::Natural(0), DerivationExpr::Natural(desc.m() - 1));
        let rep = check_thm33(desc, &p1, &p2, &a1, &a2, 2);
        checked += rep.checked;
        failures.extend(rep.failures.iter().map(|f| format!("case {}: {}", c, f)));
        // a noncommuting pair: ∂₁ and c·∂₁ with δ₁c ≠ 0
        let scaled = DerivationExpr::Combo(vec![(t(), DerivationExpr::Natural(0))]);
        let rep = check_thm33(desc, &p1, &scaled, &a1, &a2, 2);
        checked += rep.checked;
        failures.extend(rep.failures.iter().map(|f| format!("case {} (noncommuting): {}", c, f)));
        // independent path: the natural derivations against their closed form
        for tv in 0..desc.gens().len() {
            for theta in indices_up_to(desc.m(), 2) {
                for i in 0..desc.ell() {
                    let w = desc.w_var(tv, i, &theta);
                    for d in 0..desc.m() {
                        checked += 1;
                        let via_expr = DerivationExpr::Natural(d).descended_on(desc, &w);
                        if via_expr != desc.descended_derivation(d, tv, i, &theta) {
                            failures.push(format!("case {}: d{} disagrees with its closed form", c, d + 1));
                        }
                    }
                }
            }
        }
    }
    finish(4, &failures, start.elapsed(), Duration::from_secs(60), &format!("{} identities", checked));
}

#[test]
fn criterion_05_bound_closed_forms() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut push = |what: String, got: Result<u64, diffweil::Error>, want: u64| match got {
        Ok(v) if v == want => {}
        other => failures.push(format!("{}: got {:?}, want {}", what, other, want)),
    };
    for n in 1..=5 {
        for r in 1..=10 {
            push(format!("C^{}_{{{},1}}", n, r), bound_c(n, r, 1), r);
        }
        for r in 1..=5 {
            push(format!("C^{}_{{{},2}}", n, r), bound_c(n, r, 2), (1 << n) * r);
        }
    }
    for r in 1..=6 {
        push(format!("C^1_{{{},3}}", r), bound_c(1, r, 3), 3 * ((1 << r) - 1));
    }
    for n in 1..=10 {
        match alpha_beta(n, 1) {
            Ok((a, b)) if a == 2 * n && b == n => {}
            other => failures.push(format!("alpha/beta at n = {}: {:?}", n, other)),
        }
    }
    finish(5, &failures, start.elapsed(), Duration::from_secs(1), "C closed forms, alpha = 2n, beta = n");
}

#[test]
fn criterion_06_prolongation_cross_oracle() {
    let start = Instant::now();
    let mut g = Gen::new(6);
    let mut failures = Vec::new();
    let systems = 100;
    let mut eqs = 0;
    for c in 0..systems {
        let m = 1 + c % 2;
        let field = field_for(m, g.below(3));
        let ring = DiffRing::new(field.clone(), 3);
        let n = 1 + g.below(3);
        let f: Vec<DiffPoly> = (0..1 + g.below(2))
            .map(|_| {
                let p = g.diffpoly(1, n, m, 0, 3, 3);
                if p.is_zero() {
                    DiffPoly::indet(DerIndet::base(0, m))
                } else {
                    p
                }
            })
            .collect();
        let pol: Vec<PolPoly> = f.iter().cloned().map(PolPoly::from_poly).collect();
        let tau = tau1_explicit(&field, n, &pol).unwrap();
        let p1 = prolongation_equations(&field, n, &pol, 1).unwrap();
        if tau.normalized() != p1.normalized() {
            failures.push(format!("system {}: tau1 and order-1 prolongation differ", c));
        }
        for r in 1..=2 {
            let sys = prolongation_equations(&field, n, &pol, r).unwrap();
            for (eq, tag) in sys.equations.iter().zip(&sys.tags) {
                eqs += 1;
                if tag.cleared != index_factorial(&tag.xi) {
                    failures.push(format!("system {}: wrong cleared factor for {:?}", c, tag.xi));
                }
                // jet coordinates x_i^η read as δ^η x_i
                if eq.as_poly() != &ring.derive_multi(&tag.xi, &f[tag.source]) {
                    failures.push(format!("system {}: section identity fails at {:?}", c, tag.xi));
                }
            }
        }
    }
    finish(
        6,
        &failures,
        start.elapsed(),
        Duration::from_secs(120),
        &format!("{} systems, {} equations", systems, eqs),
    );
}

/// M·f − g − Σ c·δ^ξ f_j re-expanded without the library's verifier.
fn reexpand(ring: &DiffRing, f: &DiffPoly, set: &RankedSet, cert: &diffweil::diffpoly::DivisionCertificate) -> bool {
    let mut mult = DiffPoly::one();
    for (j, ld) in set.leader_data().iter().enumerate() {
        mult = mult.mul(&ld.initial.pow(cert.initial_exponents[j])).mul(&ld.separant.pow(cert.separant_exponents[j]));
    }
    let mut acc = mult.mul(f).sub(&cert.remainder);
    for ((j, xi), c) in &cert.cofactors {
        let mut d = set.members()[*j].clone();
        for (k, &e) in xi.iter().enumerate() {
            for _ in 0..e {
                d = ring.differentiate(k, &d).unwrap();
            }
        }
        acc = acc.sub(&c.mul(&d));
    }
    acc.is_zero()
}

fn is_reduced(g: &DiffPoly, set: &RankedSet) -> bool {
    set.leader_data().iter().all(|ld| {
        g.indets().iter().all(|w| !w.is_proper_derivative_of(&ld.leader)) && g.degree_in(&ld.leader) < ld.degree
    })
}

#[test]
fn criterion_07_division_certificates() {
    let start = Instant::now();
    let mut g = Gen::new(7);
    let mut failures = Vec::new();
    let (pairs, mut members, mut rejected_one) = (200, 0, 0);
    for c in 0..pairs {
        let m = 1 + c % 2;
        let field = field_for(m, g.below(3));
        let n = 1 + g.below(2);
        let ring = DiffRing::new(field.clone(), n);
        let k = field.k();
        // Λ over ℚ: with coefficients in ℚ(t), eliminating two order-2
        // polynomials in one variable swells far past the time budget
        let raw: Vec<DiffPoly> = (0..1 + g.below(2)).map(|_| g.nonconstant(0, n, m, 2, 2, 3)).collect();
        let f = g.diffpoly(k, n, m, 2, 3, 4);
        let set = RankedSet::new(raw.clone()).unwrap();
        let cert = divide(&ring, &f, &set);
        if !reexpand(&ring, &f, &set, &cert) {
            failures.push(format!("pair {}: certificate does not re-expand", c));
        }
        if !is_reduced(&cert.remainder, &set) {
            failures.push(format!("pair {}: remainder is not reduced", c));
        }
        match autoreduce(&ring, &raw) {
            Autoreduced::Inconsistent(_) => {}
            Autoreduced::Set(a) => {
                for gj in a.members() {
                    for xi in indices_up_to(m, 2) {
                        let d = ring.derive_multi(&xi, gj);
                        members += 1;
                        let res = membership_test(&ring, &d, &a);
                        if !res.member {
                            let leaders: Vec<String> = a.members().iter().map(|p| ring.fmt(&DiffPoly::indet(p.leader().unwrap()))).collect();
                            failures.push(format!("pair {}: δ^{:?} of a member rejected; leaders {:?}", c, xi, leaders));
                        }
                        if !reexpand(&ring, &d, &a, &res.certificate) {
                            failures.push(format!("pair {}: membership certificate does not re-expand", c));
                        }
                    }
                }
                rejected_one += 1;
                if membership_test(&ring, &DiffPoly::one(), &a).member {
                    failures.push(format!("pair {}: 1 accepted as a member", c));
                }
            }
        }
    }
    finish(
        7,
        &failures,
        start.elapsed(),
        Duration::from_secs(120),
        &format!("{} pairs, {} derivatives tested, 1 rejected {} times", pairs, members, rejected_one),
    );
}

#[test]
fn criterion_08_property_suites() {
    let start = Instant::now();
    let suites: [(&str, fn(u64) -> Check); 5] = [
        ("leibniz", props::leibniz),
        ("commutation", props::commutation),
        ("canonical form", props::canonical_form),
        ("ranking", props::ranking),
        ("separant rank", props::separant_rank),
    ];
    let mut failures = Vec::new();
    for (name, prop) in suites {
        let mut runner = TestRunner::new(Config { cases: 1000, failure_persistence: None, ..Config::default() });
        let res = runner.run(&proptest::num::u64::ANY, |seed| {
            prop(seed).map_err(proptest::test_runner::TestCaseError::fail)
        });
        if let Err(e) = res {
            failures.push(format!("{}: {}", name, e));
        }
    }
    finish(8, &failures, start.elapsed(), Duration::from_secs(300), "5 suites of 1000 samples");
}

#[test]
fn criterion_09_kernel_examples() {
    let start = Instant::now();
    let field = Arc::new(BaseField::rational_t());
    let a = |o: u32| DiffPoly::indet(DerIndet::new(0, vec![o]));
    let free = KernelPresentation::new(field.clone(), 1, 1).unwrap();
    let mut root = free.clone();
    root.set(&DerIndet::new(0, vec![0]), CoordSpec::Algebraic(a(0).pow(2).sub(&DiffPoly::constant(t())))).unwrap();
    let mut wrong = root.clone();
    let forced = a(0).mul(&a(1)).scale(&rf(2)).sub(&DiffPoly::one());
    root.set(&DerIndet::new(0, vec![1]), CoordSpec::Algebraic(forced)).unwrap();
    wrong.set(&DerIndet::new(0, vec![1]), CoordSpec::Algebraic(a(1))).unwrap();
    let got = [validate_kernel(&free), validate_kernel(&root), validate_kernel(&wrong)];
    let mut failures = Vec::new();
    if got[0].is_some() || got[1].is_some() {
        failures.push(format!("expected accept/accept, got {:?} / {:?}", got[0], got[1]));
    }
    if got[2] != Some(KernelRejection::Derivation { var: 0, xi: vec![0], k: 0 }) {
        failures.push(format!("expected rejection at (a⁰, δ₁), got {:?}", got[2]));
    }
    let verdict = |r: &Option<KernelRejection>| if r.is_none() { "accept" } else { "reject" };
    let detail = got.iter().map(verdict).collect::<Vec<_>>().join("/");
    finish(9, &failures, start.elapsed(), Duration::from_secs(1), &detail);
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn run_corpus_file(path: &Path) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_diffweil"))
        .args(["run", "--json", "--stable"])
        .arg(path)
        .output()
        .expect("binary runs");
    assert!(out.status.code().is_some_and(|c| c <= 1), "{} exited with {:?}", path.display(), out.status);
    out.stdout
}

#[test]
fn criterion_10_cli_determinism() {
    let start = Instant::now();
    let mut files: Vec<PathBuf> = std::fs::read_dir(fixtures().join("corpus"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "task"))
        .collect();
    files.sort();
    let update = std::env::var_os("DIFFWEIL_UPDATE_GOLDEN").is_some();
    let mut failures = Vec::new();
    for f in &files {
        let first = run_corpus_file(f);
        let second = run_corpus_file(f);
        let name = f.file_stem().unwrap().to_string_lossy().to_string();
        if first != second {
            failures.push(format!("{}: two runs differ", name));
        }
        let golden = fixtures().join("golden").join(format!("{}.json", name));
        if update {
            std::fs::create_dir_all(golden.parent().unwrap()).unwrap();
            std::fs::write(&golden, &first).unwrap();
        }
        match std::fs::read(&golden) {
            Ok(want) if want == first => {}
            Ok(_) => failures.push(format!("{}: output differs from the golden file", name)),
            Err(_) => failures.push(format!("{}: golden file missing", name)),
        }
    }
    if files.is_empty() {
        failures.push("empty corpus".into());
    }
    finish(
        10,
        &failures,
        start.elapsed(),
        Duration::from_secs(60),
        &format!("{} task files, byte-identical across runs", files.len()),
    );
}
