//! Acceptance criteria, one test each. Every test prints a PASS/FAIL line per
//! check before asserting, so `--nocapture` output doubles as a report.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Zero};
use seqspace::conditions::{check_regularity, supported_pairs, ConditionId, EvalConfig};
use seqspace::domains::DomainSpace;
use seqspace::duality::{build_u, build_v, characterize, derive_d, derive_e, derive_g, dual_membership, DualKind,
    DEFAULT_ROW_SAMPLE};
use seqspace::limit::SupTrend;
use seqspace::matrix::{apply, builtin, compose, truncate_matrix, BuiltinName, InfMatrix};
use seqspace::oracle::{brute_force_mapping_oracle, OracleConfig};
use seqspace::seq::{truncate, Sequence, SequenceSpec};
use seqspace::{ClassicalSpace, SpaceId, Verdict};

fn check(label: &str, ok: bool, detail: impl std::fmt::Display) -> bool {
    println!("{} {label}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn finish(criterion: &str, results: &[bool]) {
    let failed = results.iter().filter(|ok| !**ok).count();
    assert_eq!(failed, 0, "criterion {criterion}: {failed} of {} checks failed", results.len());
}

#[test]
fn criterion_01_inverse_identity() {
    let start = Instant::now();
    let mut results = Vec::new();
    for (m, inv) in [(BuiltinName::Omega, BuiltinName::OmegaInv), (BuiltinName::Gamma, BuiltinName::GammaInv)] {
        let a: InfMatrix<BigRational> = builtin(m, None, None).unwrap();
        let b: InfMatrix<BigRational> = builtin(inv, None, None).unwrap();
        let exact = truncate_matrix(&compose(&a, &b), 200).unwrap();
        results.push(check(&format!("{} rational", m.as_str()), exact.is_identity(), "exact identity at N = 200"));

        let a: InfMatrix<f64> = builtin(m, None, None).unwrap();
        let b: InfMatrix<f64> = builtin(inv, None, None).unwrap();
        let dev = truncate_matrix(&compose(&a, &b), 200).unwrap().max_deviation_from_identity();
        results.push(check(&format!("{} float", m.as_str()), dev <= 1e-12, format!("deviation {dev:e} <= 1e-12")));
    }
    let elapsed = start.elapsed();
    results.push(check("runtime", elapsed < Duration::from_secs(1), format!("{elapsed:?} < 1s")));
    finish("1", &results);
}

#[test]
fn criterion_02_isomorphism_round_trip() {
    let n = 100;
    let mut r = common::rng(2);
    let spaces = [
        DomainSpace::<BigRational>::omega(ClassicalSpace::C0).unwrap(),
        DomainSpace::<BigRational>::gamma(ClassicalSpace::C0).unwrap(),
    ];
    let mut results = Vec::new();
    for space in &spaces {
        let mut exact = 0;
        for _ in 0..100 {
            let x = common::random_finite_rational(&mut r, 60);
            let y = space.phi_forward(&x, n).unwrap().to_sequence();
            let back = space.phi_inverse(&y, n).unwrap();
            if back.entries == truncate(&x, n).unwrap().entries {
                exact += 1;
            }
        }
        results.push(check(&space.label(), exact == 100, format!("{exact}/100 exact round trips at N = {n}")));
    }
    finish("2", &results);
}

#[test]
fn criterion_03_basis_reconstruction() {
    let n = 200;
    let mut r = common::rng(3);
    let space = DomainSpace::<BigRational>::omega(ClassicalSpace::C0).unwrap();
    let mut zero = 0;
    for _ in 0..20 {
        let x = common::random_finite_rational(&mut r, 150);
        if space.basis_expand(&x, n, n).unwrap().residual_norm.is_zero() {
            zero += 1;
        }
    }
    let mut results = vec![check("finite support", zero == 20, format!("{zero}/20 residuals exactly 0, n_terms = N = {n}"))];

    let space = DomainSpace::<f64>::omega(ClassicalSpace::C0).unwrap();
    let x = Sequence::from_fn("(1/2)^k/k", |k| 0.5f64.powi(k as i32) / k as f64);
    let residual = space.basis_expand(&x, 20, n).unwrap().residual_norm;
    let bound = 2.0 * 2f64.powi(-20);
    results.push(check("(1/2)^k/k in c0(omega)", residual <= bound, format!("residual {residual:e} <= {bound:e}")));
    finish("3", &results);
}

#[test]
fn criterion_04_d_identity() {
    let n = 100;
    let mut r = common::rng(4);
    let omega_inv: InfMatrix<f64> = builtin(BuiltinName::OmegaInv, None, None).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (seed, lower, upper) = common::random_band_params(&mut r);
        let a = common::random_band(seed, lower, upper);
        let y = common::random_finite_f64(&mut r, 80);
        let x = apply(&omega_inv, &y, n + upper + 1).unwrap().to_sequence();
        let dy = apply(&derive_d(&a), &y, n).unwrap();
        let ax = apply(&a, &x, n).unwrap();
        for (u, v) in dy.entries.iter().zip(&ax.entries) {
            worst = worst.max((u - v).abs());
        }
    }
    let ok = check("Dy = Ax", worst <= 1e-10, format!("max deviation {worst:e} <= 1e-10 over 50 band matrices"));
    finish("4", &[ok]);
}

#[test]
fn criterion_05_e_g_identities() {
    let n = 100;
    let mut r = common::rng(5);
    let omega: InfMatrix<f64> = builtin(BuiltinName::Omega, None, None).unwrap();
    let gamma: InfMatrix<f64> = builtin(BuiltinName::Gamma, None, None).unwrap();
    let (mut worst_e, mut worst_g) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let (seed, lower, upper) = common::random_band_params(&mut r);
        let a = common::random_band(seed, lower, upper);
        let z = common::random_finite_f64(&mut r, 80);
        let az = apply(&a, &z, n).unwrap().to_sequence();
        let dev = |lhs: Vec<f64>, rhs: Vec<f64>| lhs.iter().zip(&rhs).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        worst_e = worst_e.max(dev(
            apply(&derive_e(&a), &z, n).unwrap().entries,
            apply(&omega, &az, n).unwrap().entries,
        ));
        worst_g = worst_g.max(dev(
            apply(&derive_g(&a), &z, n).unwrap().entries,
            apply(&gamma, &az, n).unwrap().entries,
        ));
    }
    let results = [
        check("Ez = Omega(Az)", worst_e <= 1e-12, format!("max deviation {worst_e:e} <= 1e-12")),
        check("Gz = Gamma(Az)", worst_g <= 1e-12, format!("max deviation {worst_g:e} <= 1e-12")),
    ];
    finish("5", &results);
}

fn all_cells() -> Vec<(SpaceId, SpaceId)> {
    let mut out: Vec<(SpaceId, SpaceId)> =
        supported_pairs().into_iter().map(|(f, t)| (SpaceId::Classical(f), SpaceId::Classical(t))).collect();
    let sequence_spaces = [ClassicalSpace::C0, ClassicalSpace::C, ClassicalSpace::LInf];
    for m in ["omega", "gamma"] {
        for (f, t) in supported_pairs() {
            if sequence_spaces.contains(&f) {
                out.push((format!("{f}({m})").parse().unwrap(), SpaceId::Classical(t)));
            }
            if sequence_spaces.contains(&t) {
                out.push((SpaceId::Classical(f), format!("{t}({m})").parse().unwrap()));
            }
        }
    }
    out
}

#[test]
fn criterion_06_table_oracle_agreement() {
    let n = 1000;
    let cells = all_cells();
    let curated = [
        BuiltinName::Identity,
        BuiltinName::Omega,
        BuiltinName::Gamma,
        BuiltinName::OmegaInv,
        BuiltinName::GammaInv,
        BuiltinName::Cesaro,
        BuiltinName::Euler,
        BuiltinName::Zero,
    ];
    let mut results = Vec::new();
    for name in curated {
        let r = (name == BuiltinName::Euler).then_some(0.5);
        let a: InfMatrix<f64> = builtin(name, r, None).unwrap();
        let (mut agree, mut inconclusive, mut disagree) = (0, 0, Vec::new());
        for (from, to) in &cells {
            let class = characterize(&a, from, to, &EvalConfig::with_n(n), DEFAULT_ROW_SAMPLE).unwrap();
            let oracle = brute_force_mapping_oracle(&a, from, to, 24, &OracleConfig::with_n(n)).unwrap();
            match (class.verdict, oracle.verdict) {
                (c, o) if !c.is_decided() || !o.is_decided() => inconclusive += 1,
                (c, o) if c == o => agree += 1,
                (c, o) => disagree.push(format!("({from}:{to}) table {c} oracle {o}")),
            }
        }
        results.push(check(
            name.as_str(),
            disagree.is_empty(),
            format!("{} cells: {agree} agree, {inconclusive} inconclusive, {} disagree {disagree:?}", cells.len(), disagree.len()),
        ));
    }
    finish("6", &results);
}

#[test]
fn criterion_07_dual_showcase() {
    let n = 2000;
    let cfg = EvalConfig::with_n(n);
    let omega = DomainSpace::<f64>::omega(ClassicalSpace::C0).unwrap();
    let gamma = DomainSpace::<f64>::gamma(ClassicalSpace::C0).unwrap();
    let k = Sequence::from_fn("k", |k| k as f64);
    let k2 = Sequence::from_fn("k^2", |k| (k * k) as f64);
    let inv = Sequence::from_fn("1/k", |k| 1.0 / k as f64);
    let mut results = Vec::new();

    let exact_k = Sequence::from_fn("k", |k| BigRational::from_integer((k as i64).into()));
    let exact_inv = Sequence::from_fn("1/k", |k| BigRational::new(1.into(), (k as i64).into()));
    let u_is_identity = truncate_matrix(build_u(&exact_k).matrix(), 200).unwrap().is_identity();
    results.push(check("U[k] = I", u_is_identity, "200 x 200 block"));
    let accepted = dual_membership(&k, &omega, DualKind::Beta, &cfg).unwrap();
    let ids: Vec<&str> = accepted.per_condition.iter().map(|c| c.id.as_str()).collect();
    let all_pass = accepted.per_condition.iter().all(|c| c.verdict == Verdict::Satisfied);
    results.push(check(
        "k in beta dual of c0(omega)",
        accepted.verdict == Verdict::Satisfied && ids == ["C1", "C9"] && all_pass,
        format!("{} via {ids:?}", accepted.verdict),
    ));

    let rejected = dual_membership(&k2, &omega, DualKind::Beta, &cfg).unwrap();
    let c1 = rejected.per_condition.iter().find(|c| c.id == ConditionId::C1).unwrap();
    let linear = c1.observed.last().map(|v| (v / n as f64 - 2.0).abs() < 0.01).unwrap_or(false);
    results.push(check(
        "k^2 rejected",
        rejected.verdict == Verdict::Violated && c1.verdict == Verdict::Violated && linear,
        format!("{}, C1 {} with row sum {:?} at n = {n}", rejected.verdict, c1.verdict, c1.observed.last()),
    ));

    let v_is_identity = truncate_matrix(build_v(&exact_inv).matrix(), 200).unwrap().is_identity();
    results.push(check("V[1/k] = I", v_is_identity, "200 x 200 block"));
    let accepted = dual_membership(&inv, &gamma, DualKind::Beta, &cfg).unwrap();
    results.push(check("1/k in beta dual of c0(gamma)", accepted.verdict == Verdict::Satisfied, accepted.verdict));
    finish("7", &results);
}

#[test]
fn criterion_08_regularity_report() {
    let start = Instant::now();
    let cfg = EvalConfig::with_n(10_000);
    let mut results = Vec::new();

    let cesaro: InfMatrix<f64> = builtin(BuiltinName::Cesaro, None, None).unwrap();
    let rep = check_regularity(&cesaro, &cfg).unwrap();
    let c1 = &rep.conditions[0];
    let c3 = &rep.conditions[2];
    let sup = c1.sup.as_ref().map(|s| s.sup).unwrap_or(f64::NAN);
    let limit = c3.limit.as_ref().map(|l| l.estimate).unwrap_or(f64::NAN);
    results.push(check(
        "cesaro regular",
        rep.verdict == Verdict::Satisfied && rep.conditions.iter().all(|c| c.verdict == Verdict::Satisfied),
        rep.verdict,
    ));
    results.push(check("cesaro sup", (sup - 1.0).abs() <= 1e-9, format!("sup {sup}")));
    results.push(check("cesaro row-sum limit", (limit - 1.0).abs() <= 1e-9, format!("limit {limit}")));

    let gamma: InfMatrix<f64> = builtin(BuiltinName::Gamma, None, None).unwrap();
    let rep = check_regularity(&gamma, &cfg).unwrap();
    let c1 = &rep.conditions[0];
    let last = c1.observed.last().copied().unwrap_or(0.0);
    let monotone = c1.observed.windows(2).all(|w| w[1] >= w[0]);
    let growing = c1.sup.as_ref().map(|s| s.trend) == Some(SupTrend::Growing);
    results.push(check("gamma C1 trace", last >= 9.5 && monotone, format!("H_N = {last:.4}, monotone {monotone}")));
    results.push(check(
        "gamma C1 violated",
        c1.verdict == Verdict::Violated && growing && rep.verdict == Verdict::Violated,
        format!("C1 {}, regularity {}", c1.verdict, rep.verdict),
    ));

    let elapsed = start.elapsed();
    results.push(check("runtime", elapsed < Duration::from_secs(5), format!("{elapsed:?} < 5s")));
    finish("8", &results);
}

#[test]
fn criterion_09_euler_riesz_structure() {
    let mut results = Vec::new();
    let e_ones = SequenceSpec::Builtin { name: "ones".into() };
    for (label, a) in [
        ("euler(1/2)", builtin::<f64>(BuiltinName::Euler, Some(0.5), None).unwrap()),
        ("riesz(t=e)", builtin::<f64>(BuiltinName::Riesz, None, Some(&e_ones)).unwrap()),
    ] {
        let block = truncate_matrix(&a, 50).unwrap();
        let worst = block.entries.iter().map(|row| (row.iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max);
        results.push(check(&format!("{label} row sums"), worst <= 1e-12, format!("max |sum - 1| {worst:e} for n <= 50")));
    }

    let riesz: InfMatrix<BigRational> = builtin(BuiltinName::Riesz, None, Some(&e_ones)).unwrap();
    let cesaro: InfMatrix<BigRational> = builtin(BuiltinName::Cesaro, None, None).unwrap();
    let (r, c) = (truncate_matrix(&riesz, 50).unwrap(), truncate_matrix(&cesaro, 50).unwrap());
    let sums_one = r.entries.iter().all(|row| row.iter().fold(BigRational::zero(), |s, v| s + v) == BigRational::one());
    results.push(check("riesz(t=e) = cesaro", r == c && sums_one, "rational entries identical for n <= 50"));
    let (rf, cf) = (
        truncate_matrix(&builtin::<f64>(BuiltinName::Riesz, None, Some(&e_ones)).unwrap(), 50).unwrap(),
        truncate_matrix(&builtin::<f64>(BuiltinName::Cesaro, None, None).unwrap(), 50).unwrap(),
    );
    results.push(check("riesz(t=e) = cesaro float", rf == cf, "float entries identical for n <= 50"));
    finish("9", &results);
}

#[test]
fn criterion_10_determinism() {
    let bin = env!("CARGO_BIN_EXE_seqspace");
    let queries: [&[&str]; 3] = [
        &["oracle", "--matrix", "cesaro", "--from", "c", "--to", "c", "--n", "500", "--seed", "7", "--json"],
        &["check-class", "--matrix", "euler:0.5", "--from", "c0(omega)", "--to", "linf", "--n", "500", "--seed", "7", "--json"],
        &["regularity", "--matrix", "gamma", "--n", "2000", "--seed", "7", "--json"],
    ];
    let mut results = Vec::new();
    for q in queries {
        let runs: Vec<Vec<u8>> = (0..3).map(|_| Command::new(bin).args(q).output().unwrap().stdout).collect();
        let valid = serde_json::from_slice::<serde_json::Value>(&runs[0]).is_ok();
        results.push(check(
            q[0],
            valid && runs[1] == runs[0] && runs[2] == runs[0],
            format!("{} bytes, 3 runs identical", runs[0].len()),
        ));
    }
    finish("10", &results);
}
