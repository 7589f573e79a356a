//! Brute-force check of `A in (X : Y)`: push seeded samples of `X` through
//! `A` by direct summation and probe the images for membership in `Y`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domains::DomainSpace;
use crate::error::{Error, Result};
use crate::matrix::{apply_with, default_cutoff, InfMatrix};
use crate::par::{self, Strategy};
use crate::seq::Sequence;
use crate::space::{classify_vector, ClassicalSpace, SpaceId, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    pub n: usize,
    pub tol: f64,
    pub window: usize,
    pub seed: u64,
    #[serde(skip)]
    pub strategy: Strategy,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { n: 2000, tol: 1e-3, window: 200, seed: 0, strategy: Strategy::default() }
    }
}

impl OracleConfig {
    pub fn with_n(n: usize) -> Self {
        OracleConfig { n, window: (n / 10).max(4), ..Default::default() }
    }
}

/// One member of a sampled space.
#[derive(Debug, Clone)]
pub struct Sample {
    pub family: &'static str,
    pub seq: Sequence<f64>,
}

fn seq(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Sequence<f64> {
    Sequence::from_fn(label, move |k| f(k as f64))
}

fn sign(k: f64) -> f64 {
    if (k as u64) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(-1)^floor(log_b k)`: sign blocks of geometrically growing length.
fn block_sign(k: f64, b: f64) -> f64 {
    sign((k.ln() / b.ln()).floor())
}

fn random_signs(label: String, seed: u64) -> Sequence<f64> {
    Sequence::from_fn(label, move |k| {
        let mut r = ChaCha8Rng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        if r.random::<bool>() {
            1.0
        } else {
            -1.0
        }
    })
}

/// `x_k = s_k - s_{k-1}`, so the partial sums of `x` are `s`.
fn differences(label: String, s: Sequence<f64>) -> Sequence<f64> {
    Sequence::from_fn(label, move |k| s.entry(k) - if k > 1 { s.entry(k - 1) } else { 0.0 })
}

fn finite_random(rng: &mut ChaCha8Rng) -> Sample {
    let len = rng.random_range(1..=20);
    let values: Vec<f64> = (0..len).map(|_| rng.random_range(-2.0..2.0)).collect();
    Sample { family: "finite", seq: Sequence::from_values(format!("finite{values:?}"), values) }
}

fn c0_curated() -> Vec<Sample> {
    vec![
        Sample { family: "finite", seq: Sequence::unit(1) },
        Sample { family: "slow", seq: seq("1/ln(ln(k+e))", |k| 1.0 / (k + std::f64::consts::E).ln().ln()) },
        Sample { family: "slow", seq: seq("1/ln(k+1)", |k| 1.0 / (k + 1.0).ln()) },
        Sample { family: "geometric", seq: seq("2^-k", |k| 0.5f64.powf(k)) },
        Sample { family: "power", seq: seq("k^-1/2", |k| k.powf(-0.5)) },
        Sample { family: "alternating", seq: seq("(-1)^k/k", |k| sign(k) / k) },
        Sample { family: "alternating", seq: seq("(-1)^k/ln(k+1)", |k| sign(k) / (k + 1.0).ln()) },
        Sample { family: "block", seq: seq("(-1)^floor(log2 k)/k^(1/3)", |k| block_sign(k, 2.0) / k.cbrt()) },
        Sample { family: "finite", seq: Sequence::from_values("finite[1,-2,1]", vec![1.0, -2.0, 1.0]) },
        // images under row sums like H_n grow like (ln n)^0.7
        Sample { family: "slow", seq: seq("ln(k+1)^-0.3", |k| (k + 1.0).ln().powf(-0.3)) },
        // oscillates on the sqrt(n) scale that binomial means keep
        Sample { family: "trigonometric", seq: seq("sin(2 sqrt k)/k^(1/3)", sqrt_wave) },
    ]
}

fn sqrt_wave(k: f64) -> f64 {
    (2.0 * k.sqrt()).sin() / k.cbrt()
}

fn c0_random(rng: &mut ChaCha8Rng, i: usize) -> Sample {
    match i % 4 {
        0 => finite_random(rng),
        1 => {
            let r: f64 = rng.random_range(0.3..0.95) * if rng.random::<bool>() { 1.0 } else { -1.0 };
            Sample { family: "geometric", seq: seq(format!("{r:.4}^k"), move |k| r.powf(k)) }
        }
        2 => {
            let p: f64 = rng.random_range(0.2..2.0);
            let alt = rng.random::<bool>();
            let s = if alt { "(-1)^k " } else { "" };
            Sample {
                family: "power",
                seq: seq(format!("{s}k^-{p:.4}"), move |k| k.powf(-p) * if alt { sign(k) } else { 1.0 }),
            }
        }
        _ => {
            let c: f64 = rng.random_range(-2.0..2.0);
            Sample { family: "slow", seq: seq(format!("{c:.4}/ln(k+1)"), move |k| c / (k + 1.0).ln()) }
        }
    }
}

fn shift(l: f64, s: Sample) -> Sample {
    let inner = s.seq.clone();
    Sample { family: s.family, seq: Sequence::from_fn(format!("{l} + {}", inner.label()), move |k| l + inner.entry(k)) }
}

fn c_curated() -> Vec<Sample> {
    let mut v = vec![
        Sample { family: "constant", seq: Sequence::constant(1.0) },
        Sample { family: "slow", seq: seq("1 + 1/ln(ln(k+e))", |k| 1.0 + 1.0 / (k + std::f64::consts::E).ln().ln()) },
        Sample { family: "power", seq: seq("1 + 1/k", |k| 1.0 + 1.0 / k) },
        Sample { family: "alternating", seq: seq("2 - (-1)^k/k", |k| 2.0 - sign(k) / k) },
    ];
    v.extend(c0_curated().into_iter().skip(1).take(4).map(|s| shift(0.5, s)));
    v.push(Sample { family: "trigonometric", seq: seq("1 + sin(2 sqrt k)/k^(1/3)", |k| 1.0 + sqrt_wave(k)) });
    v
}

fn linf_curated() -> Vec<Sample> {
    let mut v = vec![
        Sample { family: "alternating", seq: seq("(-1)^k", sign) },
        Sample { family: "block", seq: seq("(-1)^floor(log2 k)", |k| block_sign(k, 2.0)) },
        Sample { family: "constant", seq: Sequence::constant(1.0) },
        Sample { family: "trigonometric", seq: seq("cos(k)", f64::cos) },
        Sample { family: "random-sign", seq: random_signs("random signs #0".into(), 0) },
    ];
    v.extend(c_curated().into_iter().skip(1).take(2));
    v.push(Sample { family: "trigonometric", seq: seq("sin(2 sqrt k)/k^(1/3)", sqrt_wave) });
    v
}

fn cs_curated() -> Vec<Sample> {
    vec![
        Sample { family: "finite", seq: Sequence::unit(1) },
        Sample { family: "slow", seq: differences("diff of 1/ln(k+1)".into(), seq("1/ln(k+1)", |k| 1.0 / (k + 1.0).ln())) },
        Sample { family: "alternating", seq: seq("(-1)^k/k", |k| sign(k) / k) },
        Sample { family: "alternating", seq: seq("(-1)^k/sqrt(k)", |k| sign(k) / k.sqrt()) },
        Sample { family: "geometric", seq: seq("2^-k", |k| 0.5f64.powf(k)) },
        Sample { family: "power", seq: seq("1/k^2", |k| 1.0 / (k * k)) },
        Sample {
            family: "slow",
            seq: differences("diff of (-1)^k/ln(k+1)".into(), seq("(-1)^k/ln(k+1)", |k| sign(k) / (k + 1.0).ln())),
        },
    ]
}

fn bs_curated() -> Vec<Sample> {
    let mut v = vec![
        Sample { family: "alternating", seq: seq("(-1)^k", sign) },
        Sample { family: "block", seq: differences("diff of (-1)^floor(log2 k)".into(), seq("", |k| block_sign(k, 2.0))) },
        Sample { family: "alternating", seq: seq("(-1)^k (1 + 1/k)", |k| sign(k) * (1.0 + 1.0 / k)) },
        Sample { family: "trigonometric", seq: seq("cos(k)", f64::cos) },
        Sample { family: "random-sign", seq: differences("diff of random signs #1".into(), random_signs(String::new(), 1)) },
    ];
    v.extend(cs_curated().into_iter().take(3));
    v
}

fn random_member(space: ClassicalSpace, rng: &mut ChaCha8Rng, i: usize) -> Sample {
    match space {
        ClassicalSpace::C0 => c0_random(rng, i),
        ClassicalSpace::C => {
            let l: f64 = rng.random_range(-2.0..2.0);
            let s = c0_random(rng, i);
            shift((l * 1e4).round() / 1e4, s)
        }
        ClassicalSpace::LInf => match i % 3 {
            0 => {
                let seed: u64 = rng.random();
                Sample { family: "random-sign", seq: random_signs(format!("random signs #{seed}"), seed) }
            }
            1 => {
                let b: f64 = rng.random_range(1.5..3.0);
                Sample { family: "block", seq: seq(format!("(-1)^floor(log_{b:.4} k)"), move |k| block_sign(k, b)) }
            }
            _ => {
                let l: f64 = rng.random_range(-2.0..2.0);
                let s = c0_random(rng, i);
                shift((l * 1e4).round() / 1e4, s)
            }
        },
        ClassicalSpace::CS => match i % 3 {
            0 => finite_random(rng),
            1 => {
                let p: f64 = rng.random_range(1.1..3.0);
                Sample { family: "power", seq: seq(format!("k^-{p:.4}"), move |k| k.powf(-p)) }
            }
            _ => {
                let p: f64 = rng.random_range(0.3..1.0);
                Sample { family: "alternating", seq: seq(format!("(-1)^k k^-{p:.4}"), move |k| sign(k) * k.powf(-p)) }
            }
        },
        ClassicalSpace::BS => match i % 2 {
            0 => {
                let seed: u64 = rng.random();
                Sample {
                    family: "random-sign",
                    seq: differences(format!("diff of random signs #{seed}"), random_signs(String::new(), seed)),
                }
            }
            _ => random_member(ClassicalSpace::CS, rng, i / 2),
        },
    }
}

/// The first `count` samples of `space`: curated witnesses first, then seeded
/// random members.
pub fn samples_for(space: ClassicalSpace, count: usize, seed: u64) -> Vec<Sample> {
    let mut out = match space {
        ClassicalSpace::C0 => c0_curated(),
        ClassicalSpace::C => c_curated(),
        ClassicalSpace::LInf => linf_curated(),
        ClassicalSpace::BS => bs_curated(),
        ClassicalSpace::CS => cs_curated(),
    };
    out.truncate(count);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (space as u64 + 1).wrapping_mul(0xA24B_AED4_963E_E407));
    let mut i = 0;
    while out.len() < count {
        out.push(random_member(space, &mut rng, i));
        i += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleOutcome {
    pub index: usize,
    pub family: &'static str,
    pub label: String,
    pub verdict: Verdict,
    pub note: String,
    /// Limit estimate or observed sup of the probed image.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub matrix: String,
    pub from: String,
    pub to: String,
    pub samples: usize,
    pub per_sample: Vec<SampleOutcome>,
    /// Fraction of decided samples agreeing with the verdict.
    pub agreement: f64,
    pub verdict: Verdict,
    pub witnesses: Vec<String>,
    pub config: OracleConfig,
}

enum Side {
    Classical(ClassicalSpace),
    Domain(DomainSpace<f64>),
}

impl Side {
    fn of(id: &SpaceId) -> Result<Side> {
        Ok(match id {
            SpaceId::Classical(c) => Side::Classical(*c),
            SpaceId::Domain { .. } => Side::Domain(DomainSpace::from_space_id(id)?),
        })
    }

    fn base(&self) -> ClassicalSpace {
        match self {
            Side::Classical(c) => *c,
            Side::Domain(d) => d.base,
        }
    }
}

fn run_sample(
    a: &InfMatrix<f64>,
    from: &Side,
    to: &Side,
    sample: &Sample,
    cfg: &OracleConfig,
) -> Result<(Verdict, String, Option<f64>)> {
    let n = cfg.n;
    let cutoff = default_cutoff(n);
    let x = match from {
        Side::Classical(_) => sample.seq.clone(),
        Side::Domain(d) => {
            let len = if a.is_lower_triangular() { n } else { cutoff };
            d.phi_inverse(&sample.seq, len)?.to_sequence()
        }
    };
    let image = apply_with(a, &x, n, cutoff, Strategy::Sequential)?;
    let values = match to {
        Side::Classical(_) => image.to_f64(),
        Side::Domain(d) => apply_with(d.matrix.matrix(), &image.to_sequence(), n, n, Strategy::Sequential)?.to_f64(),
    };
    let m = classify_vector(&values, to.base(), cfg.tol, cfg.window)?;
    let value = m.limit.map(|l| l.estimate).or(m.sup.map(|s| s.sup));
    let note = if image.overflow { format!("{}; image overflowed", m.note) } else { m.note };
    Ok((m.verdict, note, value))
}

/// Sample `from`, map through `A`, probe membership in `to`. Any image that
/// demonstrably leaves `to` makes the verdict `Violated`; otherwise any
/// image found inside gives `Satisfied`.
pub fn brute_force_mapping_oracle(
    a: &InfMatrix<f64>,
    from: &SpaceId,
    to: &SpaceId,
    samples: usize,
    cfg: &OracleConfig,
) -> Result<OracleReport> {
    if cfg.n < 2 * cfg.window || cfg.window == 0 {
        return Err(Error::TruncationTooSmall { n: cfg.n, required: 2 * cfg.window.max(1) });
    }
    let src = Side::of(from)?;
    let dst = Side::of(to)?;
    let pool = samples_for(src.base(), samples, cfg.seed);
    let outcomes = par::map_slice(cfg.strategy, &pool, |s| run_sample(a, &src, &dst, s, cfg));
    let per_sample: Vec<SampleOutcome> = pool
        .iter()
        .zip(outcomes)
        .enumerate()
        .map(|(i, (s, o))| {
            let (verdict, note, value) = o.unwrap_or_else(|e| (Verdict::Inconclusive, format!("evaluation failed: {e}"), None));
            SampleOutcome { index: i + 1, family: s.family, label: s.seq.label().to_string(), verdict, note, value }
        })
        .collect();
    let verdict = if per_sample.iter().any(|s| s.verdict == Verdict::Violated) {
        Verdict::Violated
    } else if per_sample.iter().any(|s| s.verdict == Verdict::Satisfied) {
        Verdict::Satisfied
    } else {
        Verdict::Inconclusive
    };
    let decided: Vec<&SampleOutcome> = per_sample.iter().filter(|s| s.verdict.is_decided()).collect();
    let agreement = if decided.is_empty() {
        1.0
    } else {
        decided.iter().filter(|s| s.verdict == verdict).count() as f64 / decided.len() as f64
    };
    let witnesses = per_sample
        .iter()
        .filter(|s| s.verdict == Verdict::Violated)
        .map(|s| format!("sample {} x = {}: {}", s.index, s.label, s.note))
        .collect();
    Ok(OracleReport {
        matrix: a.name().to_string(),
        from: from.to_string(),
        to: to.to_string(),
        samples: per_sample.len(),
        per_sample,
        agreement,
        verdict,
        witnesses,
        config: *cfg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{builtin, BuiltinName};
    use crate::space::classify_classical;

    fn m(name: BuiltinName) -> InfMatrix<f64> {
        builtin(name, None, None).unwrap()
    }

    #[test]
    fn samplers_are_deterministic_and_members() {
        for space in ClassicalSpace::ALL {
            let a = samples_for(space, 30, 7);
            let b = samples_for(space, 30, 7);
            assert_eq!(a.len(), 30);
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(x.seq.label(), y.seq.label());
                for k in [1, 2, 17, 500] {
                    assert_eq!(x.seq.entry(k).to_bits(), y.seq.entry(k).to_bits());
                }
            }
            // fast members classify inside the space; slow ones may stay unsettled
            for s in &a {
                let v = classify_classical(&s.seq, &SpaceId::Classical(space), 4000, 1e-3, None).unwrap();
                assert_ne!(v.verdict, Verdict::Violated, "{space}: {}", s.seq.label());
            }
        }
    }

    #[test]
    fn identity_preserves_null_sequences() {
        let c0 = SpaceId::Classical(ClassicalSpace::C0);
        let r = brute_force_mapping_oracle(&m(BuiltinName::Identity), &c0, &c0, 50, &OracleConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Satisfied);
        assert_eq!(r.agreement, 1.0);
        assert_eq!(r.samples, 50);
    }

    #[test]
    fn gamma_sends_constants_to_harmonic_numbers() {
        let c = SpaceId::Classical(ClassicalSpace::C);
        let r = brute_force_mapping_oracle(&m(BuiltinName::Gamma), &c, &c, 10, &OracleConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert!(r.witnesses[0].contains("const(1.0)"), "{:?}", r.witnesses);
    }

    #[test]
    fn cesaro_keeps_limits() {
        let c = SpaceId::Classical(ClassicalSpace::C);
        let cfg = OracleConfig { n: 5000, window: 500, ..Default::default() };
        let r = brute_force_mapping_oracle(&m(BuiltinName::Cesaro), &c, &c, 20, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Satisfied, "{:?}", r.per_sample);
    }

    #[test]
    fn strategies_agree() {
        let from: SpaceId = "c0(omega)".parse().unwrap();
        let to = SpaceId::Classical(ClassicalSpace::C);
        let seq = OracleConfig { strategy: Strategy::Sequential, ..OracleConfig::with_n(500) };
        let par = OracleConfig { strategy: Strategy::Parallel, ..seq };
        let a = brute_force_mapping_oracle(&m(BuiltinName::Cesaro), &from, &to, 12, &seq).unwrap();
        let b = brute_force_mapping_oracle(&m(BuiltinName::Cesaro), &from, &to, 12, &par).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
