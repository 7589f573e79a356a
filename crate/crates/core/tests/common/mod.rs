#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seqspace::matrix::{InfMatrix, Shape};
use seqspace::seq::Sequence;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stateless uniform value in [-1, 1) keyed by `(seed, n, k)`.
pub fn keyed(seed: u64, n: usize, k: usize) -> f64 {
    let mut z = seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (k as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

/// Random band matrix with `lower` sub- and `upper` superdiagonals,
/// entries damped by `0.7^|n-k|`.
pub fn random_band(seed: u64, lower: usize, upper: usize) -> InfMatrix<f64> {
    let shape = Shape { upper: Some(upper), lower: Some(lower), rows: None, cols: None };
    InfMatrix::from_fn(format!("band[{seed}]"), "random band", shape, move |n, k| {
        keyed(seed, n, k) * 0.7f64.powi(n.abs_diff(k) as i32)
    })
}

pub fn random_band_params(r: &mut ChaCha8Rng) -> (u64, usize, usize) {
    (r.random(), r.random_range(0..4), r.random_range(0..4))
}

pub fn random_finite_f64(r: &mut ChaCha8Rng, max_support: usize) -> Sequence<f64> {
    let m = r.random_range(1..=max_support);
    let values: Vec<f64> = (0..m).map(|_| r.random_range(-1.0..1.0)).collect();
    Sequence::from_values("random", values)
}

pub fn random_finite_rational(r: &mut ChaCha8Rng, max_support: usize) -> Sequence<BigRational> {
    let m = r.random_range(1..=max_support);
    let values: Vec<BigRational> = (0..m)
        .map(|_| {
            let num: i64 = r.random_range(-50..=50);
            let den: i64 = r.random_range(1..=12);
            BigRational::new(BigInt::from(num), BigInt::from(den))
        })
        .collect();
    Sequence::from_values("random", values)
}

/// Random rational lower band triangle; the diagonal avoids zero.
pub fn random_triangle(seed: u64, lower: usize) -> InfMatrix<BigRational> {
    InfMatrix::from_fn(format!("tri[{seed}]"), "random triangle", Shape::lower_band(lower), move |n, k| {
        let v = (keyed(seed, n, k) * 6.0).round() as i64;
        let v = if n == k && v == 0 { 1 } else { v };
        BigRational::new(BigInt::from(v), BigInt::from(1 + (n + k) as i64 % 3))
    })
}
