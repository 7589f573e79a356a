//! Scalar abstraction shared by the float and exact-rational evaluation modes.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Field element used for matrix entries and sequence values.
///
/// `f64` is the default; [`BigRational`] gives exact arithmetic for
/// inversion and identity checks.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Exact conversion for rationals (dyadic expansion of the float); `None`
    /// for NaN or infinities.
    fn from_f64(v: f64) -> Option<Self>;
    fn from_bigint(v: &BigInt) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    fn is_zero(&self) -> bool;

    fn powi(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }

    fn is_finite(&self) -> bool {
        true
    }

    /// Sum with the most accurate strategy available for the type.
    fn sum_iter<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        iter.into_iter().fold(Self::zero(), |acc, v| acc + v)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }
    fn from_bigint(v: &BigInt) -> Self {
        v.to_f64().unwrap_or(f64::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn powi(&self, exp: u32) -> Self {
        f64::powi(*self, exp as i32)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn sum_iter<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        let mut acc = NeumaierSum::default();
        for v in iter {
            acc.add(v);
        }
        acc.value()
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }
    fn from_bigint(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// Neumaier's improved Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Compensated sum of a float slice.
pub fn fsum(values: &[f64]) -> f64 {
    f64::sum_iter(values.iter().copied())
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `ln(n!)`, accumulated with compensation and cached per thread-safe table.
pub fn ln_factorial(n: u64) -> f64 {
    use std::sync::RwLock;
    static TABLE: RwLock<Vec<f64>> = RwLock::new(Vec::new());
    let idx = n as usize;
    if let Some(v) = TABLE.read().expect("ln-factorial table poisoned").get(idx) {
        return *v;
    }
    let mut table = TABLE.write().expect("ln-factorial table poisoned");
    if table.is_empty() {
        table.push(0.0);
    }
    let mut acc = NeumaierSum::default();
    acc.add(*table.last().unwrap());
    while table.len() <= idx {
        acc.add((table.len() as f64).ln());
        table.push(acc.value());
    }
    table[idx]
}

/// Binomial probability weight `C(n,k) p^k q^(n-k)` evaluated stably in
/// floating point (exact products for small `n`, log space otherwise).
pub fn binomial_weight(n: u64, k: u64, p: f64, q: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= 60 {
        let c = binomial(n, k).to_f64().unwrap_or(f64::INFINITY);
        return c * p.powi(k as i32) * q.powi((n - k) as i32);
    }
    if p == 0.0 {
        return if k == 0 { q.powi(n as i32) } else { 0.0 };
    }
    if q == 0.0 {
        return if k == n { p.powi(n as i32) } else { 0.0 };
    }
    let ln_c = ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k);
    (ln_c + k as f64 * p.ln() + (n - k) as f64 * q.ln()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(0, 0), BigInt::from(1));
        assert_eq!(binomial(3, 4), BigInt::from(0));
    }

    #[test]
    fn ln_factorial_matches_direct_product() {
        let direct: f64 = (1..=20u64).map(|i| (i as f64).ln()).sum();
        assert!((ln_factorial(20) - direct).abs() < 1e-12);
        assert_eq!(ln_factorial(0), 0.0);
    }

    #[test]
    fn binomial_weight_log_path_agrees_with_exact_path() {
        // n = 61 goes through logs; compare to exact rational evaluation
        let exact = binomial(61, 30).to_f64().unwrap() * 0.5f64.powi(61);
        let w = binomial_weight(61, 30, 0.5, 0.5);
        assert!((w - exact).abs() / exact < 1e-12);
    }

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(fsum(&v), 2.0);
    }

    #[test]
    fn rational_from_float_is_exact() {
        let r = BigRational::from_f64(0.5).unwrap();
        assert_eq!(r, BigRational::from_ratio(1, 2));
        assert!(BigRational::from_f64(f64::NAN).is_none());
    }
}
