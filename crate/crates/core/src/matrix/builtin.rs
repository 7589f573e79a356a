//! The builtin gallery: `Ω`, `Γ`, their inverses, identity, zero and the
//! Cesàro, Euler, Riesz and Taylor means.

use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use super::{InfMatrix, Kernel, Row, Shape};
use crate::error::{Error, Result};
use crate::scalar::{binomial, binomial_weight, NeumaierSum, Scalar};
use crate::seq::{make_sequence, Sequence, SequenceSpec};

/// Riesz weights are checked for positivity on this many leading indices.
const RIESZ_POSITIVITY_CHECK: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinName {
    Omega,
    OmegaInv,
    Gamma,
    GammaInv,
    Identity,
    Cesaro,
    Euler,
    Riesz,
    Taylor,
    Zero,
}

impl BuiltinName {
    pub const ALL: [BuiltinName; 10] = [
        BuiltinName::Omega,
        BuiltinName::OmegaInv,
        BuiltinName::Gamma,
        BuiltinName::GammaInv,
        BuiltinName::Identity,
        BuiltinName::Cesaro,
        BuiltinName::Euler,
        BuiltinName::Riesz,
        BuiltinName::Taylor,
        BuiltinName::Zero,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BuiltinName::Omega => "omega",
            BuiltinName::OmegaInv => "omega-inv",
            BuiltinName::Gamma => "gamma",
            BuiltinName::GammaInv => "gamma-inv",
            BuiltinName::Identity => "identity",
            BuiltinName::Cesaro => "cesaro",
            BuiltinName::Euler => "euler",
            BuiltinName::Riesz => "riesz",
            BuiltinName::Taylor => "taylor",
            BuiltinName::Zero => "zero",
        }
    }
}

impl fmt::Display for BuiltinName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BuiltinName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s.trim().to_ascii_lowercase().chars().filter(|c| !matches!(c, '-' | '_' | ' ')).collect();
        Ok(match norm.as_str() {
            "omega" => BuiltinName::Omega,
            "omegainv" => BuiltinName::OmegaInv,
            "gamma" => BuiltinName::Gamma,
            "gammainv" => BuiltinName::GammaInv,
            "identity" | "id" => BuiltinName::Identity,
            "cesaro" | "c1" => BuiltinName::Cesaro,
            "euler" => BuiltinName::Euler,
            "riesz" => BuiltinName::Riesz,
            "taylor" => BuiltinName::Taylor,
            "zero" => BuiltinName::Zero,
            _ => return Err(Error::UnknownBuiltin(s.to_string())),
        })
    }
}

fn unit_interval<S: Scalar>(r: Option<f64>) -> Result<(S, f64)> {
    let r = r.ok_or_else(|| Error::param("r", "required"))?;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::param("r", format!("need 0 < r < 1, got {r}")));
    }
    let exact = S::from_f64(r).ok_or_else(|| Error::param("r", "must be finite"))?;
    Ok((exact, r))
}

/// Resolve a builtin. `r` parameterizes Euler and Taylor, `t` the Riesz weights.
pub fn builtin<S: Scalar>(name: BuiltinName, r: Option<f64>, t: Option<&SequenceSpec>) -> Result<InfMatrix<S>> {
    let m = match name {
        BuiltinName::Omega => {
            InfMatrix::from_fn("omega", "a_nk = k (k <= n)", Shape::LOWER, |_, k| S::from_i64(k as i64))
        }
        BuiltinName::Gamma => {
            InfMatrix::from_fn("gamma", "b_nk = 1/k (k <= n)", Shape::LOWER, |_, k| S::from_ratio(1, k as i64))
        }
        BuiltinName::OmegaInv => InfMatrix::from_fn(
            "omega-inv",
            "c_nn = 1/n, c_n,n-1 = -1/n",
            Shape::lower_band(1),
            |n, k| {
                let v = S::from_ratio(1, n as i64);
                if k == n {
                    v
                } else {
                    -v
                }
            },
        ),
        BuiltinName::GammaInv => InfMatrix::from_fn(
            "gamma-inv",
            "d_nn = n, d_n,n-1 = -n",
            Shape::lower_band(1),
            |n, k| {
                let v = S::from_i64(n as i64);
                if k == n {
                    v
                } else {
                    -v
                }
            },
        ),
        BuiltinName::Identity => InfMatrix::identity(),
        BuiltinName::Zero => InfMatrix::zero(),
        BuiltinName::Cesaro => {
            InfMatrix::from_fn("cesaro", "a_nk = 1/n (k <= n)", Shape::LOWER, |n, _| S::from_ratio(1, n as i64))
        }
        BuiltinName::Euler => {
            let (re, rf) = unit_interval::<S>(r)?;
            let qe = S::one() - re.clone();
            InfMatrix::from_fn(
                format!("euler:{rf}"),
                format!("a_nk = C(n-1,k-1) (1-r)^(n-k) r^(k-1), r = {rf}"),
                Shape::LOWER,
                move |n, k| {
                    let (n1, k1) = ((n - 1) as u64, (k - 1) as u64);
                    if S::EXACT {
                        S::from_bigint(&binomial(n1, k1)) * re.powi(k1 as u32) * qe.powi((n - k) as u32)
                    } else {
                        S::from_f64(binomial_weight(n1, k1, rf, 1.0 - rf)).unwrap_or_else(S::zero)
                    }
                },
            )
        }
        BuiltinName::Taylor => {
            let (re, rf) = unit_interval::<S>(r)?;
            InfMatrix::new(
                format!("taylor:{rf}"),
                format!("a_nk = C(k-1,n-1) (1-r)^n r^(k-n) (k >= n), r = {rf}"),
                TaylorKernel { r: re, rf },
            )
        }
        BuiltinName::Riesz => {
            let spec = t.ok_or_else(|| Error::param("t", "Riesz weights required"))?;
            let weights: Sequence<S> = make_sequence(spec)?;
            if weights.support_hint().is_some() {
                return Err(Error::param("t", "weights must be positive for every k, not finitely supported"));
            }
            if let Some(k) = (1..=RIESZ_POSITIVITY_CHECK).find(|&k| weights.entry(k) <= S::zero()) {
                return Err(Error::param("t", format!("weight t_{k} is not positive")));
            }
            InfMatrix::new(
                format!("riesz:{spec}"),
                format!("a_nk = t_k / T_n (k <= n), T_n = t_1 + ... + t_n, t = {spec}"),
                RieszKernel { t: weights, prefix: RwLock::new(Vec::new()) },
            )
        }
    };
    Ok(m)
}

struct RieszKernel<S> {
    t: Sequence<S>,
    prefix: RwLock<Vec<S>>,
}

impl<S: Scalar> RieszKernel<S> {
    /// `T_n`, extending the cached prefix sums on demand.
    fn total(&self, n: usize) -> S {
        if let Some(v) = self.prefix.read().expect("riesz cache poisoned").get(n - 1) {
            return v.clone();
        }
        let mut prefix = self.prefix.write().expect("riesz cache poisoned");
        while prefix.len() < n {
            let next = prefix.last().cloned().unwrap_or_else(S::zero) + self.t.entry(prefix.len() + 1);
            prefix.push(next);
        }
        prefix[n - 1].clone()
    }
}

impl<S: Scalar> Kernel<S> for RieszKernel<S> {
    fn shape(&self) -> Shape {
        Shape::LOWER
    }

    fn entry(&self, n: usize, k: usize) -> Result<S> {
        Ok(self.t.entry(k) / self.total(n))
    }

    fn row(&self, n: usize, _cutoff: usize) -> Result<Row<S>> {
        let total = self.total(n);
        let values = (1..=n).map(|k| self.t.entry(k) / total.clone()).collect();
        Ok(Row { start: 1, values, complete: true, tail_mass: None })
    }
}

struct TaylorKernel<S> {
    r: S,
    rf: f64,
}

impl<S: Scalar> TaylorKernel<S> {
    fn value(&self, n: usize, k: usize) -> S {
        let (k1, n1) = ((k - 1) as u64, (n - 1) as u64);
        if S::EXACT {
            let q = S::one() - self.r.clone();
            S::from_bigint(&binomial(k1, n1)) * q.powi(n as u32) * self.r.powi((k - n) as u32)
        } else {
            // C(k-1, n-1) q^(n-1) r^(k-n), times one more factor q.
            let w = binomial_weight(k1, n1, 1.0 - self.rf, self.rf) * (1.0 - self.rf);
            S::from_f64(w).unwrap_or_else(S::zero)
        }
    }
}

impl<S: Scalar> Kernel<S> for TaylorKernel<S> {
    fn shape(&self) -> Shape {
        Shape { upper: None, lower: Some(0), rows: None, cols: None }
    }

    fn entry(&self, n: usize, k: usize) -> Result<S> {
        Ok(self.value(n, k))
    }

    /// Rows are probability vectors (negative binomial), so the omitted mass
    /// `1 - sum` bounds the tail. Evaluation stops early once past the mode
    /// the tail is below 1e-16.
    fn row(&self, n: usize, cutoff: usize) -> Result<Row<S>> {
        let end = cutoff.max(n);
        let mut values = Vec::new();
        let mut mass = NeumaierSum::default();
        let mut prev = 0.0f64;
        for k in n..=end {
            let v = self.value(n, k);
            let vf = v.to_f64();
            mass.add(vf);
            values.push(v);
            if vf < prev && 1.0 - mass.value() <= 1e-16 {
                break;
            }
            prev = vf;
        }
        let tail = (1.0 - mass.value()).max(0.0);
        Ok(Row { start: n, values, complete: false, tail_mass: Some(tail) })
    }
}
