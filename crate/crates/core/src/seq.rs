//! Lazily evaluated sequences, their specs, and finite truncations.
//!
//! Indices are 1-based throughout: `entry(1)` is the first term.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

type Rule<S> = Arc<dyn Fn(usize) -> S + Send + Sync>;

/// An infinite sequence given by a pure rule `k -> x_k`.
///
/// When `support_hint` is `Some(m)`, every term beyond `m` is zero and the
/// rule is never called there.
#[derive(Clone)]
pub struct Sequence<S> {
    rule: Rule<S>,
    support_hint: Option<usize>,
    label: Arc<str>,
}

impl<S: Scalar> Sequence<S> {
    pub fn from_fn(label: impl Into<String>, rule: impl Fn(usize) -> S + Send + Sync + 'static) -> Self {
        Sequence { rule: Arc::new(rule), support_hint: None, label: Arc::from(label.into()) }
    }

    /// Declare that all terms past `m` vanish.
    pub fn with_support(mut self, m: usize) -> Self {
        self.support_hint = Some(m);
        self
    }

    pub fn zero() -> Self {
        Sequence::from_fn("0", |_| S::zero()).with_support(0)
    }

    /// The unit sequence `e^(k)`.
    pub fn unit(k: usize) -> Self {
        Sequence::from_fn(format!("e^({k})"), move |n| if n == k { S::one() } else { S::zero() })
            .with_support(k)
    }

    pub fn constant(value: S) -> Self {
        let label = format!("const({:?})", value);
        Sequence::from_fn(label, move |_| value.clone())
    }

    /// Finitely supported sequence with the given leading terms.
    pub fn from_values(label: impl Into<String>, values: Vec<S>) -> Self {
        let len = values.len();
        let values = Arc::new(values);
        Sequence::from_fn(label, move |k| values.get(k - 1).cloned().unwrap_or_else(S::zero))
            .with_support(len)
    }

    /// `alpha * x + beta * y`.
    pub fn linear_combination(alpha: S, x: &Sequence<S>, beta: S, y: &Sequence<S>) -> Self {
        let support = match (x.support_hint, y.support_hint) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        let (xc, yc) = (x.clone(), y.clone());
        let label = format!("{:?}*{} + {:?}*{}", alpha, x.label, beta, y.label);
        let mut seq = Sequence::from_fn(label, move |k| {
            alpha.clone() * xc.entry(k) + beta.clone() * yc.entry(k)
        });
        seq.support_hint = support;
        seq
    }

    pub fn entry(&self, k: usize) -> S {
        debug_assert!(k >= 1, "sequences are 1-based");
        match self.support_hint {
            Some(m) if k > m => S::zero(),
            _ => (self.rule)(k),
        }
    }

    pub fn support_hint(&self) -> Option<usize> {
        self.support_hint
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T + Send + Sync + 'static) -> Sequence<T> {
        let inner = self.clone();
        let mut out = Sequence::from_fn(self.label.to_string(), move |k| f(inner.entry(k)));
        out.support_hint = self.support_hint;
        out
    }
}

impl<S> fmt::Debug for Sequence<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Sequence")
            .field("label", &self.label)
            .field("support_hint", &self.support_hint)
            .finish()
    }
}

/// A finite truncation `(x_1, ..., x_N)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteVector<S> {
    pub entries: Vec<S>,
    pub origin: String,
    /// Set when a non-finite value was produced and clamped on storage.
    pub overflow: bool,
}

impl<S: Scalar> FiniteVector<S> {
    pub fn new(origin: impl Into<String>, entries: Vec<S>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyTruncation);
        }
        let mut overflow = false;
        let entries = entries
            .into_iter()
            .map(|v| {
                if v.is_finite() {
                    v
                } else {
                    overflow = true;
                    clamp_non_finite(v)
                }
            })
            .collect();
        Ok(FiniteVector { entries, origin: origin.into(), overflow })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// 1-based access.
    pub fn get(&self, k: usize) -> &S {
        &self.entries[k - 1]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(Scalar::to_f64).collect()
    }

    /// Treat the truncation as a finitely supported sequence.
    pub fn to_sequence(&self) -> Sequence<S> {
        Sequence::from_values(self.origin.clone(), self.entries.clone())
    }
}

fn clamp_non_finite<S: Scalar>(v: S) -> S {
    let f = v.to_f64();
    let clamped = if f.is_nan() { 0.0 } else { f64::MAX.copysign(f) };
    S::from_f64(clamped).unwrap_or_else(S::zero)
}

/// `(x_1, ..., x_N)`.
pub fn truncate<S: Scalar>(x: &Sequence<S>, n: usize) -> Result<FiniteVector<S>> {
    if n == 0 {
        return Err(Error::EmptyTruncation);
    }
    FiniteVector::new(x.label().to_string(), (1..=n).map(|k| x.entry(k)).collect())
}

/// Partial sums `s_n = x_1 + ... + x_n` of a float vector.
pub fn partial_sums(values: &[f64]) -> Vec<f64> {
    let mut acc = crate::scalar::NeumaierSum::default();
    values
        .iter()
        .map(|v| {
            acc.add(*v);
            acc.value()
        })
        .collect()
}

fn default_one() -> f64 {
    1.0
}

fn is_one(v: &f64) -> bool {
    *v == 1.0
}

fn is_false(v: &bool) -> bool {
    !*v
}

/// Declarative sequence description, JSON-serializable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SequenceSpec {
    /// `harmonic` (1/k), `alternating` ((-1)^k), `ones`, `zero`.
    Builtin { name: String },
    List { values: Vec<f64> },
    /// `scale * (+-1)^k * k^p`.
    Power {
        p: f64,
        #[serde(default, skip_serializing_if = "is_false")]
        alternating: bool,
        #[serde(default = "default_one", skip_serializing_if = "is_one")]
        scale: f64,
    },
    /// `scale * r^k`.
    Geometric {
        r: f64,
        #[serde(default = "default_one", skip_serializing_if = "is_one")]
        scale: f64,
    },
    Unit { k: usize },
    Constant { value: f64 },
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::param(name, "must be finite"))
    }
}

fn exact<S: Scalar>(name: &str, v: f64) -> Result<S> {
    S::from_f64(finite(name, v)?).ok_or_else(|| Error::param(name, "must be finite"))
}

/// Build a [`Sequence`] from its spec.
pub fn make_sequence<S: Scalar>(spec: &SequenceSpec) -> Result<Sequence<S>> {
    let seq = match spec {
        SequenceSpec::Builtin { name } => match name.as_str() {
            "harmonic" => Sequence::from_fn("harmonic", |k| S::from_ratio(1, k as i64)),
            "alternating" => Sequence::from_fn("alternating", |k| {
                if k % 2 == 0 {
                    S::one()
                } else {
                    -S::one()
                }
            }),
            "ones" => Sequence::from_fn("ones", |_| S::one()),
            "zero" => Sequence::zero(),
            other => return Err(Error::UnknownBuiltin(other.to_string())),
        },
        SequenceSpec::List { values } => {
            let vals = values
                .iter()
                .map(|v| exact::<S>("values", *v))
                .collect::<Result<Vec<_>>>()?;
            if vals.is_empty() {
                Sequence::zero()
            } else {
                Sequence::from_values("list", vals)
            }
        }
        SequenceSpec::Power { p, alternating, scale } => {
            let p = finite("p", *p)?;
            let scale: S = exact("scale", *scale)?;
            let alternating = *alternating;
            let label = format!("{}k^{}", if alternating { "(-1)^k " } else { "" }, p);
            let sign = move |k: usize| if alternating && k % 2 == 1 { -S::one() } else { S::one() };
            if p.fract() == 0.0 && p.abs() <= 64.0 {
                let e = p.abs() as u32;
                let negative = p < 0.0;
                Sequence::from_fn(label, move |k| {
                    let base = S::from_i64(k as i64).powi(e);
                    let mag = if negative { base.recip() } else { base };
                    scale.clone() * sign(k) * mag
                })
            } else if S::EXACT {
                return Err(Error::Mode {
                    mode: "rational".into(),
                    what: format!("non-integer exponent p = {p}"),
                });
            } else {
                Sequence::from_fn(label, move |k| {
                    let v = S::from_f64((k as f64).powf(p)).unwrap_or_else(S::zero);
                    scale.clone() * sign(k) * v
                })
            }
        }
        SequenceSpec::Geometric { r, scale } => {
            let r: S = exact("r", *r)?;
            let scale: S = exact("scale", *scale)?;
            Sequence::from_fn(format!("geometric({:?})", r), move |k| scale.clone() * r.powi(k as u32))
        }
        SequenceSpec::Unit { k } => {
            if *k == 0 {
                return Err(Error::param("k", "unit index is 1-based"));
            }
            Sequence::unit(*k)
        }
        SequenceSpec::Constant { value } => Sequence::constant(exact("value", *value)?),
    };
    Ok(seq)
}

impl fmt::Display for SequenceSpec {
    /// Shorthand form where one exists, JSON otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceSpec::Builtin { name } => write!(f, "{name}"),
            SequenceSpec::Unit { k } => write!(f, "unit:{k}"),
            SequenceSpec::Constant { value } => write!(f, "const:{value}"),
            SequenceSpec::Power { p, alternating: false, scale } if *scale == 1.0 => write!(f, "power:{p}"),
            SequenceSpec::Power { p, alternating: true, scale } if *scale == 1.0 => write!(f, "altpower:{p}"),
            SequenceSpec::Geometric { r, scale } if *scale == 1.0 => write!(f, "geometric:{r}"),
            SequenceSpec::List { values } if !values.is_empty() => {
                let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                write!(f, "list:{}", parts.join(","))
            }
            other => {
                let json = serde_json::to_string(other).map_err(|_| fmt::Error)?;
                f.write_str(&json)
            }
        }
    }
}

impl FromStr for SequenceSpec {
    type Err = Error;

    /// Accepts JSON or the `name:params` shorthand
    /// (`unit:3`, `const:1`, `power:-2`, `altpower:-1`, `geometric:0.5`,
    /// `list:1,2,3`, `harmonic`, `alternating`, `ones`, `zero`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()));
        }
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let num = |a: Option<&str>| -> Result<f64> {
            a.ok_or_else(|| Error::Parse(format!("`{name}` needs a parameter")))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("{name}: {e}")))
        };
        Ok(match name {
            "unit" => SequenceSpec::Unit {
                k: arg
                    .ok_or_else(|| Error::Parse("unit needs an index".into()))?
                    .parse()
                    .map_err(|e| Error::Parse(format!("unit: {e}")))?,
            },
            "const" | "constant" => SequenceSpec::Constant { value: num(arg)? },
            "power" => SequenceSpec::Power { p: num(arg)?, alternating: false, scale: 1.0 },
            "altpower" => SequenceSpec::Power { p: num(arg)?, alternating: true, scale: 1.0 },
            "geometric" => SequenceSpec::Geometric { r: num(arg)?, scale: 1.0 },
            "list" => SequenceSpec::List {
                values: arg
                    .unwrap_or("")
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("list: {e}"))))
                    .collect::<Result<_>>()?,
            },
            "harmonic" | "alternating" | "ones" | "zero" => SequenceSpec::Builtin { name: name.to_string() },
            other => return Err(Error::UnknownBuiltin(other.to_string())),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn seq(spec: &str) -> Sequence<f64> {
        make_sequence(&spec.parse().unwrap()).unwrap()
    }

    #[test]
    fn unit_sequence_has_single_one() {
        let e1 = seq("unit:1");
        assert_eq!(truncate(&e1, 3).unwrap().entries, vec![1.0, 0.0, 0.0]);
        assert_eq!(e1.support_hint(), Some(1));
        let e2 = seq("unit:2");
        assert_eq!(truncate(&e2, 3).unwrap().entries, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn builtin_entries() {
        assert_eq!(seq("geometric:0.5").entry(3), 0.125);
        assert_eq!(seq("harmonic").entry(4), 0.25);
        assert_eq!(truncate(&seq("harmonic"), 2).unwrap().entries, vec![1.0, 0.5]);
        assert_eq!(
            truncate(&seq("geometric:0.5"), 4).unwrap().entries,
            vec![0.5, 0.25, 0.125, 0.0625]
        );
        assert_eq!(seq("power:-2").entry(3), 1.0 / 9.0);
        assert_eq!(seq("altpower:-1").entry(3), -1.0 / 3.0);
        assert_eq!(seq("alternating").entry(1), -1.0);
    }

    #[test]
    fn json_specs_parse() {
        let s: SequenceSpec = r#"{"kind":"builtin","name":"harmonic"}"#.parse().unwrap();
        assert_eq!(s, SequenceSpec::Builtin { name: "harmonic".into() });
        let s: SequenceSpec = r#"{"kind":"power","p":-2}"#.parse().unwrap();
        assert_eq!(s, SequenceSpec::Power { p: -2.0, alternating: false, scale: 1.0 });
        let s: SequenceSpec = r#"{"kind":"unit","k":3}"#.parse().unwrap();
        assert!(matches!(s, SequenceSpec::Unit { k: 3 }));
        let s: SequenceSpec = r#"{"kind":"list","values":[1,2]}"#.parse().unwrap();
        assert_eq!(make_sequence::<f64>(&s).unwrap().support_hint(), Some(2));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            make_sequence::<f64>(&SequenceSpec::Builtin { name: "nope".into() }),
            Err(Error::UnknownBuiltin(_))
        ));
        assert!(make_sequence::<f64>(&SequenceSpec::Geometric { r: f64::NAN, scale: 1.0 }).is_err());
        assert!(matches!(truncate(&seq("ones"), 0), Err(Error::EmptyTruncation)));
        assert!(make_sequence::<BigRational>(&SequenceSpec::Power { p: 0.5, alternating: false, scale: 1.0 })
            .is_err());
    }

    #[test]
    fn rational_geometric_is_exact() {
        let g: Sequence<BigRational> = make_sequence(&"geometric:0.5".parse().unwrap()).unwrap();
        assert_eq!(g.entry(3), BigRational::from_ratio(1, 8));
    }

    #[test]
    fn overflow_is_flagged_not_stored() {
        let v = FiniteVector::new("x", vec![1.0, f64::INFINITY, f64::NAN]).unwrap();
        assert!(v.overflow);
        assert!(v.entries.iter().all(|e| e.is_finite()));
    }

    #[test]
    fn truncation_is_deterministic() {
        let x = seq("altpower:-1");
        assert_eq!(truncate(&x, 50).unwrap(), truncate(&x, 50).unwrap());
    }
}
