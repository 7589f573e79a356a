//! Declarative matrix specs (JSON or `name:param` shorthand).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{builtin, BuiltinName, InfMatrix, Kernel, Shape};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seq::SequenceSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MatrixSpec {
    Builtin {
        name: BuiltinName,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t: Option<SequenceSpec>,
    },
    /// Lower bidiagonal: `diag[i]` on `(i+1, i+1)`, `sub[i]` on `(i+2, i+1)`.
    /// The last value of each list repeats indefinitely.
    Band {
        diag: Vec<f64>,
        #[serde(default)]
        sub: Vec<f64>,
    },
    /// Finite block, zero-padded outside the given rows and columns.
    Dense { rows: Vec<Vec<f64>> },
}

impl MatrixSpec {
    pub fn builtin(name: BuiltinName) -> Self {
        MatrixSpec::Builtin { name, r: None, t: None }
    }

    pub fn euler(r: f64) -> Self {
        MatrixSpec::Builtin { name: BuiltinName::Euler, r: Some(r), t: None }
    }

    pub fn taylor(r: f64) -> Self {
        MatrixSpec::Builtin { name: BuiltinName::Taylor, r: Some(r), t: None }
    }

    pub fn riesz(t: SequenceSpec) -> Self {
        MatrixSpec::Builtin { name: BuiltinName::Riesz, r: None, t: Some(t) }
    }

    pub fn builtin_name(&self) -> Option<BuiltinName> {
        match self {
            MatrixSpec::Builtin { name, .. } => Some(*name),
            _ => None,
        }
    }
}

impl fmt::Display for MatrixSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixSpec::Builtin { name, r: Some(r), t: None } => write!(f, "{name}:{r}"),
            MatrixSpec::Builtin { name, r: None, t: Some(t) } => write!(f, "{name}:{t}"),
            MatrixSpec::Builtin { name, r: None, t: None } => write!(f, "{name}"),
            other => f.write_str(&serde_json::to_string(other).map_err(|_| fmt::Error)?),
        }
    }
}

impl FromStr for MatrixSpec {
    type Err = Error;

    /// JSON, a bare builtin name, `euler:0.5` / `taylor:0.5`, or
    /// `riesz:<sequence shorthand>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()));
        }
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let name: BuiltinName = head.parse()?;
        match (name, arg) {
            (BuiltinName::Euler | BuiltinName::Taylor, Some(a)) => {
                let r = a.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{name}: {e}")))?;
                Ok(MatrixSpec::Builtin { name, r: Some(r), t: None })
            }
            (BuiltinName::Riesz, Some(a)) => Ok(MatrixSpec::Builtin { name, r: None, t: Some(a.parse()?) }),
            (_, None) => Ok(MatrixSpec::builtin(name)),
            (_, Some(_)) => Err(Error::Parse(format!("builtin `{name}` takes no parameter"))),
        }
    }
}

struct DenseKernel<S> {
    rows: Arc<Vec<Vec<S>>>,
    shape: Shape,
}

impl<S: Scalar> Kernel<S> for DenseKernel<S> {
    fn shape(&self) -> Shape {
        self.shape
    }
    fn entry(&self, n: usize, k: usize) -> Result<S> {
        Ok(self.rows.get(n - 1).and_then(|r| r.get(k - 1)).cloned().unwrap_or_else(S::zero))
    }
    fn padded(&self) -> bool {
        true
    }
}

fn exact<S: Scalar>(name: &str, v: f64) -> Result<S> {
    S::from_f64(v).ok_or_else(|| Error::param(name, "entries must be finite"))
}

/// Resolve a spec to a matrix over `S`.
pub fn build_matrix<S: Scalar>(spec: &MatrixSpec) -> Result<InfMatrix<S>> {
    match spec {
        MatrixSpec::Builtin { name, r, t } => builtin(*name, *r, t.as_ref()),
        MatrixSpec::Band { diag, sub } => {
            if diag.is_empty() {
                return Err(Error::param("diag", "must not be empty"));
            }
            let d: Vec<S> = diag.iter().map(|v| exact("diag", *v)).collect::<Result<_>>()?;
            let s: Vec<S> = sub.iter().map(|v| exact("sub", *v)).collect::<Result<_>>()?;
            let lower = usize::from(!sub.is_empty());
            Ok(InfMatrix::from_fn(
                "band",
                format!("a_nn = diag[n], a_n,n-1 = sub[n-1]; diag = {diag:?}, sub = {sub:?}, last values repeat"),
                Shape::lower_band(lower),
                move |n, k| {
                    let pick = |v: &Vec<S>, i: usize| v.get(i).or(v.last()).cloned().unwrap_or_else(S::zero);
                    if n == k {
                        pick(&d, n - 1)
                    } else {
                        pick(&s, k - 1)
                    }
                },
            ))
        }
        MatrixSpec::Dense { rows } => {
            let data: Vec<Vec<S>> = rows
                .iter()
                .map(|r| r.iter().map(|v| exact("rows", *v)).collect::<Result<Vec<_>>>())
                .collect::<Result<_>>()?;
            let mut upper = 0usize;
            let mut lower = 0usize;
            let mut cols = 0usize;
            for (i, r) in data.iter().enumerate() {
                for (j, v) in r.iter().enumerate() {
                    if !v.is_zero() {
                        let (n, k) = (i + 1, j + 1);
                        upper = upper.max(k.saturating_sub(n));
                        lower = lower.max(n.saturating_sub(k));
                        cols = cols.max(k);
                    }
                }
            }
            let shape = Shape { upper: Some(upper), lower: Some(lower), rows: Some(data.len()), cols: Some(cols) };
            Ok(InfMatrix::new("dense", format!("explicit {}-row block, zero-padded", data.len()), DenseKernel {
                rows: Arc::new(data),
                shape,
            }))
        }
    }
}
