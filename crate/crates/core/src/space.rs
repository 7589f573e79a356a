//! Three-valued verdicts, space identifiers and classical-space membership.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limit::{analyze_sup, default_window, detect_limit, LimitKind, LimitVerdict, SupAnalysis, SupTrend};
use crate::matrix::MatrixSpec;
use crate::scalar::Scalar;
use crate::seq::{partial_sums, truncate, Sequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Satisfied,
    Violated,
    Inconclusive,
}

impl Verdict {
    /// Three-valued conjunction: any `Violated` wins, then any `Inconclusive`.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Violated, _) | (_, Violated) => Violated,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Satisfied,
        }
    }

    pub fn all(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        verdicts.into_iter().fold(Verdict::Satisfied, Verdict::and)
    }

    /// CLI exit code: 0 satisfied, 1 violated, 2 inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Satisfied => 0,
            Verdict::Violated => 1,
            Verdict::Inconclusive => 2,
        }
    }

    pub fn is_decided(self) -> bool {
        self != Verdict::Inconclusive
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Satisfied => "Satisfied",
            Verdict::Violated => "Violated",
            Verdict::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassicalSpace {
    #[serde(rename = "c0")]
    C0,
    #[serde(rename = "c")]
    C,
    #[serde(rename = "linf")]
    LInf,
    #[serde(rename = "bs")]
    BS,
    #[serde(rename = "cs")]
    CS,
}

impl ClassicalSpace {
    pub const ALL: [ClassicalSpace; 5] =
        [ClassicalSpace::C0, ClassicalSpace::C, ClassicalSpace::LInf, ClassicalSpace::BS, ClassicalSpace::CS];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassicalSpace::C0 => "c0",
            ClassicalSpace::C => "c",
            ClassicalSpace::LInf => "linf",
            ClassicalSpace::BS => "bs",
            ClassicalSpace::CS => "cs",
        }
    }

    /// Series spaces are tested on partial sums.
    pub fn is_series_space(self) -> bool {
        matches!(self, ClassicalSpace::BS | ClassicalSpace::CS)
    }
}

impl fmt::Display for ClassicalSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassicalSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "c0" | "c_0" => Ok(ClassicalSpace::C0),
            "c" => Ok(ClassicalSpace::C),
            "linf" | "l_inf" | "l_infty" | "ell_inf" | "ℓ∞" => Ok(ClassicalSpace::LInf),
            "bs" => Ok(ClassicalSpace::BS),
            "cs" => Ok(ClassicalSpace::CS),
            other => Err(Error::UnsupportedSpace(other.to_string())),
        }
    }
}

/// A classical space or the matrix domain `base(matrix) = {x : matrix·x ∈ base}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceId {
    Classical(ClassicalSpace),
    Domain { base: ClassicalSpace, matrix: MatrixSpec },
}

impl SpaceId {
    pub fn classical(&self) -> Option<ClassicalSpace> {
        match self {
            SpaceId::Classical(c) => Some(*c),
            SpaceId::Domain { .. } => None,
        }
    }

    pub fn is_domain(&self) -> bool {
        matches!(self, SpaceId::Domain { .. })
    }
}

impl From<ClassicalSpace> for SpaceId {
    fn from(c: ClassicalSpace) -> Self {
        SpaceId::Classical(c)
    }
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceId::Classical(c) => write!(f, "{c}"),
            SpaceId::Domain { base, matrix } => write!(f, "{base}({matrix})"),
        }
    }
}

impl FromStr for SpaceId {
    type Err = Error;

    /// Accepts `c0`, `linf`, ... and domain forms such as `c0(omega)` or
    /// `c(euler:0.5)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(open) = s.find('(') {
            let inner = s[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in space `{s}`")))?;
            let base: ClassicalSpace = s[..open].parse()?;
            let matrix: MatrixSpec = inner.parse()?;
            return Ok(SpaceId::Domain { base, matrix });
        }
        Ok(SpaceId::Classical(s.parse()?))
    }
}

/// Outcome of a membership probe with its numeric evidence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Membership {
    pub space: ClassicalSpace,
    pub verdict: Verdict,
    /// Set for `c0`, `c` and `cs`.
    pub limit: Option<LimitVerdict>,
    /// Set for `linf` and `bs`.
    pub sup: Option<SupAnalysis>,
    /// Satisfied verdicts only certify the observed truncation.
    pub truncation_limited: bool,
    pub note: String,
}

/// Probe a finite prefix against a classical space.
pub fn classify_vector(values: &[f64], space: ClassicalSpace, tol: f64, window: usize) -> Result<Membership> {
    let sums;
    let data: &[f64] = if space.is_series_space() {
        sums = partial_sums(values);
        &sums
    } else {
        values
    };
    match space {
        ClassicalSpace::C0 | ClassicalSpace::C | ClassicalSpace::CS => {
            let lv = detect_limit(data, tol, window)?;
            let (verdict, note) = match lv.kind {
                LimitKind::ConvergesTo(_) if space == ClassicalSpace::C0 => match lv.settles_at(0.0, tol) {
                    Some(true) => (Verdict::Satisfied, "tail settles at 0".to_string()),
                    Some(false) => (Verdict::Violated, format!("tail settles at {:.6e}, not 0", lv.estimate)),
                    None => (Verdict::Inconclusive, format!("tail near {:.6e}, still drifting", lv.estimate)),
                },
                LimitKind::ConvergesTo(_) => (Verdict::Satisfied, format!("tail settles at {:.6e}", lv.estimate)),
                LimitKind::Diverges => (Verdict::Violated, "monotone divergent trend".to_string()),
                LimitKind::Oscillates => (Verdict::Violated, "non-decaying oscillation".to_string()),
                LimitKind::Inconclusive => (Verdict::Inconclusive, "tail not settled".to_string()),
            };
            Ok(Membership {
                space,
                verdict,
                limit: Some(lv),
                sup: None,
                truncation_limited: verdict == Verdict::Satisfied,
                note,
            })
        }
        ClassicalSpace::LInf | ClassicalSpace::BS => {
            let sa = analyze_sup(data, tol, window)?;
            let (verdict, note) = match sa.trend {
                SupTrend::Plateau => (Verdict::Satisfied, format!("running sup flat at {:.6e}", sa.sup)),
                SupTrend::Growing => (Verdict::Violated, format!("running sup growing, {:.6e} so far", sa.sup)),
                SupTrend::Undetermined => (Verdict::Inconclusive, "running sup still rising slowly".to_string()),
            };
            Ok(Membership {
                space,
                verdict,
                limit: None,
                sup: Some(sa),
                truncation_limited: verdict == Verdict::Satisfied,
                note,
            })
        }
    }
}

/// Membership of a sequence in a classical space, judged on `truncate(x, n)`.
pub fn classify_classical<S: Scalar>(
    x: &Sequence<S>,
    space: &SpaceId,
    n: usize,
    tol: f64,
    window: Option<usize>,
) -> Result<Membership> {
    let c = space.classical().ok_or_else(|| Error::ClassicalRequired("classify_classical".into()))?;
    let window = window.unwrap_or_else(|| default_window(n));
    if n <= window {
        return Err(Error::TruncationTooSmall { n, required: window + 1 });
    }
    let v = truncate(x, n)?.to_f64();
    classify_vector(&v, c, tol, window)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(x: &Sequence<f64>, space: ClassicalSpace, n: usize) -> Verdict {
        classify_classical(x, &space.into(), n, 1e-9, None).unwrap().verdict
    }

    #[test]
    fn unit_sequence_in_c0() {
        assert_eq!(f(&Sequence::unit(1), ClassicalSpace::C0, 200), Verdict::Satisfied);
    }

    #[test]
    fn ones_not_in_cs() {
        assert_eq!(f(&Sequence::constant(1.0), ClassicalSpace::CS, 200), Verdict::Violated);
    }

    #[test]
    fn alternating_in_bs() {
        let x = Sequence::from_fn("alt", |k| if k % 2 == 0 { 1.0 } else { -1.0 });
        // oracle: partial sums enumerated directly
        let sums = partial_sums(&truncate(&x, 200).unwrap().to_f64());
        assert!(sums.iter().all(|s| *s == 0.0 || *s == -1.0));
        assert_eq!(f(&x, ClassicalSpace::BS, 200), Verdict::Satisfied);
    }

    #[test]
    fn unit_vectors_in_every_space() {
        for k in 1..=20 {
            for space in ClassicalSpace::ALL {
                assert_eq!(f(&Sequence::unit(k), space, 200), Verdict::Satisfied, "e^({k}) in {space}");
            }
        }
    }

    #[test]
    fn domain_tags_rejected() {
        let s: SpaceId = "c0(omega)".parse().unwrap();
        assert!(matches!(
            classify_classical(&Sequence::<f64>::unit(1), &s, 100, 1e-9, None),
            Err(Error::ClassicalRequired(_))
        ));
    }

    #[test]
    fn conjunction_semantics() {
        use Verdict::*;
        assert_eq!(Verdict::all([Satisfied, Satisfied]), Satisfied);
        assert_eq!(Verdict::all([Satisfied, Inconclusive]), Inconclusive);
        assert_eq!(Verdict::all([Inconclusive, Violated]), Violated);
        assert_eq!(Verdict::all([]), Satisfied);
    }

    #[test]
    fn space_strings_round_trip() {
        for s in ["c0", "c", "linf", "bs", "cs", "c0(omega)", "linf(gamma)", "c(euler:0.5)"] {
            let id: SpaceId = s.parse().unwrap();
            assert_eq!(id.to_string(), s);
        }
    }

    #[test]
    fn violated_trend_persists_when_truncation_grows() {
        let x = Sequence::constant(1.0);
        for n in [200, 400, 800] {
            assert_eq!(f(&x, ClassicalSpace::CS, n), Verdict::Violated);
        }
    }
}
