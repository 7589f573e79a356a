//! Dual matrices `U`, `V`, the derived matrices `D, E, F, G` that reduce
//! domain classes to classical ones, and the Euler/Riesz/Taylor combinators.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::conditions::{characterize_class, lookup_cell, unsupported, ClassReport, DerivedMatrix, EvalConfig, SideCheck};
use crate::domains::DomainSpace;
use crate::error::{Error, Result};
use crate::matrix::{builtin, compose, cumulative, row_map, BuiltinName, CumulativeWeights, InfMatrix, Row, Shape, Triangle};
use crate::scalar::Scalar;
use crate::seq::{Sequence, SequenceSpec};
use crate::space::{ClassicalSpace, SpaceId, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DualKind {
    /// `sum_k a_k x_k` converges for every `x`.
    Beta,
    /// Partial sums of `sum_k a_k x_k` stay bounded.
    Gamma,
}

impl DualKind {
    /// Target space for the dual matrix.
    pub fn target(self) -> ClassicalSpace {
        match self {
            DualKind::Beta => ClassicalSpace::C,
            DualKind::Gamma => ClassicalSpace::LInf,
        }
    }
}

impl fmt::Display for DualKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DualKind::Beta => "beta",
            DualKind::Gamma => "gamma",
        })
    }
}

impl FromStr for DualKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "beta" | "b" => Ok(DualKind::Beta),
            "gamma" | "g" => Ok(DualKind::Gamma),
            other => Err(Error::Parse(format!("unknown dual kind `{other}` (beta or gamma)"))),
        }
    }
}

/// The two domain matrices with dedicated machinery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainMatrix {
    Omega,
    Gamma,
}

impl DomainMatrix {
    pub fn of<S: Scalar>(space: &DomainSpace<S>) -> Result<Self> {
        match space.builtin_name() {
            Some(BuiltinName::Omega) => Ok(DomainMatrix::Omega),
            Some(BuiltinName::Gamma) => Ok(DomainMatrix::Gamma),
            _ => Err(Error::UnsupportedSpace(format!(
                "{}: only omega and gamma domains are characterized",
                space.label()
            ))),
        }
    }

    pub fn builtin(self) -> BuiltinName {
        match self {
            DomainMatrix::Omega => BuiltinName::Omega,
            DomainMatrix::Gamma => BuiltinName::Gamma,
        }
    }
}

fn index<S: Scalar>(k: usize) -> S {
    S::from_i64(k as i64)
}

fn dual_shape(a: &Sequence<impl Scalar>) -> Shape {
    Shape { cols: a.support_hint(), ..Shape::LOWER }
}

/// `u_nk = a_k/k - a_{k+1}/(k+1)` for `k < n`, `u_nn = a_n/n`.
pub fn build_u<S: Scalar>(a: &Sequence<S>) -> Triangle<S> {
    let a = a.clone();
    let label = a.label().to_string();
    let m = InfMatrix::from_fn(
        format!("U[{label}]"),
        "u_nk = a_k/k - a_(k+1)/(k+1) for k < n, u_nn = a_n/n",
        dual_shape(&a),
        move |n, k| {
            let head = a.entry(k) / index::<S>(k);
            if k == n {
                head
            } else {
                head - a.entry(k + 1) / index::<S>(k + 1)
            }
        },
    );
    Triangle::new(m).expect("U is lower triangular")
}

/// `v_nk = k a_k - (k+1) a_{k+1}` for `k < n`, `v_nn = n a_n`.
pub fn build_v<S: Scalar>(a: &Sequence<S>) -> Triangle<S> {
    let a = a.clone();
    let label = a.label().to_string();
    let m = InfMatrix::from_fn(
        format!("V[{label}]"),
        "v_nk = k a_k - (k+1) a_(k+1) for k < n, v_nn = n a_n",
        dual_shape(&a),
        move |n, k| {
            let head = index::<S>(k) * a.entry(k);
            if k == n {
                head
            } else {
                head - index::<S>(k + 1) * a.entry(k + 1)
            }
        },
    );
    Triangle::new(m).expect("V is lower triangular")
}

/// Row `n` of `w(k) a_nk - w(k+1) a_{n,k+1}`.
fn weighted_difference<S: Scalar>(src: &Row<S>, w: impl Fn(usize) -> S) -> Row<S> {
    if src.values.is_empty() {
        return Row::empty();
    }
    let start = src.start.saturating_sub(1).max(1);
    let last = if src.effectively_complete() { src.end() } else { src.end() - 1 };
    let values = (start..=last)
        .map(|k| w(k) * src.get(k) - w(k + 1) * src.get(k + 1))
        .collect();
    Row { start, values, complete: src.complete, tail_mass: None }
}

fn difference_shape(s: Shape) -> Shape {
    Shape { lower: s.lower.map(|l| l + 1), ..s }
}

/// `d_nk = a_nk/k - a_{n,k+1}/(k+1)`, so that `D y = A x` for `x = Omega^-1 y`.
pub fn derive_d<S: Scalar>(a: &InfMatrix<S>) -> InfMatrix<S> {
    row_map(
        a,
        format!("D[{}]", a.name()),
        "d_nk = a_nk/k - a_n,k+1/(k+1)",
        difference_shape(a.shape()),
        |_, row| weighted_difference(row, |k| S::one() / index::<S>(k)),
    )
}

/// `f_nk = k a_nk - (k+1) a_{n,k+1}`, the analogue of `D` for `Gamma`.
pub fn derive_f<S: Scalar>(a: &InfMatrix<S>) -> InfMatrix<S> {
    row_map(
        a,
        format!("F[{}]", a.name()),
        "f_nk = k a_nk - (k+1) a_n,k+1",
        difference_shape(a.shape()),
        |_, row| weighted_difference(row, index::<S>),
    )
}

/// `e_nk = sum_{j<=n} j a_jk`, i.e. `E z = Omega (A z)`.
pub fn derive_e<S: Scalar>(a: &InfMatrix<S>) -> InfMatrix<S> {
    cumulative(
        a,
        format!("E[{}]", a.name()),
        "e_nk = sum_{j<=n} j a_jk",
        CumulativeWeights { weight: Arc::new(index::<S>), normalize: false },
    )
}

/// `g_nk = sum_{j<=n} a_jk / j`, i.e. `G z = Gamma (A z)`.
pub fn derive_g<S: Scalar>(a: &InfMatrix<S>) -> InfMatrix<S> {
    cumulative(
        a,
        format!("G[{}]", a.name()),
        "g_nk = sum_{j<=n} a_jk / j",
        CumulativeWeights { weight: Arc::new(|j| S::one() / index::<S>(j)), normalize: false },
    )
}

fn derived_info(symbol: &str, m: &InfMatrix<f64>) -> DerivedMatrix {
    DerivedMatrix { symbol: symbol.into(), name: m.name().into(), formula: m.formula().into() }
}

/// Membership of `a` in the beta or gamma dual of `space`, via
/// `U in (X : c)` / `(X : linf)` for Omega and `V` for Gamma.
pub fn dual_membership(
    a: &Sequence<f64>,
    space: &DomainSpace<f64>,
    kind: DualKind,
    cfg: &EvalConfig,
) -> Result<ClassReport> {
    let which = DomainMatrix::of(space)?;
    let (symbol, m) = match which {
        DomainMatrix::Omega => ("U", build_u(a).into_matrix()),
        DomainMatrix::Gamma => ("V", build_v(a).into_matrix()),
    };
    let mut report = characterize_class(&m, space.base, kind.target(), cfg)?;
    report.from = space.label();
    report.to = format!("{kind} dual membership of {}", a.label());
    report.derived_matrix = Some(derived_info(symbol, &m));
    if let Some(s) = a.support_hint() {
        report.notes.push(format!("a has finite support {s}"));
    }
    Ok(report)
}

/// Rows `n <= row_sample` of `A` checked against `[X(T)]^beta`.
pub const DEFAULT_ROW_SAMPLE: usize = 20;

fn row_dual_checks(
    a: &InfMatrix<f64>,
    space: &DomainSpace<f64>,
    cfg: &EvalConfig,
    row_sample: usize,
) -> Result<Vec<SideCheck>> {
    let mut checks = Vec::with_capacity(row_sample);
    for n in 1..=row_sample {
        let row = a.row(n, cfg.cutoff())?;
        if row.complete {
            checks.push(SideCheck {
                label: format!("row {n} in beta dual"),
                verdict: Verdict::Satisfied,
                note: "finite row".into(),
            });
            continue;
        }
        let am = a.clone();
        let seq = Sequence::from_fn(format!("row {n} of {}", a.name()), move |k| am.entry(n, k).unwrap_or(f64::NAN));
        let r = dual_membership(&seq, space, DualKind::Beta, cfg)?;
        checks.push(SideCheck {
            label: format!("row {n} in beta dual"),
            verdict: r.verdict,
            note: format!("{} on {}", r.table_cell, r.derived_matrix.map(|d| d.symbol).unwrap_or_default()),
        });
    }
    Ok(checks)
}

/// Characterize `A in (from : to)` where exactly one side is an Omega or
/// Gamma domain: domain sources through `D`/`F` plus row duals, domain
/// targets through `E`/`G`.
pub fn characterize_domain_class(
    a: &InfMatrix<f64>,
    from: &SpaceId,
    to: &SpaceId,
    cfg: &EvalConfig,
    row_sample: usize,
) -> Result<ClassReport> {
    match (from, to) {
        (SpaceId::Domain { .. }, SpaceId::Classical(target)) => {
            let space = DomainSpace::<f64>::from_space_id(from)?;
            let which = DomainMatrix::of(&space)?;
            if lookup_cell(space.base, *target).is_none() {
                return Err(unsupported(from, to));
            }
            let (symbol, derived) = match which {
                DomainMatrix::Omega => ("D", derive_d(a)),
                DomainMatrix::Gamma => ("F", derive_f(a)),
            };
            let mut report = characterize_class(&derived, space.base, *target, cfg)?;
            report.side_checks = row_dual_checks(a, &space, cfg, row_sample)?;
            report.notes.push(format!("row duals sampled for n <= {row_sample}"));
            finish(report, a, from, to, symbol, &derived)
        }
        (SpaceId::Classical(source), SpaceId::Domain { base, .. }) => {
            let space = DomainSpace::<f64>::from_space_id(to)?;
            let which = DomainMatrix::of(&space)?;
            if lookup_cell(*source, *base).is_none() {
                return Err(unsupported(from, to));
            }
            let (symbol, derived) = match which {
                DomainMatrix::Omega => ("E", derive_e(a)),
                DomainMatrix::Gamma => ("G", derive_g(a)),
            };
            let report = characterize_class(&derived, *source, *base, cfg)?;
            finish(report, a, from, to, symbol, &derived)
        }
        (SpaceId::Domain { .. }, SpaceId::Domain { .. }) => Err(unsupported(from, to)),
        (SpaceId::Classical(_), SpaceId::Classical(_)) => {
            Err(Error::Precondition("one side must be a matrix domain; use characterize_class".into()))
        }
    }
}

fn finish(
    mut report: ClassReport,
    a: &InfMatrix<f64>,
    from: &SpaceId,
    to: &SpaceId,
    symbol: &str,
    derived: &InfMatrix<f64>,
) -> Result<ClassReport> {
    report.from = from.to_string();
    report.to = to.to_string();
    report.matrix = a.name().to_string();
    report.derived_matrix = Some(derived_info(symbol, derived));
    report.refresh_verdict();
    Ok(report)
}

/// Dispatch to the classical or domain characterization.
pub fn characterize(
    a: &InfMatrix<f64>,
    from: &SpaceId,
    to: &SpaceId,
    cfg: &EvalConfig,
    row_sample: usize,
) -> Result<ClassReport> {
    match (from, to) {
        (SpaceId::Classical(x), SpaceId::Classical(y)) => characterize_class(a, *x, *y, cfg),
        _ => characterize_domain_class(a, from, to, cfg, row_sample),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Gallery {
    /// `h_nk = sum_j C(n-1, j-1) (1-r)^(n-j) r^(j-1) a_jk`.
    EulerH { r: f64 },
    /// `p_nk = (1/T_n) sum_{j<=n} t_j a_jk`.
    RieszP { t: SequenceSpec },
    /// The Taylor mean composed with `A`.
    TaylorT { r: f64 },
}

/// The combined matrix `H`, `P` or `T` built over `A`.
pub fn gallery_combinator<S: Scalar>(g: &Gallery, a: &InfMatrix<S>) -> Result<InfMatrix<S>> {
    match g {
        Gallery::EulerH { r } => {
            let e = builtin::<S>(BuiltinName::Euler, Some(*r), None)?;
            Ok(compose(&e, a).renamed(format!("H[{}; {}]", e.name(), a.name()), format!("Euler({r}) * A, A = {}", a.formula())))
        }
        Gallery::TaylorT { r } => {
            let t = builtin::<S>(BuiltinName::Taylor, Some(*r), None)?;
            Ok(compose(&t, a).renamed(format!("T[{}; {}]", t.name(), a.name()), format!("Taylor({r}) * A, A = {}", a.formula())))
        }
        Gallery::RieszP { t } => {
            // validates the weights
            let riesz = builtin::<S>(BuiltinName::Riesz, None, Some(t))?;
            let w = crate::seq::make_sequence::<S>(t)?;
            Ok(cumulative(
                a,
                format!("P[{}; {}]", riesz.name(), a.name()),
                format!("p_nk = (1/T_n) sum_(j<=n) t_j a_jk, t = {t}"),
                CumulativeWeights { weight: Arc::new(move |j| w.entry(j)), normalize: true },
            ))
        }
    }
}
