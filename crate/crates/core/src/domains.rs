//! Matrix domains `X_T = {x : T x ∈ X}` for a triangle `T` and
//! `X ∈ {c0, c, linf}`, normed by `‖x‖ = ‖T x‖_∞`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limit::{analyze_sup, default_window, detect_limit, scaled_window, LimitVerdict, SupTrend};
use crate::matrix::{apply, build_matrix, builtin, invert_triangle, BuiltinName, MatrixSpec, Triangle};
use crate::scalar::Scalar;
use crate::seq::{truncate, FiniteVector, Sequence};
use crate::space::{classify_vector, ClassicalSpace, Membership, SpaceId, Verdict};

/// How the domain transform is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformMode {
    /// `(T x)_n = sum_k t_nk x_k`.
    #[default]
    Linear,
    /// `sum_k |t_nk x_k|`, kept for comparison; not linear.
    Absolute,
}

#[derive(Clone, Debug)]
pub struct DomainSpace<S> {
    pub base: ClassicalSpace,
    pub matrix: Triangle<S>,
    pub inverse: Triangle<S>,
    pub mode: TransformMode,
    pub spec: Option<MatrixSpec>,
}

fn check_base(base: ClassicalSpace) -> Result<()> {
    match base {
        ClassicalSpace::C0 | ClassicalSpace::C | ClassicalSpace::LInf => Ok(()),
        other => Err(Error::UnsupportedSpace(format!("domain base must be c0, c or linf, got {other}"))),
    }
}

impl<S: Scalar> DomainSpace<S> {
    /// Domain over an arbitrary triangle; the inverse is computed lazily.
    pub fn new(base: ClassicalSpace, matrix: Triangle<S>) -> Result<Self> {
        check_base(base)?;
        let inverse = invert_triangle(&matrix);
        Ok(DomainSpace { base, matrix, inverse, mode: TransformMode::Linear, spec: None })
    }

    /// Domain over a spec'd triangle, using closed-form inverses where known.
    pub fn from_spec(base: ClassicalSpace, spec: &MatrixSpec) -> Result<Self> {
        check_base(base)?;
        let matrix = Triangle::new(build_matrix::<S>(spec)?)?;
        let closed = match spec.builtin_name() {
            Some(BuiltinName::Omega) => Some(BuiltinName::OmegaInv),
            Some(BuiltinName::OmegaInv) => Some(BuiltinName::Omega),
            Some(BuiltinName::Gamma) => Some(BuiltinName::GammaInv),
            Some(BuiltinName::GammaInv) => Some(BuiltinName::Gamma),
            Some(BuiltinName::Identity) => Some(BuiltinName::Identity),
            _ => None,
        };
        let inverse = match closed {
            Some(name) => Triangle::new(builtin::<S>(name, None, None)?)?,
            None => invert_triangle(&matrix),
        };
        Ok(DomainSpace { base, matrix, inverse, mode: TransformMode::Linear, spec: Some(spec.clone()) })
    }

    pub fn from_space_id(id: &SpaceId) -> Result<Self> {
        match id {
            SpaceId::Domain { base, matrix } => DomainSpace::from_spec(*base, matrix),
            SpaceId::Classical(c) => Err(Error::UnsupportedSpace(format!("{c} is not a matrix domain"))),
        }
    }

    pub fn omega(base: ClassicalSpace) -> Result<Self> {
        DomainSpace::from_spec(base, &MatrixSpec::builtin(BuiltinName::Omega))
    }

    pub fn gamma(base: ClassicalSpace) -> Result<Self> {
        DomainSpace::from_spec(base, &MatrixSpec::builtin(BuiltinName::Gamma))
    }

    pub fn with_mode(mut self, mode: TransformMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_base(mut self, base: ClassicalSpace) -> Result<Self> {
        check_base(base)?;
        self.base = base;
        Ok(self)
    }

    pub fn builtin_name(&self) -> Option<BuiltinName> {
        self.spec.as_ref().and_then(MatrixSpec::builtin_name)
    }

    pub fn label(&self) -> String {
        match &self.spec {
            Some(spec) => format!("{}({})", self.base, spec),
            None => format!("{}({})", self.base, self.matrix.name()),
        }
    }

    /// `(T x)_n` for `n <= N`, or the absolute-value variant.
    pub fn transform(&self, x: &Sequence<S>, n: usize) -> Result<FiniteVector<S>> {
        match self.mode {
            TransformMode::Linear => apply(self.matrix.matrix(), x, n),
            TransformMode::Absolute => {
                if n == 0 {
                    return Err(Error::EmptyTruncation);
                }
                let values = (1..=n)
                    .map(|i| {
                        let row = self.matrix.row(i, i)?;
                        Ok(S::sum_iter(row.iter().map(|(k, v)| (v.clone() * x.entry(k)).abs())))
                    })
                    .collect::<Result<Vec<S>>>()?;
                FiniteVector::new(format!("|{}| * {}", self.matrix.name(), x.label()), values)
            }
        }
    }

    pub fn domain_membership(&self, x: &Sequence<S>, n: usize, tol: f64, window: Option<usize>) -> Result<Membership> {
        let window = window.unwrap_or_else(|| default_window(n));
        if n <= window {
            return Err(Error::TruncationTooSmall { n, required: window + 1 });
        }
        let tx = self.transform(x, n)?.to_f64();
        classify_vector(&tx, self.base, tol, window)
    }

    /// `max_{n<=N} |(T x)_n|`, a lower bound for the norm.
    pub fn domain_norm(&self, x: &Sequence<S>, n: usize) -> Result<DomainNorm<S>> {
        let tx = self.transform(x, n)?;
        Ok(DomainNorm::from_values(&tx.entries))
    }

    pub fn phi_forward(&self, x: &Sequence<S>, n: usize) -> Result<FiniteVector<S>> {
        self.linear_only("phi_forward")?;
        apply(self.matrix.matrix(), x, n)
    }

    pub fn phi_inverse(&self, y: &Sequence<S>, n: usize) -> Result<FiniteVector<S>> {
        self.linear_only("phi_inverse")?;
        apply(self.inverse.matrix(), y, n)
    }

    fn linear_only(&self, what: &str) -> Result<()> {
        match self.mode {
            TransformMode::Linear => Ok(()),
            TransformMode::Absolute => Err(Error::Mode { mode: "absolute".into(), what: what.into() }),
        }
    }

    /// `b^(k)`: column `k` of `T^{-1}`, so `T b^(k) = e^(k)`.
    pub fn basis_element(&self, k: usize) -> Result<BasisElement<S>> {
        if k == 0 {
            return Err(Error::param("k", "basis index is 1-based"));
        }
        self.inverse.entry(k, k)?;
        let inv = self.inverse.matrix().clone();
        let mut values =
            Sequence::from_fn(format!("b^({k})"), move |n| inv.entry(n, k).unwrap_or_else(|_| S::zero()));
        if let Some(l) = self.inverse.shape().lower {
            values = values.with_support(k + l);
        }
        let displayed = match self.builtin_name() {
            Some(BuiltinName::Omega) => Some(DisplayedBasis {
                formula: "(-1)^(n-k) / k for n = k, k+1".into(),
                at_k: S::from_ratio(1, k as i64),
                at_next: S::from_ratio(-1, k as i64),
            }),
            Some(BuiltinName::Gamma) => Some(DisplayedBasis {
                formula: "(-1)^(n-k) k for n = k, k+1".into(),
                at_k: S::from_i64(k as i64),
                at_next: S::from_i64(-(k as i64)),
            }),
            _ => None,
        };
        Ok(BasisElement { k, values, displayed })
    }

    /// Partial expansion `P = sum_{k<=m} (T x)_k b^(k)` on the first `N`
    /// coordinates and the residual `‖x - P‖` at truncation `N`.
    pub fn basis_expand(&self, x: &Sequence<S>, n_terms: usize, n: usize) -> Result<BasisExpansion<S>> {
        self.linear_only("basis_expand")?;
        if n_terms > n {
            return Err(Error::param("n_terms", format!("must not exceed N = {n}")));
        }
        let coefficients = apply(self.matrix.matrix(), x, n)?.entries;
        let mut partial = vec![S::zero(); n];
        for (k, e_k) in coefficients.iter().take(n_terms).enumerate() {
            if e_k.is_zero() {
                continue;
            }
            let col = k + 1;
            let last = self.inverse.shape().lower.map_or(n, |l| (col + l).min(n));
            for (i, slot) in partial.iter_mut().enumerate().take(last).skip(col - 1) {
                *slot = slot.clone() + e_k.clone() * self.inverse.entry(i + 1, col)?;
            }
        }
        let xt = truncate(x, n)?.entries;
        let diff: Vec<S> = xt.iter().zip(&partial).map(|(a, b)| a.clone() - b.clone()).collect();
        let residual = self.domain_norm(&Sequence::from_values("x - P", diff), n)?;
        Ok(BasisExpansion {
            partial: FiniteVector::new("basis partial sum", partial)?,
            coefficients: coefficients.into_iter().take(n_terms).collect(),
            residual_norm: residual.value,
        })
    }

    /// Lower-triangular prefix sums `p_j(m) = sum_{k<=min(m,j)} t_jk x_k`.
    fn prefix_rows(&self, x: &Sequence<S>, n: usize) -> Result<Vec<Vec<f64>>> {
        let xs = truncate(x, n)?.entries;
        (1..=n)
            .map(|j| {
                let row = self.matrix.row(j, j)?;
                let mut acc = S::zero();
                let mut out = Vec::with_capacity(j);
                for m in 1..=j {
                    let term = row.get(m) * xs[m - 1].clone();
                    acc = acc
                        + match self.mode {
                            TransformMode::Linear => term,
                            TransformMode::Absolute => term.abs(),
                        };
                    out.push(acc.to_f64());
                }
                Ok(out)
            })
            .collect()
    }

    /// Checks `‖x^[m]‖ >= ‖x^[n]‖` for `n < m <= N`.
    pub fn monotone_norm_probe(&self, x: &Sequence<S>, n: usize) -> Result<MonotoneReport> {
        if n < 2 {
            return Err(Error::TruncationTooSmall { n, required: 2 });
        }
        let prefix = self.prefix_rows(x, n)?;
        let mut norms = vec![0.0f64; n];
        for (j, p) in prefix.iter().enumerate() {
            for (m, slot) in norms.iter_mut().enumerate() {
                let v = p[m.min(j)].abs();
                if v > *slot {
                    *slot = v;
                }
            }
        }
        let mut witness = None;
        let mut best = (0usize, f64::NEG_INFINITY);
        for (m, v) in norms.iter().enumerate() {
            if *v < best.1 - 1e-12 * best.1.abs().max(1.0) {
                witness = Some((best.0 + 1, m + 1));
                break;
            }
            if *v > best.1 {
                best = (m, *v);
            }
        }
        let full = DomainNorm::from_values(&self.transform(x, n)?.entries).value.to_f64();
        let consistent = (norms[n - 1] - full).abs() <= 1e-12 * full.abs().max(1.0);
        let verdict = if witness.is_some() || !consistent { Verdict::Violated } else { Verdict::Satisfied };
        Ok(MonotoneReport { verdict, witness, section_norms: norms, truncation_limited: true })
    }

    /// AK probe: `‖x - x^[n]‖ -> 0`, for `x` in the null domain.
    ///
    /// Tails `max_{n<j<=N} |sum_{n<k<=j} t_jk x_k|` are computed for
    /// `n <= N/2` and passed to limit detection.
    pub fn ak_probe(&self, x: &Sequence<S>, n: usize, tol: f64, window: Option<usize>) -> Result<AkReport> {
        let window = window.unwrap_or_else(|| default_window(n));
        let null = self.clone().with_base(ClassicalSpace::C0)?;
        let membership = null.domain_membership(x, n, tol, Some(window))?;
        if membership.verdict == Verdict::Violated {
            return Err(Error::Precondition(format!(
                "x is not in the null domain {}: {}",
                null.label(),
                membership.note
            )));
        }
        let prefix = self.prefix_rows(x, n)?;
        let half = n / 2;
        let tails: Vec<f64> = (0..half)
            .map(|sec| {
                prefix
                    .iter()
                    .enumerate()
                    .skip(sec + 1)
                    .map(|(_, p)| (p[p.len() - 1] - p[sec]).abs())
                    .fold(0.0f64, f64::max)
            })
            .collect();
        let w = scaled_window(window, n, tails.len());
        let limit = detect_limit(&tails, tol, w)?;
        let verdict = match limit.kind {
            crate::limit::LimitKind::ConvergesTo(_) if limit.settles_at(0.0, tol) == Some(true) => Verdict::Satisfied,
            crate::limit::LimitKind::ConvergesTo(_) if limit.settles_at(0.0, tol).is_none() => Verdict::Inconclusive,
            crate::limit::LimitKind::Inconclusive => Verdict::Inconclusive,
            _ if membership.verdict == Verdict::Inconclusive => Verdict::Inconclusive,
            _ => Verdict::Violated,
        };
        let verdict = verdict.and(if membership.verdict == Verdict::Inconclusive {
            Verdict::Inconclusive
        } else {
            Verdict::Satisfied
        });
        Ok(AkReport { verdict, membership, section_tails: tails, limit })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainNorm<S> {
    pub value: S,
    /// 1-based index attaining the maximum.
    pub argmax: usize,
    /// Running-sup trend over the truncation when it is long enough to judge.
    pub trend: Option<SupTrend>,
}

impl<S: Scalar> DomainNorm<S> {
    fn from_values(values: &[S]) -> Self {
        let mut best = S::zero();
        let mut argmax = 1;
        for (i, v) in values.iter().enumerate() {
            let a = v.abs();
            if a > best {
                best = a;
                argmax = i + 1;
            }
        }
        let f: Vec<f64> = values.iter().map(Scalar::to_f64).collect();
        let w = default_window(f.len());
        let trend = (f.len() > w).then(|| analyze_sup(&f, 1e-9, w).map(|a| a.trend).ok()).flatten();
        DomainNorm { value: best, argmax, trend }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisplayedBasis<S> {
    pub formula: String,
    pub at_k: S,
    pub at_next: S,
}

#[derive(Debug, Clone)]
pub struct BasisElement<S> {
    pub k: usize,
    pub values: Sequence<S>,
    /// The closed form printed for the Ω / Γ bases, kept for comparison.
    pub displayed: Option<DisplayedBasis<S>>,
}

impl<S: Scalar> BasisElement<S> {
    /// `(n, value)` for the nonzero entries among the first `n` coordinates.
    pub fn nonzeros(&self, n: usize) -> Vec<(usize, S)> {
        let end = self.values.support_hint().map_or(n, |m| m.min(n));
        (1..=end).map(|i| (i, self.values.entry(i))).filter(|(_, v)| !v.is_zero()).collect()
    }

    /// Inverse-column value minus displayed value at `n = k + 1`.
    pub fn displayed_delta(&self) -> Option<S> {
        self.displayed.as_ref().map(|d| self.values.entry(self.k + 1) - d.at_next.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisExpansion<S> {
    pub partial: FiniteVector<S>,
    pub coefficients: Vec<S>,
    pub residual_norm: S,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneReport {
    pub verdict: Verdict,
    /// `(n, m)` with `n < m` and `‖x^[m]‖ < ‖x^[n]‖`.
    pub witness: Option<(usize, usize)>,
    pub section_norms: Vec<f64>,
    pub truncation_limited: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AkReport {
    pub verdict: Verdict,
    pub membership: Membership,
    pub section_tails: Vec<f64>,
    pub limit: LimitVerdict,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::InfMatrix;
    use crate::seq::make_sequence;
    use num_rational::BigRational;

    fn seq(s: &str) -> Sequence<f64> {
        make_sequence(&s.parse().unwrap()).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn membership_examples() {
        let c = DomainSpace::<f64>::omega(ClassicalSpace::C).unwrap();
        assert_eq!(c.domain_membership(&seq("unit:1"), 200, 1e-9, None).unwrap().verdict, Verdict::Satisfied);
        let linf = DomainSpace::<f64>::omega(ClassicalSpace::LInf).unwrap();
        // oracle: Omega x for x_k = 1/k^2 is H_n
        let x = seq("power:-2");
        let tx = linf.transform(&x, 10_000).unwrap().entries;
        let h: f64 = (1..=10_000).map(|k| 1.0 / k as f64).sum();
        assert!((tx[9999] - h).abs() < 1e-9);
        assert_eq!(linf.domain_membership(&x, 10_000, 1e-9, None).unwrap().verdict, Verdict::Violated);
        let alt = seq("altpower:-1");
        let tx = linf.transform(&alt, 50).unwrap().entries;
        assert!(tx.iter().all(|v| v.abs() < 1e-12 || (v + 1.0).abs() < 1e-12));
        assert_eq!(linf.domain_membership(&alt, 200, 1e-9, None).unwrap().verdict, Verdict::Satisfied);
    }

    #[test]
    fn norm_examples() {
        let o = DomainSpace::<f64>::omega(ClassicalSpace::LInf).unwrap();
        let g = DomainSpace::<f64>::gamma(ClassicalSpace::LInf).unwrap();
        assert_eq!(o.domain_norm(&seq("unit:1"), 50).unwrap().value, 1.0);
        assert_eq!(o.domain_norm(&seq("unit:2"), 50).unwrap().value, 2.0);
        assert_eq!(g.domain_norm(&seq("unit:2"), 50).unwrap().value, 0.5);
    }

    #[test]
    fn isomorphism_examples() {
        let o = DomainSpace::<BigRational>::omega(ClassicalSpace::C0).unwrap();
        let y = Sequence::constant(BigRational::from_i64(1));
        assert_eq!(o.phi_inverse(&y, 3).unwrap().entries, vec![q(1, 1), q(0, 1), q(0, 1)]);
        let x = Sequence::from_values("x", vec![q(1, 1), q(2, 1), q(3, 1)]);
        let fwd = o.phi_forward(&x, 5).unwrap();
        let back = o.phi_inverse(&fwd.to_sequence(), 5).unwrap();
        assert_eq!(back.entries, vec![q(1, 1), q(2, 1), q(3, 1), q(0, 1), q(0, 1)]);
        let g = DomainSpace::<BigRational>::gamma(ClassicalSpace::C0).unwrap();
        assert_eq!(g.phi_forward(&Sequence::unit(3), 4).unwrap().entries, vec![q(0, 1), q(0, 1), q(1, 3), q(1, 3)]);
    }

    #[test]
    fn basis_elements_are_inverse_columns() {
        let o = DomainSpace::<BigRational>::omega(ClassicalSpace::C0).unwrap();
        let b = o.basis_element(2).unwrap();
        assert_eq!(b.nonzeros(10), vec![(2, q(1, 2)), (3, q(-1, 3))]);
        // displayed closed form has -1/2 at n = 3
        assert_eq!(b.displayed_delta(), Some(q(-1, 3) - q(-1, 2)));
        let g = DomainSpace::<BigRational>::gamma(ClassicalSpace::C0).unwrap();
        assert_eq!(g.basis_element(1).unwrap().nonzeros(10), vec![(1, q(1, 1)), (2, q(-2, 1))]);
        let id = DomainSpace::<BigRational>::from_spec(ClassicalSpace::C0, &"identity".parse().unwrap()).unwrap();
        assert_eq!(id.basis_element(3).unwrap().nonzeros(10), vec![(3, q(1, 1))]);
        for k in 1..=30 {
            for space in [&o, &g] {
                let e = space.basis_element(k).unwrap();
                let image = apply(space.matrix.matrix(), &e.values, 60).unwrap();
                assert_eq!(image.entries, truncate(&Sequence::unit(k), 60).unwrap().entries);
            }
        }
    }

    #[test]
    fn full_expansion_is_exact() {
        let o = DomainSpace::<BigRational>::omega(ClassicalSpace::C0).unwrap();
        let x = Sequence::from_values("x", vec![q(3, 1), q(-1, 2), q(0, 1), q(5, 7)]);
        let e = o.basis_expand(&x, 12, 12).unwrap();
        assert!(e.residual_norm.is_zero());
        assert_eq!(e.partial.entries[..4], truncate(&x, 4).unwrap().entries[..]);
        let zero = o.basis_expand(&Sequence::zero(), 3, 12).unwrap();
        assert!(zero.residual_norm.is_zero());
    }

    #[test]
    fn expansion_residual_is_tail_sup_of_transform() {
        // x_k = 2^-k / k has Omega x = 1 - 2^-n, so the 20-term residual is
        // sup_{n>20} (1 - 2^-n), close to 1; x is not in the null domain.
        let o = DomainSpace::<f64>::omega(ClassicalSpace::C0).unwrap();
        let x = Sequence::from_fn("2^-k/k", |k| 0.5f64.powi(k as i32) / k as f64);
        let e = o.basis_expand(&x, 20, 200).unwrap();
        assert!((e.residual_norm - 1.0).abs() < 1e-12);
        // with x = Omega^{-1}(2^-n) the residual is the tail sup 2^-21
        let y = Sequence::from_fn("2^-n", |n| 0.5f64.powi(n as i32));
        let x = Sequence::from_values("x", o.phi_inverse(&y, 200).unwrap().entries);
        let e = o.basis_expand(&x, 20, 200).unwrap();
        assert!(e.residual_norm <= 2.0 * 0.5f64.powi(20));
        assert!((e.residual_norm - 0.5f64.powi(21)).abs() < 1e-15);
    }

    #[test]
    fn monotone_norm_examples() {
        let o = DomainSpace::<f64>::omega(ClassicalSpace::LInf).unwrap();
        let ones = o.monotone_norm_probe(&seq("ones"), 50).unwrap();
        assert_eq!(ones.verdict, Verdict::Satisfied);
        assert_eq!(ones.section_norms[49], 1275.0);
        for d in [o.clone(), DomainSpace::<f64>::gamma(ClassicalSpace::LInf).unwrap()] {
            assert_eq!(d.monotone_norm_probe(&seq("unit:1"), 50).unwrap().verdict, Verdict::Satisfied);
        }
        // regression snapshot: section norms of (-1)^k / k are all 1
        let alt = o.monotone_norm_probe(&seq("altpower:-1"), 50).unwrap();
        assert_eq!(alt.verdict, Verdict::Satisfied);
        assert!(alt.section_norms.iter().all(|v| *v == 1.0));
    }

    #[test]
    fn monotone_norm_violation_has_witness() {
        // t_nn = 1, t_n,n-1 = 10 and x = (1, -10): T x^[1] = (1, 10, 0, ..)
        // has norm 10 but T x = (1, 0, -100, ..) truncated at N = 2 has norm 1.
        let t = Triangle::new(InfMatrix::<f64>::from_fn(
            "t",
            "",
            crate::matrix::Shape::lower_band(1),
            |n, k| if n == k { 1.0 } else { 10.0 },
        ))
        .unwrap();
        let d = DomainSpace::new(ClassicalSpace::LInf, t).unwrap();
        let x = Sequence::from_values("x", vec![1.0, -10.0]);
        let r = d.monotone_norm_probe(&x, 2).unwrap();
        assert_eq!(r.section_norms, vec![10.0, 1.0]);
        assert_eq!(r.verdict, Verdict::Violated);
        assert_eq!(r.witness, Some((1, 2)));
    }

    #[test]
    fn ak_examples() {
        let o = DomainSpace::<f64>::omega(ClassicalSpace::C0).unwrap();
        // sum k x_k = 0, so Omega x = (1, -3, 0, 0, ..) is null
        let fin = Sequence::from_values("x", vec![1.0, -2.0, 1.0]);
        let r = o.ak_probe(&fin, 200, 1e-9, None).unwrap();
        assert_eq!(r.verdict, Verdict::Satisfied);
        assert!(r.section_tails[3..].iter().all(|t| *t == 0.0));
        let y = Sequence::from_fn("2^-n", |n| 0.5f64.powi(n as i32));
        let x = Sequence::from_values("x", o.phi_inverse(&y, 400).unwrap().entries);
        assert_eq!(o.ak_probe(&x, 200, 1e-9, None).unwrap().verdict, Verdict::Satisfied);
        let geo = Sequence::from_fn("2^-k/k", |k| 0.5f64.powi(k as i32) / k as f64);
        assert!(matches!(o.ak_probe(&geo, 200, 1e-9, None), Err(Error::Precondition(_))));
        let unbalanced = Sequence::from_values("x", vec![1.0, -2.0, 0.5]);
        assert!(matches!(o.ak_probe(&unbalanced, 200, 1e-9, None), Err(Error::Precondition(_))));
        assert!(matches!(o.ak_probe(&seq("power:-2"), 2000, 1e-3, None), Err(Error::Precondition(_))));
    }

    #[test]
    fn absolute_mode_is_opt_in() {
        let o = DomainSpace::<f64>::omega(ClassicalSpace::C0).unwrap().with_mode(TransformMode::Absolute);
        let t = o.transform(&seq("altpower:-1"), 4).unwrap().entries;
        assert_eq!(t, vec![1.0, 2.0, 3.0, 4.0]);
        assert!(matches!(o.phi_inverse(&seq("ones"), 3), Err(Error::Mode { .. })));
    }

    #[test]
    fn bad_base_rejected() {
        assert!(DomainSpace::<f64>::omega(ClassicalSpace::BS).is_err());
    }
}
