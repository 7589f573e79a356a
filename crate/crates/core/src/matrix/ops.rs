//! Computed matrices: triangle inverses, products, row-wise maps and
//! weighted cumulative row sums. Each memoizes its rows.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, RwLock};

use super::{default_cutoff, InfMatrix, Kernel, Row, Shape, Triangle, SERIES_TOL};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

type RowCache<S> = RwLock<BTreeMap<usize, (usize, Arc<Row<S>>)>>;

fn cached<S: Scalar>(
    cache: &RowCache<S>,
    n: usize,
    cutoff: usize,
    compute: impl FnOnce() -> Result<Row<S>>,
) -> Result<Arc<Row<S>>> {
    if let Some((c, row)) = cache.read().expect("row cache poisoned").get(&n) {
        if row.complete || *c == cutoff {
            return Ok(row.clone());
        }
    }
    let row = Arc::new(compute()?);
    cache.write().expect("row cache poisoned").insert(n, (cutoff, row.clone()));
    Ok(row)
}

struct InverseKernel<S> {
    t: InfMatrix<S>,
    cache: RowCache<S>,
}

impl<S: Scalar> InverseKernel<S> {
    /// Row `n` of `T^{-1}`: `s_nn = 1/t_nn`, then for `k = n-1, ..., 1`
    /// `s_nk = -(sum_{k<j<=n} s_nj t_jk) / t_kk`. Rows are independent, so
    /// they can be evaluated in any order and in parallel.
    fn compute(&self, n: usize) -> Result<Row<S>> {
        let lower = self.t.shape().lower;
        let rows: Vec<Row<S>> = (1..=n).map(|j| self.t.row(j, j)).collect::<Result<_>>()?;
        let diag = |k: usize| -> Result<S> {
            let d = rows[k - 1].get(k);
            if d.is_zero() {
                Err(Error::ZeroDiagonal { row: k })
            } else {
                Ok(d)
            }
        };
        for k in 1..=n {
            diag(k)?;
        }
        let mut s = vec![S::zero(); n + 1];
        s[n] = diag(n)?.recip();
        for k in (1..n).rev() {
            let last = lower.map_or(n, |l| (k + l).min(n));
            let acc = S::sum_iter((k + 1..=last).map(|j| s[j].clone() * rows[j - 1].get(k)));
            s[k] = -(acc / diag(k)?);
        }
        s.remove(0);
        Ok(Row { start: 1, values: s, complete: true, tail_mass: None })
    }
}

impl<S: Scalar> Kernel<S> for InverseKernel<S> {
    fn shape(&self) -> Shape {
        if self.t.shape().lower == Some(0) {
            Shape::lower_band(0)
        } else {
            Shape::LOWER
        }
    }

    fn entry(&self, n: usize, k: usize) -> Result<S> {
        Ok(self.row(n, n)?.get(k))
    }

    fn row(&self, n: usize, cutoff: usize) -> Result<Row<S>> {
        let row = cached(&self.cache, n, cutoff, || self.compute(n))?;
        if self.t.shape().lower == Some(0) {
            return Ok(Row { start: n, values: vec![row.get(n)], complete: true, tail_mass: None });
        }
        Ok((*row).clone())
    }
}

/// The inverse triangle `S` with `T S = S T = I`.
///
/// Zero diagonals surface as [`Error::ZeroDiagonal`] when a row that needs
/// them is evaluated.
pub fn invert_triangle<S: Scalar>(t: &Triangle<S>) -> Triangle<S> {
    let m = InfMatrix::new(
        format!("inv({})", t.name()),
        format!("({})^-1", t.formula()),
        InverseKernel { t: t.matrix().clone(), cache: RwLock::new(BTreeMap::new()) },
    );
    Triangle::new(m).expect("inverse of a triangle is lower triangular")
}

struct ProductKernel<S> {
    a: InfMatrix<S>,
    b: InfMatrix<S>,
    cache: RowCache<S>,
}

impl<S: Scalar> ProductKernel<S> {
    fn compute(&self, n: usize, cutoff: usize) -> Result<Row<S>> {
        let ra = self.a.row(n, cutoff)?;
        let mut parts = Vec::new();
        for (j, a_nj) in ra.iter() {
            if a_nj.is_zero() {
                continue;
            }
            let rb = self.b.row(j, cutoff)?;
            if !rb.values.is_empty() {
                parts.push((j, a_nj.clone(), rb));
            }
        }
        if parts.is_empty() {
            return Ok(Row { complete: ra.effectively_complete(), ..Row::empty() });
        }
        let start = parts.iter().map(|p| p.2.start).min().unwrap();
        let end = parts.iter().map(|p| p.2.end()).max().unwrap();
        let width = end - start + 1;
        let mut acc = vec![S::zero(); width];
        let mut head: Option<Vec<S>> = None;
        let series = !ra.effectively_complete();
        let split = ra.start + ra.values.len() * 3 / 4;
        for (j, a_nj, rb) in &parts {
            if series && head.is_none() && *j >= split {
                head = Some(acc.clone());
            }
            for (k, v) in rb.iter() {
                let slot = &mut acc[k - start];
                *slot = slot.clone() + a_nj.clone() * v.clone();
            }
        }
        if series {
            // keep the prefix of columns whose series settled; the rest is tail
            let head = head.unwrap_or_else(|| acc.clone());
            let settled = head
                .iter()
                .zip(&acc)
                .position(|(h, full)| {
                    (full.clone() - h.clone()).to_f64().abs() > SERIES_TOL * full.to_f64().abs().max(1.0)
                })
                .unwrap_or(acc.len());
            if settled == 0 {
                return Err(Error::InconclusiveEntry { row: n, col: start, cutoff });
            }
            acc.truncate(settled);
        }
        let complete = !series && parts.iter().all(|p| p.2.complete);
        Ok(Row { start, values: acc, complete, tail_mass: None })
    }
}

impl<S: Scalar> Kernel<S> for ProductKernel<S> {
    fn shape(&self) -> Shape {
        Shape::product(self.a.shape(), self.b.shape())
    }

    fn entry(&self, n: usize, k: usize) -> Result<S> {
        let cutoff = default_cutoff(n.max(k));
        let row = self.row(n, cutoff)?;
        if !row.complete && k > row.end() {
            return Err(Error::InconclusiveEntry { row: n, col: k, cutoff });
        }
        Ok(row.get(k))
    }

    fn row(&self, n: usize, cutoff: usize) -> Result<Row<S>> {
        Ok((*cached(&self.cache, n, cutoff, || self.compute(n, cutoff))?).clone())
    }
}

/// The product `A B`, `(AB)_nk = sum_j a_nj b_jk`.
///
/// Sums over infinitely many `j` are cut at the row cutoff. A column is kept
/// when the last quarter of the terms moved it negligibly; the row is cut at
/// the first column that did not settle, and [`Error::InconclusiveEntry`] is
/// reported when none did.
pub fn compose<S: Scalar>(a: &InfMatrix<S>, b: &InfMatrix<S>) -> InfMatrix<S> {
    InfMatrix::new(
        format!("{}*{}", a.name(), b.name()),
        format!("sum_j [{}]_nj [{}]_jk", a.formula(), b.formula()),
        ProductKernel { a: a.clone(), b: b.clone(), cache: RwLock::new(BTreeMap::new()) },
    )
}

type RowFn<S> = Arc<dyn Fn(usize, &Row<S>) -> Row<S> + Send + Sync>;

struct RowMapKernel<S> {
    a: InfMatrix<S>,
    shape: Shape,
    f: RowFn<S>,
    cache: RowCache<S>,
}

impl<S: Scalar> Kernel<S> for RowMapKernel<S> {
    fn shape(&self) -> Shape {
        self.shape
    }

    fn entry(&self, n: usize, k: usize) -> Result<S> {
        Ok(self.row(n, default_cutoff(n.max(k) + 1))?.get(k))
    }

    fn row(&self, n: usize, cutoff: usize) -> Result<Row<S>> {
        let row = cached(&self.cache, n, cutoff, || {
            let src = self.a.row(n, cutoff)?;
            Ok((self.f)(n, &src))
        })?;
        Ok((*row).clone())
    }
}

/// A matrix whose row `n` is `f(n, row_n(A))`; `shape` must cover the result.
pub fn row_map<S: Scalar>(
    a: &InfMatrix<S>,
    name: impl Into<String>,
    formula: impl Into<String>,
    shape: Shape,
    f: impl Fn(usize, &Row<S>) -> Row<S> + Send + Sync + 'static,
) -> InfMatrix<S> {
    InfMatrix::new(
        name,
        formula,
        RowMapKernel { a: a.clone(), shape, f: Arc::new(f), cache: RwLock::new(BTreeMap::new()) },
    )
}

/// Weights `w_j` for `row_n = sum_{j<=n} w_j row_j(A)`, optionally divided by
/// `W_n = sum_{j<=n} w_j`.
#[derive(Clone)]
pub struct CumulativeWeights<S> {
    pub weight: Arc<dyn Fn(usize) -> S + Send + Sync>,
    pub normalize: bool,
}

struct CumState<S> {
    cutoff: usize,
    acc: Vec<S>,
    total: S,
    rows: Vec<Arc<Row<S>>>,
    any_incomplete: bool,
}

struct CumulativeKernel<S> {
    a: InfMatrix<S>,
    weights: CumulativeWeights<S>,
    state: Mutex<CumState<S>>,
}

impl<S: Scalar> CumulativeKernel<S> {
    fn advance(&self, st: &mut CumState<S>) -> Result<()> {
        let j = st.rows.len() + 1;
        let w = (self.weights.weight)(j);
        let src = self.a.row(j, st.cutoff)?;
        if !src.effectively_complete() {
            st.any_incomplete = true;
        }
        if !src.values.is_empty() && src.end() > st.acc.len() {
            st.acc.resize(src.end(), S::zero());
        }
        if !w.is_zero() {
            for (k, v) in src.iter() {
                let slot = &mut st.acc[k - 1];
                *slot = slot.clone() + w.clone() * v.clone();
            }
        }
        st.total = st.total.clone() + w;
        let values = if self.weights.normalize {
            st.acc.iter().map(|v| v.clone() / st.total.clone()).collect()
        } else {
            st.acc.clone()
        };
        st.rows.push(Arc::new(Row { start: 1, values, complete: !st.any_incomplete, tail_mass: None }));
        Ok(())
    }
}

impl<S: Scalar> Kernel<S> for CumulativeKernel<S> {
    fn shape(&self) -> Shape {
        let s = self.a.shape();
        Shape { upper: s.upper, lower: None, rows: None, cols: s.cols }
    }

    fn entry(&self, n: usize, k: usize) -> Result<S> {
        Ok(self.row(n, default_cutoff(n.max(k)))?.get(k))
    }

    fn row(&self, n: usize, cutoff: usize) -> Result<Row<S>> {
        let mut st = self.state.lock().expect("cumulative state poisoned");
        if st.any_incomplete && st.cutoff != cutoff || st.rows.is_empty() {
            *st = CumState { cutoff, acc: Vec::new(), total: S::zero(), rows: Vec::new(), any_incomplete: false };
        }
        while st.rows.len() < n {
            self.advance(&mut st)?;
        }
        Ok((*st.rows[n - 1]).clone())
    }
}

/// `row_n = sum_{j<=n} w_j row_j(A)` (divided by `W_n` when normalized),
/// built with a running sum so `N` rows cost one pass over `A`.
pub fn cumulative<S: Scalar>(
    a: &InfMatrix<S>,
    name: impl Into<String>,
    formula: impl Into<String>,
    weights: CumulativeWeights<S>,
) -> InfMatrix<S> {
    let state = CumState { cutoff: 0, acc: Vec::new(), total: S::zero(), rows: Vec::new(), any_incomplete: false };
    InfMatrix::new(name, formula, CumulativeKernel { a: a.clone(), weights, state: Mutex::new(state) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{builtin, truncate_matrix, BuiltinName};
    use num_rational::BigRational;

    fn exact(name: BuiltinName) -> InfMatrix<BigRational> {
        builtin(name, None, None).unwrap()
    }

    #[test]
    fn inverse_of_identity() {
        let i = Triangle::new(InfMatrix::<BigRational>::identity()).unwrap();
        assert!(truncate_matrix(&invert_triangle(&i), 10).unwrap().is_identity());
    }

    #[test]
    fn computed_inverses_match_closed_forms() {
        for (m, inv) in [(BuiltinName::Omega, BuiltinName::OmegaInv), (BuiltinName::Gamma, BuiltinName::GammaInv)] {
            let s = invert_triangle(&Triangle::new(exact(m)).unwrap());
            let closed = exact(inv);
            for n in 1..=50 {
                for k in 1..=50 {
                    assert_eq!(s.entry(n, k).unwrap(), closed.entry(n, k).unwrap(), "{m} ({n},{k})");
                }
            }
        }
        let g = invert_triangle(&Triangle::new(exact(BuiltinName::Gamma)).unwrap());
        assert_eq!(g.entry(4, 3).unwrap(), BigRational::from_i64(-4));
    }

    #[test]
    fn zero_diagonal_names_row() {
        let t = Triangle::new(InfMatrix::<f64>::from_fn("z3", "", Shape::LOWER, |n, k| {
            if n == 3 && k == 3 {
                0.0
            } else {
                1.0
            }
        }))
        .unwrap();
        let s = invert_triangle(&t);
        assert!(s.entry(2, 1).is_ok());
        assert_eq!(s.entry(4, 1), Err(Error::ZeroDiagonal { row: 3 }));
    }

    #[test]
    fn products_with_inverse_are_identity() {
        let p = compose(&exact(BuiltinName::Omega), &exact(BuiltinName::OmegaInv));
        assert!(truncate_matrix(&p, 20).unwrap().is_identity());
        let q = compose(&exact(BuiltinName::Gamma), &exact(BuiltinName::GammaInv));
        assert_eq!(q.entry(5, 5).unwrap(), BigRational::from_i64(1));
    }

    #[test]
    fn identity_is_neutral() {
        let g = exact(BuiltinName::Gamma);
        let p = compose(&InfMatrix::identity(), &g);
        for n in 1..=30 {
            for k in 1..=30 {
                assert_eq!(p.entry(n, k).unwrap(), g.entry(n, k).unwrap());
            }
        }
    }

    #[test]
    fn triangle_products_stay_triangular() {
        let p = compose(&exact(BuiltinName::Omega), &exact(BuiltinName::Cesaro));
        assert!(p.is_lower_triangular());
        for n in 1..=50 {
            for k in n + 1..=50 {
                assert!(p.entry(n, k).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn cumulative_matches_product() {
        // sum_{j<=n} j a_jk is Omega * A
        let a = exact(BuiltinName::Cesaro);
        let omega = exact(BuiltinName::Omega);
        let w = CumulativeWeights { weight: Arc::new(|j| BigRational::from_i64(j as i64)), normalize: false };
        let e = cumulative(&a, "E", "", w);
        let p = compose(&omega, &a);
        assert_eq!(truncate_matrix(&e, 15).unwrap(), truncate_matrix(&p, 15).unwrap());
    }

    #[test]
    fn infinite_inner_sum_is_checked() {
        let taylor: InfMatrix<f64> = builtin(BuiltinName::Taylor, Some(0.5), None).unwrap();
        let ta = compose(&taylor, &builtin(BuiltinName::Cesaro, None, None).unwrap());
        assert!(ta.row(3, 400).is_ok());
        let flat = InfMatrix::<f64>::from_fn("flat", "1", Shape::DENSE, |_, _| 1.0);
        let tail_only = compose(&flat, &InfMatrix::identity()).row(1, 40).unwrap();
        assert!(!tail_only.complete && tail_only.end() < 40);
        let bad = compose(&flat, &builtin(BuiltinName::Cesaro, None, None).unwrap());
        assert!(matches!(bad.row(1, 40), Err(Error::InconclusiveEntry { row: 1, .. })));
    }
}
