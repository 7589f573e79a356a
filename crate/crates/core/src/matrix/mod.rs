//! Infinite matrices as entry oracles.
//!
//! An [`InfMatrix`] is a shared, immutable [`Kernel`] plus a name and a
//! human-readable formula. Kernels report a [`Shape`] so row evaluation only
//! touches the columns that can be nonzero; rows with infinitely many
//! nonzero entries are evaluated up to a caller-supplied cutoff and flagged
//! as incomplete.

mod builtin;
mod ops;
mod spec;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::{self, Strategy};
use crate::scalar::Scalar;
use crate::seq::{FiniteVector, Sequence};

pub use builtin::{builtin, BuiltinName};
pub use ops::{compose, cumulative, invert_triangle, row_map, CumulativeWeights};
pub use spec::{build_matrix, MatrixSpec};

/// Relative tolerance used to accept a truncated infinite series.
pub const SERIES_TOL: f64 = 1e-10;

/// Default row cutoff for infinite rows: `K_max = 4 N`.
pub fn default_cutoff(n: usize) -> usize {
    4 * n.max(1)
}

/// Sparsity pattern of an infinite matrix.
///
/// Entry `(n, k)` can only be nonzero when `n - lower <= k <= n + upper`,
/// `n <= rows` and `k <= cols`; `None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Shape {
    pub upper: Option<usize>,
    pub lower: Option<usize>,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BandwidthHint {
    LowerTriangular,
    Band(usize),
    Dense,
}

impl Shape {
    pub const LOWER: Shape = Shape { upper: Some(0), lower: None, rows: None, cols: None };
    pub const DENSE: Shape = Shape { upper: None, lower: None, rows: None, cols: None };
    pub const EMPTY: Shape = Shape { upper: Some(0), lower: Some(0), rows: Some(0), cols: Some(0) };

    /// Lower-triangular band with `lower` subdiagonals.
    pub fn lower_band(lower: usize) -> Shape {
        Shape { upper: Some(0), lower: Some(lower), rows: None, cols: None }
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.upper == Some(0)
    }

    pub fn hint(&self) -> BandwidthHint {
        match (self.upper, self.lower) {
            (Some(0), Some(l)) => BandwidthHint::Band(l),
            (Some(0), None) => BandwidthHint::LowerTriangular,
            (Some(u), Some(l)) => BandwidthHint::Band(u.max(l)),
            _ => BandwidthHint::Dense,
        }
    }

    pub fn contains(&self, n: usize, k: usize) -> bool {
        match self.row_range(n) {
            None => false,
            Some((lo, hi)) => k >= lo && hi.is_none_or(|h| k <= h),
        }
    }

    /// Columns of row `n` that may be nonzero: `(first, last)`, `last = None`
    /// for an infinite row. `None` when the row vanishes.
    pub fn row_range(&self, n: usize) -> Option<(usize, Option<usize>)> {
        if n == 0 || self.rows.is_some_and(|r| n > r) {
            return None;
        }
        let lo = self.lower.map_or(1, |l| n.saturating_sub(l).max(1));
        let hi = match (self.upper, self.cols) {
            (Some(u), Some(c)) => Some((n + u).min(c)),
            (Some(u), None) => Some(n + u),
            (None, Some(c)) => Some(c),
            (None, None) => None,
        };
        match hi {
            Some(h) if h < lo => None,
            _ => Some((lo, hi)),
        }
    }

    /// Rows of column `k` that may be nonzero.
    pub fn col_range(&self, k: usize) -> Option<(usize, Option<usize>)> {
        if k == 0 || self.cols.is_some_and(|c| k > c) {
            return None;
        }
        let lo = self.upper.map_or(1, |u| k.saturating_sub(u).max(1));
        let hi = match (self.lower, self.rows) {
            (Some(l), Some(r)) => Some((k + l).min(r)),
            (Some(l), None) => Some(k + l),
            (None, Some(r)) => Some(r),
            (None, None) => None,
        };
        match hi {
            Some(h) if h < lo => None,
            _ => Some((lo, hi)),
        }
    }

    /// Shape of the product `A B`.
    pub fn product(a: Shape, b: Shape) -> Shape {
        let add = |x: Option<usize>, y: Option<usize>| Some(x? + y?);
        Shape { upper: add(a.upper, b.upper), lower: add(a.lower, b.lower), rows: a.rows, cols: b.cols }
    }
}

/// One evaluated row: values for columns `start ..= start + values.len() - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row<S> {
    pub start: usize,
    pub values: Vec<S>,
    /// `false` when nonzero entries may exist past the last stored column.
    pub complete: bool,
    /// Upper bound on `sum |a_nk|` over the omitted columns, when known.
    pub tail_mass: Option<f64>,
}

impl<S: Scalar> Row<S> {
    pub fn empty() -> Self {
        Row { start: 1, values: Vec::new(), complete: true, tail_mass: None }
    }

    pub fn end(&self) -> usize {
        self.start + self.values.len().saturating_sub(1)
    }

    pub fn get(&self, k: usize) -> S {
        if k < self.start {
            return S::zero();
        }
        self.values.get(k - self.start).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &S)> {
        self.values.iter().enumerate().map(move |(i, v)| (self.start + i, v))
    }

    /// Past the cutoff the row is negligible: complete, or the tail bound is tiny.
    pub fn effectively_complete(&self) -> bool {
        self.complete || self.tail_mass.is_some_and(|m| m <= SERIES_TOL)
    }
}

/// Entry oracle behind an [`InfMatrix`].
pub trait Kernel<S: Scalar>: Send + Sync {
    fn shape(&self) -> Shape;

    /// Entry `(n, k)`, only called inside the shape's support.
    fn entry(&self, n: usize, k: usize) -> Result<S>;

    /// Row `n`, evaluating at most up to column `cutoff` when the row is infinite.
    fn row(&self, n: usize, cutoff: usize) -> Result<Row<S>> {
        default_row(self, n, cutoff)
    }

    /// Whether entries outside an explicitly given block were zero-filled.
    fn padded(&self) -> bool {
        false
    }
}

pub(crate) fn default_row<S: Scalar, K: Kernel<S> + ?Sized>(kernel: &K, n: usize, cutoff: usize) -> Result<Row<S>> {
    let Some((lo, hi)) = kernel.shape().row_range(n) else {
        return Ok(Row::empty());
    };
    let (end, complete) = match hi {
        Some(h) => (h, true),
        None => (cutoff.max(lo), false),
    };
    let values = (lo..=end).map(|k| kernel.entry(n, k)).collect::<Result<Vec<_>>>()?;
    Ok(Row { start: lo, values, complete, tail_mass: None })
}

struct FnKernel<S, F> {
    shape: Shape,
    f: F,
    _marker: std::marker::PhantomData<fn() -> S>,
}

impl<S: Scalar, F: Fn(usize, usize) -> S + Send + Sync> Kernel<S> for FnKernel<S, F> {
    fn shape(&self) -> Shape {
        self.shape
    }
    fn entry(&self, n: usize, k: usize) -> Result<S> {
        Ok((self.f)(n, k))
    }
}

/// Infinite matrix `A = (a_nk)`, `n, k >= 1`.
#[derive(Clone)]
pub struct InfMatrix<S> {
    kernel: Arc<dyn Kernel<S>>,
    name: Arc<str>,
    formula: Arc<str>,
}

impl<S: Scalar> InfMatrix<S> {
    pub fn new(name: impl Into<String>, formula: impl Into<String>, kernel: impl Kernel<S> + 'static) -> Self {
        InfMatrix { kernel: Arc::new(kernel), name: Arc::from(name.into()), formula: Arc::from(formula.into()) }
    }

    /// Closed-form matrix; `f` is only evaluated inside `shape`.
    pub fn from_fn(
        name: impl Into<String>,
        formula: impl Into<String>,
        shape: Shape,
        f: impl Fn(usize, usize) -> S + Send + Sync + 'static,
    ) -> Self {
        InfMatrix::new(name, formula, FnKernel { shape, f, _marker: std::marker::PhantomData })
    }

    pub fn zero() -> Self {
        InfMatrix::from_fn("zero", "a_nk = 0", Shape::EMPTY, |_, _| S::zero())
    }

    pub fn identity() -> Self {
        InfMatrix::from_fn("identity", "a_nk = [n = k]", Shape::lower_band(0), |_, _| S::one())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn formula(&self) -> &str {
        &self.formula
    }

    pub fn renamed(&self, name: impl Into<String>, formula: impl Into<String>) -> Self {
        InfMatrix { kernel: self.kernel.clone(), name: Arc::from(name.into()), formula: Arc::from(formula.into()) }
    }

    pub fn shape(&self) -> Shape {
        self.kernel.shape()
    }

    pub fn bandwidth_hint(&self) -> BandwidthHint {
        self.shape().hint()
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.shape().is_lower_triangular()
    }

    pub fn padded(&self) -> bool {
        self.kernel.padded()
    }

    pub fn entry(&self, n: usize, k: usize) -> Result<S> {
        if !self.shape().contains(n, k) {
            return Ok(S::zero());
        }
        self.kernel.entry(n, k)
    }

    pub fn row(&self, n: usize, cutoff: usize) -> Result<Row<S>> {
        self.kernel.row(n, cutoff)
    }
}

impl<S> fmt::Debug for InfMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InfMatrix").field("name", &self.name).field("formula", &self.formula).finish()
    }
}

/// Lower-triangular matrix with (lazily checked) nonzero diagonal.
#[derive(Clone, Debug)]
pub struct Triangle<S>(InfMatrix<S>);

impl<S: Scalar> Triangle<S> {
    pub fn new(m: InfMatrix<S>) -> Result<Self> {
        if !m.is_lower_triangular() {
            return Err(Error::NotTriangular(m.name().to_string()));
        }
        Ok(Triangle(m))
    }

    pub fn matrix(&self) -> &InfMatrix<S> {
        &self.0
    }

    pub fn into_matrix(self) -> InfMatrix<S> {
        self.0
    }

    pub fn diagonal(&self, n: usize) -> Result<S> {
        self.0.entry(n, n)
    }

    /// Confirm `t_kk != 0` for `k <= n`.
    pub fn check_diagonal(&self, n: usize) -> Result<()> {
        for k in 1..=n {
            if self.diagonal(k)?.is_zero() {
                return Err(Error::ZeroDiagonal { row: k });
            }
        }
        Ok(())
    }
}

impl<S> std::ops::Deref for Triangle<S> {
    type Target = InfMatrix<S>;
    fn deref(&self) -> &InfMatrix<S> {
        &self.0
    }
}

/// Leading `N x N` block of an infinite matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteMatrix<S> {
    pub size: usize,
    pub entries: Vec<Vec<S>>,
}

impl<S: Scalar> FiniteMatrix<S> {
    /// 1-based access.
    pub fn get(&self, n: usize, k: usize) -> &S {
        &self.entries[n - 1][k - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, row)| {
            row.iter().enumerate().all(|(j, v)| if i == j { *v == S::one() } else { v.is_zero() })
        })
    }

    pub fn max_deviation_from_identity(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, row) in self.entries.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v.to_f64() - target).abs());
            }
        }
        worst
    }

    pub fn to_f64(&self) -> FiniteMatrix<f64> {
        FiniteMatrix {
            size: self.size,
            entries: self.entries.iter().map(|r| r.iter().map(Scalar::to_f64).collect()).collect(),
        }
    }
}

/// The `N x N` leading block of `a`.
pub fn truncate_matrix<S: Scalar>(a: &InfMatrix<S>, n: usize) -> Result<FiniteMatrix<S>> {
    truncate_matrix_with(a, n, Strategy::default())
}

pub fn truncate_matrix_with<S: Scalar>(a: &InfMatrix<S>, n: usize, strategy: Strategy) -> Result<FiniteMatrix<S>> {
    if n == 0 {
        return Err(Error::EmptyTruncation);
    }
    let entries = par::try_map_range(strategy, 1..n + 1, |i| {
        let row = a.row(i, n)?;
        Ok((1..=n).map(|k| row.get(k)).collect::<Vec<S>>())
    })?;
    Ok(FiniteMatrix { size: n, entries })
}

/// Inner product of a row with a sequence, with a convergence check when the
/// row is infinite and `x` is not finitely supported inside the evaluated part.
pub(crate) fn row_dot<S: Scalar>(row: &Row<S>, x: &Sequence<S>, n: usize, cutoff: usize) -> Result<S> {
    let exact = row.effectively_complete() || x.support_hint().is_some_and(|m| m <= row.end());
    let limit = x.support_hint().map_or(row.end(), |m| m.min(row.end()));
    if exact {
        return Ok(S::sum_iter(row.iter().take_while(|(k, _)| *k <= limit).map(|(k, v)| v.clone() * x.entry(k))));
    }
    let terms: Vec<S> = row.iter().map(|(k, v)| v.clone() * x.entry(k)).collect();
    series_sum(&terms, n, cutoff)
}

/// Accept a truncated series when the last quarter of its terms changes
/// the partial sum by at most [`SERIES_TOL`] (relative).
pub(crate) fn series_sum<S: Scalar>(terms: &[S], row: usize, cutoff: usize) -> Result<S> {
    if terms.len() < 8 {
        return Err(Error::RowSeriesDivergent { row, cutoff });
    }
    let split = terms.len() * 3 / 4;
    let head = S::sum_iter(terms[..split].iter().cloned());
    let tail = S::sum_iter(terms[split..].iter().cloned());
    let total = head + tail.clone();
    if tail.to_f64().abs() <= SERIES_TOL * total.to_f64().abs().max(1.0) {
        Ok(total)
    } else {
        Err(Error::RowSeriesDivergent { row, cutoff })
    }
}

/// `(Ax)_n` for `1 <= n <= N`, infinite rows cut at `4 N`.
pub fn apply<S: Scalar>(a: &InfMatrix<S>, x: &Sequence<S>, n: usize) -> Result<FiniteVector<S>> {
    apply_with(a, x, n, default_cutoff(n), Strategy::default())
}

pub fn apply_with<S: Scalar>(
    a: &InfMatrix<S>,
    x: &Sequence<S>,
    n: usize,
    cutoff: usize,
    strategy: Strategy,
) -> Result<FiniteVector<S>> {
    if n == 0 {
        return Err(Error::EmptyTruncation);
    }
    let values = par::try_map_range(strategy, 1..n + 1, |i| {
        let row = a.row(i, cutoff)?;
        row_dot(&row, x, i, cutoff)
    })?;
    FiniteVector::new(format!("{} * {}", a.name(), x.label()), values)
}
