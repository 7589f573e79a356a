//! One pass over the first `N` rows of a matrix, collecting every aggregate
//! the conditions need.

use crate::error::Result;
use crate::limit::{detect_limit, scaled_window, LimitVerdict};
use crate::matrix::{InfMatrix, SERIES_TOL};
use crate::par;
use crate::scalar::NeumaierSum;

use super::EvalConfig;

const CHUNK: usize = 256;

/// `lim_k` of a row: exactly 0 for finite rows, detected otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum RowLimit {
    Exact(f64),
    Detected(LimitVerdict),
}

/// Convergence state of an infinite row series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SeriesState {
    Settled,
    Divergent,
    Unsettled,
}

pub(crate) struct RowStats {
    abs: f64,
    sum: f64,
    diff_abs: f64,
    abs_state: SeriesState,
    diff_state: SeriesState,
    limit: RowLimit,
    diff_limit: RowLimit,
    head: Vec<f64>,
    values: Option<(usize, Vec<f64>)>,
}

pub(crate) struct Probe {
    pub n: usize,
    /// Columns `k <= kc` are sampled for column conditions.
    pub kc: usize,
    pub row_abs: Vec<f64>,
    pub row_sum: Vec<f64>,
    pub row_diff_abs: Vec<f64>,
    /// Whether `sum_k |a_nk|` was accepted for each row.
    pub abs_state: Vec<SeriesState>,
    /// Same for `sum_k |a_nk - a_n,k+1|`.
    pub diff_state: Vec<SeriesState>,
    pub row_limit: Vec<RowLimit>,
    pub diff_limit: Vec<RowLimit>,
    /// `sum_k |sum_{n<=m} a_nk|` for each `m`.
    pub colsum_abs: Vec<f64>,
    /// `columns[k-1][n-1] = a_nk` for `k <= kc + 1`.
    pub columns: Vec<Vec<f64>>,
}

fn fsum(values: impl Iterator<Item = f64>) -> f64 {
    let mut acc = NeumaierSum::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

fn series_state(terms: &[f64], complete: bool, cfg: &EvalConfig) -> Result<SeriesState> {
    if complete {
        return Ok(SeriesState::Settled);
    }
    if terms.len() < 16 {
        return Ok(SeriesState::Unsettled);
    }
    let total = fsum(terms.iter().copied());
    let tail = fsum(terms[terms.len() * 3 / 4..].iter().copied());
    if tail <= SERIES_TOL * total.max(1.0) {
        return Ok(SeriesState::Settled);
    }
    let partial = crate::seq::partial_sums(terms);
    let w = scaled_window(cfg.window, cfg.n, partial.len());
    Ok(if detect_limit(&partial, cfg.tol, w)?.fails_to_converge() {
        SeriesState::Divergent
    } else {
        SeriesState::Unsettled
    })
}

fn row_stats(a: &InfMatrix<f64>, n: usize, cfg: &EvalConfig, kc: usize, want_columns: bool) -> Result<RowStats> {
    let row = a.row(n, cfg.cutoff())?;
    let complete = row.effectively_complete();
    let v = &row.values;
    let abs = fsum(v.iter().map(|x| x.abs()));
    let sum = fsum(v.iter().copied());
    // sum_k |a_nk - a_n,k+1| over k >= 1, with a = 0 outside the stored range
    let lead = if row.start > 1 { v.first().map_or(0.0, |x| x.abs()) } else { 0.0 };
    let inner = fsum(v.windows(2).map(|w| (w[0] - w[1]).abs()));
    let last = if complete { v.last().map_or(0.0, |x| x.abs()) } else { 0.0 };
    let diff_abs = lead + inner + last;
    let abs_terms: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    let diff_terms: Vec<f64> = v.windows(2).map(|w| (w[0] - w[1]).abs()).collect();
    let abs_state = series_state(&abs_terms, complete, cfg)?;
    let diff_state = series_state(&diff_terms, complete, cfg)?;
    let (limit, diff_limit) = if complete || v.len() < 16 {
        (RowLimit::Exact(0.0), RowLimit::Exact(0.0))
    } else {
        let w = scaled_window(cfg.window, cfg.n, v.len());
        let diffs: Vec<f64> = v.windows(2).map(|w| w[0] - w[1]).collect();
        let wd = scaled_window(cfg.window, cfg.n, diffs.len());
        (RowLimit::Detected(detect_limit(v, cfg.tol, w)?), RowLimit::Detected(detect_limit(&diffs, cfg.tol, wd)?))
    };
    let head = if want_columns { (1..=kc + 1).map(|k| row.get(k)).collect() } else { Vec::new() };
    Ok(RowStats {
        abs,
        sum,
        diff_abs,
        abs_state,
        diff_state,
        limit,
        diff_limit,
        head,
        values: Some((row.start, row.values)),
    })
}

impl Probe {
    pub fn run(a: &InfMatrix<f64>, cfg: &EvalConfig, want_columns: bool, want_colsums: bool) -> Result<Probe> {
        let n = cfg.n;
        let kc = cfg.col_bound();
        let mut p = Probe {
            n,
            kc,
            row_abs: Vec::with_capacity(n),
            row_sum: Vec::with_capacity(n),
            row_diff_abs: Vec::with_capacity(n),
            abs_state: Vec::with_capacity(n),
            diff_state: Vec::with_capacity(n),
            row_limit: Vec::with_capacity(n),
            diff_limit: Vec::with_capacity(n),
            colsum_abs: Vec::new(),
            columns: if want_columns { vec![Vec::with_capacity(n); kc + 1] } else { Vec::new() },
        };
        let mut running: Vec<f64> = Vec::new();
        let mut start = 1;
        while start <= n {
            let end = (start + CHUNK - 1).min(n);
            let stats =
                par::try_map_range(cfg.strategy, start..end + 1, |i| row_stats(a, i, cfg, kc, want_columns))?;
            for mut s in stats {
                p.row_abs.push(s.abs);
                p.row_sum.push(s.sum);
                p.row_diff_abs.push(s.diff_abs);
                p.abs_state.push(s.abs_state);
                p.diff_state.push(s.diff_state);
                p.row_limit.push(s.limit);
                p.diff_limit.push(s.diff_limit);
                for (col, v) in p.columns.iter_mut().zip(&s.head) {
                    col.push(*v);
                }
                if want_colsums {
                    if let Some((first, values)) = s.values.take() {
                        if !values.is_empty() && first + values.len() - 1 > running.len() {
                            running.resize(first + values.len() - 1, 0.0);
                        }
                        for (i, v) in values.iter().enumerate() {
                            running[first - 1 + i] += v;
                        }
                    }
                    p.colsum_abs.push(fsum(running.iter().map(|x| x.abs())));
                }
            }
            start = end + 1;
        }
        Ok(p)
    }

    pub fn column(&self, k: usize) -> &[f64] {
        &self.columns[k - 1]
    }

    /// `a_nk - a_n,k+1` down column `k`.
    pub fn diff_column(&self, k: usize) -> Vec<f64> {
        self.columns[k - 1].iter().zip(&self.columns[k]).map(|(a, b)| a - b).collect()
    }
}
