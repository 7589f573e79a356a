//! Truncation-based limit and boundedness heuristics.
//!
//! A finite prefix cannot decide convergence, so every test here has a third
//! outcome. The heuristics look at a trailing window of the data:
//!
//! * convergence: the window's spread is within `tol` (scaled by
//!   `max(1, |values|)`);
//! * divergence: `|v|` is monotone over the window and grows at a relative
//!   rate, measured per unit of `ln n`, above [`DIVERGENCE_SLOPE`];
//! * oscillation: either successive differences alternate in sign without the
//!   amplitude decaying, or the range over the second half of the data has
//!   not shrunk relative to the two preceding dyadic blocks.

use serde::Serialize;

use crate::error::{Error, Result};

/// Minimum relative growth rate `d|v|/d(ln n) / |v|` treated as unbounded.
///
/// `H_n` sits at `1/ln n` (about 0.1 at `n = 10^4`), `n^p` at `p`, while a
/// bounded `L - c/n` tail decays like `1/n`.
pub const DIVERGENCE_SLOPE: f64 = 0.05;

/// A non-decaying oscillation keeps at least this fraction of its range from
/// one and two doublings earlier. Amplitudes like `1/ln n` fall below it.
const PERSISTENCE: f64 = 0.9;

/// Ratio of the last doubling's growth to the previous one below which a
/// rising tail is not called divergent.
const SUSTAINED_GROWTH: f64 = 0.95;

/// A converged sequence is judged to miss a target only when its distance to
/// it exceeds this many times the sequence's drift over its second half.
/// For `1/ln n` the ratio is `log2(L/2)`, for `1/ln ln n` about 25 at
/// `L = 10^4`.
pub const SEPARATION: f64 = 50.0;

/// Largest increment ratio accepted by the power-law extrapolation.
const MAX_EXTRAPOLATION_RATIO: f64 = 0.9;

/// Accepted distance between extrapolated limit and window mean, in units of
/// the window spread. A pure `c n^-p` tail with ratio `2^-p <= 0.9` lands
/// within about `66` spreads.
const EXTRAPOLATION_REACH: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum LimitKind {
    ConvergesTo(f64),
    Diverges,
    Oscillates,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitVerdict {
    pub kind: LimitKind,
    /// Max pairwise distance over the trailing window.
    pub tail_spread: f64,
    /// Relative log-regression growth rate of `|v|` over the trailing window.
    pub trend_slope: f64,
    /// Limit estimate: power-law extrapolation when the tail is monotone with
    /// geometrically shrinking increments, else the window mean.
    pub estimate: f64,
    /// Last value of the sequence.
    pub last: f64,
    /// `|v_L - v_{L/2}|`: how far the sequence still moved over its second half.
    pub drift: f64,
}

impl LimitVerdict {
    pub fn converged(&self) -> bool {
        matches!(self.kind, LimitKind::ConvergesTo(_))
    }

    /// True when the sequence demonstrably has no finite limit.
    pub fn fails_to_converge(&self) -> bool {
        matches!(self.kind, LimitKind::Diverges | LimitKind::Oscillates)
    }

    /// Whether a converged sequence settles at `target`: `Some(true)` within
    /// `tol`, `Some(false)` when it sits farther from `target` than
    /// [`SEPARATION`] times its recent drift, `None` otherwise.
    pub fn settles_at(&self, target: f64, tol: f64) -> Option<bool> {
        if !self.converged() {
            return None;
        }
        let band = tol * target.abs().max(1.0);
        if (self.estimate - target).abs() <= band {
            Some(true)
        } else if (self.last - target).abs() > SEPARATION * self.drift {
            Some(false)
        } else {
            None
        }
    }

    /// Whether two converged sequences share a limit, by the same rule.
    pub fn same_limit(&self, other: &LimitVerdict, tol: f64) -> Option<bool> {
        if !self.converged() || !other.converged() {
            return None;
        }
        let band = tol * self.estimate.abs().max(other.estimate.abs()).max(1.0);
        if (self.estimate - other.estimate).abs() <= band {
            Some(true)
        } else if (self.last - other.last).abs() > SEPARATION * (self.drift + other.drift) {
            Some(false)
        } else {
            None
        }
    }
}

fn scale_of(values: &[f64]) -> f64 {
    values.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

fn spread(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    hi - lo
}

/// Least-squares slope of `y` against `ln(index)`, indices 1-based starting at `first`.
fn log_slope(y: &[f64], first: usize) -> f64 {
    let n = y.len() as f64;
    if y.len() < 2 {
        return 0.0;
    }
    let xs: Vec<f64> = (0..y.len()).map(|i| ((first + i) as f64).ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, v) in xs.iter().zip(y) {
        sxy += (x - mx) * (v - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

fn relative_growth(abs_tail: &[f64], first: usize) -> f64 {
    let mean = abs_tail.iter().sum::<f64>() / abs_tail.len() as f64;
    if mean == 0.0 {
        0.0
    } else {
        log_slope(abs_tail, first) / mean
    }
}

fn monotone(values: &[f64]) -> (bool, bool) {
    let inc = values.windows(2).all(|w| w[1] >= w[0]);
    let dec = values.windows(2).all(|w| w[1] <= w[0]);
    (inc, dec)
}

/// Three-point extrapolation assuming `v_n ~ L + c n^-p`, at indices
/// `L/4, L/2, L`, or at `L/2, L/sqrt 2, L` when the earlier triple straddles
/// a transient.
fn extrapolate(v: &[f64]) -> Option<f64> {
    let len = v.len();
    if len < 8 {
        return None;
    }
    let late = (len as f64 / std::f64::consts::SQRT_2).round() as usize;
    extrapolate_at(v, len / 4, len / 2).or_else(|| extrapolate_at(v, len / 2, late))
}

fn extrapolate_at(v: &[f64], i: usize, j: usize) -> Option<f64> {
    let a = v[i - 1];
    let b = v[j - 1];
    let c = v[v.len() - 1];
    let d1 = b - a;
    let d2 = c - b;
    if d2 == 0.0 {
        return Some(c);
    }
    if d1 == 0.0 || d1.signum() != d2.signum() {
        return None;
    }
    let q = d2 / d1;
    if !(q > 0.0 && q <= MAX_EXTRAPOLATION_RATIO) {
        return None;
    }
    Some(c + d2 * q / (1.0 - q))
}

fn alternating_differences(tail: &[f64]) -> bool {
    let diffs: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
    diffs.len() >= 2
        && diffs.iter().all(|d| *d != 0.0)
        && diffs.windows(2).all(|w| w[0].signum() != w[1].signum())
}

/// Classify the limiting behaviour of `v` from its trailing `window` values.
pub fn detect_limit(v: &[f64], tol: f64, window: usize) -> Result<LimitVerdict> {
    let len = v.len();
    if window >= len {
        return Err(Error::WindowTooLarge { window, len });
    }
    if !(tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }
    let window = window.max(1);
    let first = len - window + 1;
    let tail = &v[len - window..];
    let tail_spread = spread(tail);
    let abs_tail: Vec<f64> = tail.iter().map(|x| x.abs()).collect();
    let trend_slope = relative_growth(&abs_tail, first);
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let scale = scale_of(tail);
    let last = v[len - 1];
    let drift = (v[len - 1] - v[len / 2 - 1]).abs();

    if tail.iter().any(|x| !x.is_finite()) {
        return Ok(LimitVerdict { kind: LimitKind::Diverges, tail_spread, trend_slope, estimate: f64::NAN, last, drift });
    }

    if tail_spread <= tol * scale {
        let (inc, dec) = monotone(tail);
        let estimate = if tail_spread == 0.0 {
            tail[tail.len() - 1]
        } else if inc || dec {
            extrapolate(v).filter(|e| (e - mean).abs() <= tail_spread.max(tol * scale) * EXTRAPOLATION_REACH).unwrap_or(mean)
        } else {
            mean
        };
        return Ok(LimitVerdict { kind: LimitKind::ConvergesTo(mean), tail_spread, trend_slope, estimate, last, drift });
    }

    // Monotone over the whole second half, not just the window, so a slow
    // bounded swing does not read as divergence.
    let second_half = &v[len - window.max(len / 2)..];
    let same_sign = second_half.iter().all(|x| *x >= 0.0) || second_half.iter().all(|x| *x <= 0.0);
    let abs_half: Vec<f64> = second_half.iter().map(|x| x.abs()).collect();
    let (abs_inc, _) = monotone(&abs_half);
    // growth per doubling must not shrink: ln n passes, c - b/ln n does not
    let sustained = len >= 8 && {
        let (q, h, l) = (v[len / 4 - 1].abs(), v[len / 2 - 1].abs(), v[len - 1].abs());
        h - q > 0.0 && l - h >= SUSTAINED_GROWTH * (h - q)
    };
    if same_sign && abs_inc && sustained && trend_slope > DIVERGENCE_SLOPE {
        return Ok(LimitVerdict { kind: LimitKind::Diverges, tail_spread, trend_slope, estimate: mean, last, drift });
    }

    // the swing must persist over two doublings of n, not one
    let window_spread = |end: usize| {
        let w = &v[end.saturating_sub(window)..end];
        if w.len() >= 2 {
            spread(w)
        } else {
            0.0
        }
    };
    if alternating_differences(tail)
        && tail_spread >= PERSISTENCE * window_spread(len / 2)
        && tail_spread >= PERSISTENCE * window_spread(len / 4)
    {
        return Ok(LimitVerdict { kind: LimitKind::Oscillates, tail_spread, trend_slope, estimate: mean, last, drift });
    }

    if len >= 16 {
        let second = &v[len / 2..];
        let r2 = spread(second);
        let r1 = spread(&v[len / 4..len / 2]);
        let r0 = spread(&v[len / 8..len / 4]);
        let (inc, dec) = monotone(second);
        if r2 > tol * scale_of(second)
            && r2 >= PERSISTENCE * r1
            && r2 >= PERSISTENCE * r0
            && !inc
            && !dec
            && !alternating_decay(second, tol)
        {
            return Ok(LimitVerdict { kind: LimitKind::Oscillates, tail_spread, trend_slope, estimate: mean, last, drift });
        }
    }

    Ok(LimitVerdict { kind: LimitKind::Inconclusive, tail_spread, trend_slope, estimate: mean, last, drift })
}

/// Reject the long-scale oscillation signal when the non-monotone steps are
/// only from negligible round-off on top of a monotone trend.
fn alternating_decay(values: &[f64], tol: f64) -> bool {
    let scale = scale_of(values);
    let mut up = 0.0f64;
    let mut down = 0.0f64;
    for w in values.windows(2) {
        let d = w[1] - w[0];
        if d > 0.0 {
            up += d;
        } else {
            down -= d;
        }
    }
    up.min(down) <= tol * scale
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SupTrend {
    /// Running sup flat over the final window.
    Plateau,
    /// Running sup rising steadily at a divergent rate.
    Growing,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupAnalysis {
    pub trend: SupTrend,
    /// `max |v_n|` over the truncation (a lower bound for the true sup).
    pub sup: f64,
    /// 1-based index attaining the sup.
    pub argmax: usize,
    /// Increase of the running sup across the final window.
    pub window_increase: f64,
    pub trend_slope: f64,
}

/// Running-sup analysis of `|v_n|`.
pub fn analyze_sup(v: &[f64], tol: f64, window: usize) -> Result<SupAnalysis> {
    let len = v.len();
    if window >= len {
        return Err(Error::WindowTooLarge { window, len });
    }
    let window = window.max(1);
    let mut running = Vec::with_capacity(len);
    let mut best = 0.0f64;
    let mut argmax = 1;
    let mut overflow = false;
    for (i, x) in v.iter().enumerate() {
        let a = x.abs();
        if !a.is_finite() {
            overflow = true;
        }
        if a > best || (i == 0) {
            if a > best {
                argmax = i + 1;
            }
            best = best.max(a);
        }
        running.push(best);
    }
    if overflow {
        return Ok(SupAnalysis {
            trend: SupTrend::Growing,
            sup: f64::MAX,
            argmax,
            window_increase: f64::INFINITY,
            trend_slope: f64::INFINITY,
        });
    }
    let sup = running[len - 1];
    let start = running[len - 1 - window];
    let window_increase = sup - start;
    let first = len - window + 1;
    let trend_slope = relative_growth(&running[len - window..], first);
    let threshold = tol * sup.max(1.0);

    let trend = if dyadic_growth(v, threshold) {
        SupTrend::Growing
    } else if window_increase <= threshold {
        SupTrend::Plateau
    } else if trend_slope > DIVERGENCE_SLOPE && sustained_growth(&running, window, threshold) {
        SupTrend::Growing
    } else {
        SupTrend::Undetermined
    };
    Ok(SupAnalysis { trend, sup, argmax, window_increase, trend_slope })
}

/// Block maxima of `|v|` over the last four dyadic blocks rise at a rate
/// above the divergence slope, the rise does not shrink, and the last block
/// sets a new record. Catches unbounded oscillations whose peaks are sparser
/// than the window.
fn dyadic_growth(v: &[f64], threshold: f64) -> bool {
    let len = v.len();
    if len < 128 {
        return false;
    }
    let peak = |a: usize, b: usize| v[a..b].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let m = [peak(len / 16, len / 8), peak(len / 8, len / 4), peak(len / 4, len / 2), peak(len / 2, len)];
    let record = m[3] > peak(0, len / 2);
    record
        && m[0] > 0.0
        && m[3] - m[2] > threshold
        && m.windows(2).all(|w| w[1] > w[0] && (w[1] / w[0]).log2() > DIVERGENCE_SLOPE)
        && m[3] - m[2] >= SUSTAINED_GROWTH * (m[2] - m[1])
        && m[2] - m[1] >= SUSTAINED_GROWTH * (m[1] - m[0])
}

/// The running sup must have risen across each of four checkpoints spanning
/// the last two windows, so a single late spike does not read as growth.
fn sustained_growth(running: &[f64], window: usize, threshold: f64) -> bool {
    let len = running.len();
    let span = (2 * window).min(len - 1);
    let step = (span / 4).max(1);
    let marks: Vec<f64> = (0..=4).map(|i| running[len - 1 - span + (i * step).min(span)]).collect();
    marks.windows(2).all(|w| w[1] - w[0] > threshold * 0.25 / 4.0_f64.max(1.0) && w[1] > w[0])
}

/// Default trailing window for a truncation of length `n`.
pub fn default_window(n: usize) -> usize {
    (n / 10).max(16)
}

/// Scale a window chosen for length `reference` down to a shorter sequence.
pub fn scaled_window(window: usize, reference: usize, len: usize) -> usize {
    if reference == 0 || len <= 1 {
        return 1;
    }
    let w = (window as f64 * len as f64 / reference as f64).round() as usize;
    w.clamp(4.min(len - 1), len - 1).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::partial_sums;

    #[test]
    fn harmonic_terms_converge_to_zero() {
        let v: Vec<f64> = (1..=500).map(|k| 1.0 / k as f64).collect();
        let lv = detect_limit(&v, 1e-3, 50).unwrap();
        assert!(lv.converged(), "{lv:?}");
        assert!(lv.estimate.abs() < 1e-3);
    }

    #[test]
    fn harmonic_partial_sums_diverge() {
        let v: Vec<f64> = partial_sums(&(1..=10_000).map(|k| 1.0 / k as f64).collect::<Vec<_>>());
        // oracle: direct summation
        let h: f64 = (1..=10_000).map(|k| 1.0 / k as f64).sum();
        assert!((v[9999] - h).abs() < 1e-10);
        assert!((h - 9.787606).abs() < 1e-6);
        let lv = detect_limit(&v, 1e-9, 1000).unwrap();
        assert_eq!(lv.kind, LimitKind::Diverges);
    }

    #[test]
    fn alternating_sign_oscillates() {
        let v: Vec<f64> = (1..=100).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_eq!(detect_limit(&v, 1e-9, 16).unwrap().kind, LimitKind::Oscillates);
    }

    #[test]
    fn constant_vector_converges_with_zero_spread() {
        let v = vec![3.5; 64];
        let lv = detect_limit(&v, 1e-12, 16).unwrap();
        assert_eq!(lv.kind, LimitKind::ConvergesTo(3.5));
        assert_eq!(lv.tail_spread, 0.0);
        assert_eq!(lv.estimate, 3.5);
    }

    #[test]
    fn window_must_fit() {
        assert!(matches!(detect_limit(&[1.0, 2.0], 1e-3, 2), Err(Error::WindowTooLarge { .. })));
    }

    #[test]
    fn damped_alternation_is_not_oscillation() {
        let v: Vec<f64> = (1..=500).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 } / n as f64).collect();
        assert_ne!(detect_limit(&v, 1e-9, 50).unwrap().kind, LimitKind::Oscillates);
    }

    #[test]
    fn power_law_extrapolation_recovers_limit() {
        let v: Vec<f64> = (1..=2000).map(|n| 2.0 + 3.0 / n as f64).collect();
        let lv = detect_limit(&v, 1e-3, 200).unwrap();
        assert!((lv.estimate - 2.0).abs() < 1e-9, "{lv:?}");
    }

    #[test]
    fn slowly_oscillating_blocks_detected() {
        // Cesaro means of (-1)^{floor(log2 k)}
        let x: Vec<f64> = (1..=2000usize).map(|k| if (usize::BITS - 1 - k.leading_zeros()) % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let s = partial_sums(&x);
        let means: Vec<f64> = s.iter().enumerate().map(|(i, v)| v / (i + 1) as f64).collect();
        assert_eq!(detect_limit(&means, 1e-3, 200).unwrap().kind, LimitKind::Oscillates);
    }

    #[test]
    fn sup_plateau_and_growth() {
        let bounded: Vec<f64> = (1..=1000).map(|n| if n % 2 == 0 { 0.0 } else { -1.0 }).collect();
        assert_eq!(analyze_sup(&bounded, 1e-9, 100).unwrap().trend, SupTrend::Plateau);
        let h = partial_sums(&(1..=10_000).map(|k| 1.0 / k as f64).collect::<Vec<_>>());
        let a = analyze_sup(&h, 1e-9, 1000).unwrap();
        assert_eq!(a.trend, SupTrend::Growing);
        assert!(a.sup > 9.78);
    }

    #[test]
    fn late_spike_is_not_growth() {
        let mut v = vec![1.0; 1000];
        v[995] = 50.0;
        assert_ne!(analyze_sup(&v, 1e-9, 100).unwrap().trend, SupTrend::Growing);
    }
}
