//! Limsup estimation over geometric tail windows.
//!
//! Both the `L(λ)` estimator and the Bohr–Cahen abscissa estimators reduce to
//! estimating `limsup_n q_n` from a finite prefix. The prefix `1..=N` is cut
//! into windows `(N/r^(j+1), N/r^j]`; each window contributes its maximum and
//! the frequency value at the maximizer. The trend fit regresses the window
//! maxima against `1/λ` and reports the intercept, which removes the
//! `C/λ_n` bias typical of these quotients.

use serde::{Deserialize, Serialize};

/// Controls window layout and trend extrapolation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationPolicy {
    /// Ratio between consecutive window boundaries (> 1).
    pub window_ratio: f64,
    /// Maximum number of windows scanned from the end of the prefix.
    pub max_windows: usize,
    /// Number of trailing windows used in the trend fit.
    pub fit_windows: usize,
    /// When false the estimate is the last window maximum.
    pub trend: bool,
}

impl Default for ExtrapolationPolicy {
    fn default() -> Self {
        ExtrapolationPolicy { window_ratio: 2.0, max_windows: 10, fit_windows: 4, trend: true }
    }
}

impl ExtrapolationPolicy {
    pub fn plain() -> Self {
        ExtrapolationPolicy { trend: false, ..Self::default() }
    }
}

/// Maximum of the quotient over one window `(lo, hi]` (1-based indices).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowMax {
    pub lo: usize,
    pub hi: usize,
    pub argmax: usize,
    pub lambda: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub value: f64,
    pub band: f64,
    /// Window maxima, last window first.
    pub windows: Vec<WindowMax>,
    pub trend_applied: bool,
    /// Window maxima are monotone over the fitted range.
    pub monotone_tail: bool,
}

/// Estimates `limsup q_n` where `sample(n)` yields `(λ_n, q_n)` or `None`
/// for indices to skip. Returns `None` if no window has a sample.
pub(crate) fn limsup_estimate(
    n_max: usize,
    policy: &ExtrapolationPolicy,
    mut sample: impl FnMut(usize) -> Option<(f64, f64)>,
) -> Option<TailEstimate> {
    let ratio = if policy.window_ratio > 1.0 { policy.window_ratio } else { 2.0 };
    let mut windows = Vec::new();
    let mut hi = n_max;
    while hi >= 1 && windows.len() < policy.max_windows.max(1) {
        let lo = ((hi as f64) / ratio).floor() as usize;
        let lo = lo.min(hi - 1);
        let mut best: Option<WindowMax> = None;
        for n in lo + 1..=hi {
            if let Some((lambda, q)) = sample(n) {
                if !q.is_finite() {
                    continue;
                }
                if best.as_ref().is_none_or(|b| q > b.value) {
                    best = Some(WindowMax { lo, hi, argmax: n, lambda, value: q });
                }
            }
        }
        if let Some(b) = best {
            windows.push(b);
        }
        if lo == 0 {
            break;
        }
        hi = lo;
    }
    if windows.is_empty() {
        return None;
    }

    let k = policy.fit_windows.max(2);
    let m0 = windows[0].value;
    let m1 = windows.get(1).map_or(m0, |w| w.value);
    let fitted = |slice: &[WindowMax]| -> Option<f64> {
        if slice.len() < 2 || slice.iter().any(|w| w.lambda <= 0.0) {
            return None;
        }
        let xs: Vec<f64> = slice.iter().map(|w| 1.0 / w.lambda).collect();
        let ys: Vec<f64> = slice.iter().map(|w| w.value).collect();
        intercept(&xs, &ys)
    };

    let (value, band, trend_applied) = if policy.trend && windows.len() > k {
        match (fitted(&windows[..k]), fitted(&windows[1..=k])) {
            (Some(a), Some(a_prev)) => (a, (m0 - m1).abs().max((a - a_prev).abs()), true),
            _ => (m0, (m0 - m1).abs(), false),
        }
    } else {
        (m0, (m0 - m1).abs(), false)
    };

    let span = windows.len().min(k + 1);
    let vals: Vec<f64> = windows[..span].iter().map(|w| w.value).collect();
    let tol = 1e-12 * vals.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let monotone_tail = vals.windows(2).all(|p| p[0] <= p[1] + tol) || vals.windows(2).all(|p| p[0] + tol >= p[1]);

    Some(TailEstimate { value, band, windows, trend_applied, monotone_tail })
}

/// Least-squares intercept of `y = a + b x`.
fn intercept(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= f64::EPSILON * mx * mx {
        return Some(my);
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let a = my - slope * mx;
    a.is_finite().then_some(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_affine_in_inverse_lambda() {
        // q_n = 0.4 + 0.9 / λ_n with λ_n = ln n
        let est = limsup_estimate(100_000, &ExtrapolationPolicy::default(), |n| {
            let l = (n as f64).ln();
            (n > 1).then(|| (l, 0.4 + 0.9 / l))
        })
        .unwrap();
        assert!(est.trend_applied);
        assert!((est.value - 0.4).abs() < 1e-3, "{est:?}");
    }

    #[test]
    fn constant_sequence() {
        let est = limsup_estimate(1000, &ExtrapolationPolicy::default(), |n| Some((n as f64, 1.0))).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
        assert_eq!(est.band, 0.0);
        assert!(est.monotone_tail);
    }

    #[test]
    fn windows_cover_from_the_end() {
        let est = limsup_estimate(64, &ExtrapolationPolicy::plain(), |n| Some((n as f64, n as f64))).unwrap();
        assert_eq!(est.windows[0].hi, 64);
        assert_eq!(est.windows[0].lo, 32);
        assert_eq!(est.windows[0].argmax, 64);
        assert_eq!(est.value, 64.0);
    }
}
