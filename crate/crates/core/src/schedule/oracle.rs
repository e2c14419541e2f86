//! Closed-form dimensions of the limit measure, read off the schedule.
//!
//! Tangential dimensions are the extreme slopes
//! `(log P_{n+k} - log P_n) / (log 1/Λ_{n+k} - log 1/Λ_n)` and local
//! dimensions the extreme ratios `log P_n / log 1/Λ_n`, both as `n, k` grow.
//! Here the limits are replaced by extrema over a finite window.

use super::Schedule;
use crate::error::{Error, Result};
use crate::estimate::{DimensionEstimate, Estimate, Window};

/// Rounding allowance for sums of double-precision logarithms.
const LOG_ROUNDING: f64 = 1e-12;

/// Windowed oracle: `n` ranges over `[n_max/2, n_max]`, gaps over
/// `k >= k_min` with `n + k <= n_max`.
pub fn oracle_dims(s: &Schedule, n_max: usize, k_min: usize) -> Result<DimensionEstimate> {
    if k_min == 0 || n_max <= 2 * k_min {
        return Err(Error::Window(format!(
            "need depth > 2*k_min > 0, got depth {n_max} and k_min {k_min}"
        )));
    }
    let logs: Vec<(f64, f64)> = (0..=n_max).map(|n| s.log_counts(n)).collect();
    let n_lo = (n_max / 2).max(1);

    let (mut slope_min, mut slope_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for n in n_lo..=n_max {
        let (p0, m0) = logs[n];
        for (p1, m1) in logs.iter().skip(n + k_min) {
            let slope = (p1 - p0) / (m1 - m0);
            slope_min = slope_min.min(slope);
            slope_max = slope_max.max(slope);
        }
    }
    let (ratio_min, ratio_max) = logs[n_lo..=n_max]
        .iter()
        .map(|(p, m)| p / m)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r), hi.max(r))
        });

    let pair_window = Window::levels(n_lo, n_max).with_gaps(k_min, n_max - n_lo);
    let level_window = Window::levels(n_lo, n_max);
    Ok(DimensionEstimate {
        lower_tangential: Estimate::new(slope_min, LOG_ROUNDING, pair_window),
        lower_local: Estimate::new(ratio_min, LOG_ROUNDING, level_window),
        upper_local: Estimate::new(ratio_max, LOG_ROUNDING, level_window),
        upper_tangential: Estimate::new(slope_max, LOG_ROUNDING, pair_window),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Bounded,
    DriftingToMinusInfinity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NontrivialityReport {
    /// `min_n (log P_n - d log 1/Λ_n)` over `1..=n_max`.
    pub min: f64,
    pub argmin: usize,
    /// Minimum over the first half of the window.
    pub min_first_half: f64,
    /// Minimum over the second half of the window.
    pub min_second_half: f64,
    pub trend: Trend,
}

/// Windowed view of `liminf (log P_n - d log 1/Λ_n)`: the `d`-dimensional
/// Hausdorff measure is non-trivial exactly when this stays finite.
pub fn hausdorff_nontriviality(s: &Schedule, d: f64, n_max: usize) -> Result<NontrivialityReport> {
    if d < 0.0 || !d.is_finite() {
        return Err(Error::Argument(format!(
            "dimension {d} must be finite and >= 0"
        )));
    }
    if n_max < 2 {
        return Err(Error::Window("need at least two levels".into()));
    }
    let seq: Vec<f64> = (1..=n_max)
        .map(|n| {
            let (lp, lm) = s.log_counts(n);
            lp - d * lm
        })
        .collect();
    let half = n_max / 2;
    let min_of = |xs: &[f64]| xs.iter().copied().fold(f64::INFINITY, f64::min);
    let (argmin, min) = seq
        .iter()
        .copied()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |acc, (i, v)| if v < acc.1 { (i + 1, v) } else { acc },
        );
    let min_first_half = min_of(&seq[..half]);
    let min_second_half = min_of(&seq[half..]);
    let tol = 1e-8 * (1.0 + min_first_half.abs());
    let trend = if min_second_half < min_first_half - tol {
        Trend::DriftingToMinusInfinity
    } else {
        Trend::Bounded
    };
    Ok(NontrivialityReport {
        min,
        argmin,
        min_first_half,
        min_second_half,
        trend,
    })
}
