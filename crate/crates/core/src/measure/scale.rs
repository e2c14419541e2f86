//! The scale function `f(t) = -ln μ(B(x, e^{-t}))` sampled at natural scales,
//! and local dimensions of blow-ups read off its increments.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use super::{ball_measure_auto, MeasureExpr, MeasureInterval, MeasurePoint};
use crate::error::{Error, Result};
use crate::estimate::{Estimate, Window};

/// One sample: the ball of radius `Λ_level` of the anchor schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSample {
    pub level: usize,
    /// `ln 1/Λ_level`
    pub t: f64,
    pub measure: MeasureInterval,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl ScaleSample {
    /// Midpoint of the `f` interval; infinite when the lower measure bound
    /// vanishes.
    pub fn f_mid(&self) -> f64 {
        0.5 * (self.f_lo + self.f_hi)
    }

    pub fn width(&self) -> f64 {
        self.f_hi - self.f_lo
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleFunction {
    pub point: MeasurePoint,
    pub guard: usize,
    samples: Vec<ScaleSample>,
}

impl ScaleFunction {
    pub fn from_samples(
        point: MeasurePoint,
        guard: usize,
        samples: Vec<ScaleSample>,
    ) -> Result<Self> {
        if samples.windows(2).any(|w| w[0].level >= w[1].level) {
            return Err(Error::Argument("sample levels must increase".into()));
        }
        Ok(ScaleFunction {
            point,
            guard,
            samples,
        })
    }

    pub fn samples(&self) -> &[ScaleSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn at_level(&self, level: usize) -> Option<&ScaleSample> {
        self.samples
            .binary_search_by_key(&level, |s| s.level)
            .ok()
            .map(|i| &self.samples[i])
    }

    /// Index of the first sample in the trailing `fraction` of samples.
    pub fn tail_start(&self, fraction: f64) -> usize {
        let n = self.samples.len();
        let keep = ((n as f64) * fraction.clamp(0.0, 1.0)).ceil() as usize;
        n - keep.min(n)
    }

    /// Largest `f` interval width from sample `from` on.
    pub fn max_width(&self, from: usize) -> f64 {
        self.samples[from..]
            .iter()
            .map(ScaleSample::width)
            .fold(0.0, f64::max)
    }
}

/// Samples `f` at `r = Λ_n` of the anchor schedule for each `n` in `levels`.
/// Each base is enumerated `guard` levels below its natural level for the
/// radius, the point resolved `guard` levels further.
pub fn f_samples(
    e: &MeasureExpr,
    x: &MeasurePoint,
    levels: &[usize],
    guard: usize,
) -> Result<ScaleFunction> {
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument("levels must be strictly increasing".into()));
    }
    let anchor = e.anchor();
    let samples = levels
        .par_iter()
        .map(|&level| {
            let (_, inv) = anchor.exact_counts(level);
            let r = BigRational::new(1.into(), BigInt::from(inv));
            let measure = ball_measure_auto(e, x, &r, guard)?;
            let (f_lo, f_hi) = measure.neg_log_bounds();
            Ok(ScaleSample {
                level,
                t: anchor.t(level),
                measure,
                f_lo,
                f_hi,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ScaleFunction::from_samples(x.clone(), guard, samples)
}

/// Per-gap limit of `(f(t_n + h) - f(t_n)) / h` along a level sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowupColumn {
    pub gap: usize,
    /// Mean of `h` over the averaged entries.
    pub h: f64,
    /// Mean slope over the trailing half of the sequence.
    pub value: f64,
    /// `max - min` of those slopes.
    pub spread: f64,
    /// Interval slack of a single slope.
    pub slack: f64,
}

/// Local dimensions of the tangent measure generated by a level sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowupDims {
    pub lower: Estimate,
    pub upper: Estimate,
    pub columns: Vec<BlowupColumn>,
    /// `false` when the per-gap spread grows with `h`, i.e. the inner limit
    /// along the sequence does not appear to settle.
    pub converged: bool,
}

/// Evaluates `f` where needed and runs [`blowup_dims_from`].
pub fn blowup_dims(
    e: &MeasureExpr,
    x: &MeasurePoint,
    level_seq: &[usize],
    gaps: &[usize],
    guard: usize,
) -> Result<BlowupDims> {
    let levels: BTreeSet<usize> = level_seq
        .iter()
        .flat_map(|&n| std::iter::once(n).chain(gaps.iter().map(move |&k| n + k)))
        .collect();
    let levels: Vec<usize> = levels.into_iter().collect();
    let sf = f_samples(e, x, &levels, guard)?;
    blowup_dims_from(&sf, level_seq, gaps)
}

/// Blow-up dimensions from an already sampled scale function. For each gap
/// `k` the slopes over `[t_n, t_{n+k}]` are averaged over the trailing half of
/// `level_seq`; lower/upper are the min/max of these averages over the
/// trailing half of `gaps`.
pub fn blowup_dims_from(
    sf: &ScaleFunction,
    level_seq: &[usize],
    gaps: &[usize],
) -> Result<BlowupDims> {
    if level_seq.windows(2).any(|w| w[0] >= w[1]) || gaps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument(
            "level sequence and gaps must increase".into(),
        ));
    }
    if gaps.first() == Some(&0) || gaps.is_empty() {
        return Err(Error::Argument(
            "gaps must be positive and non-empty".into(),
        ));
    }
    if level_seq.len() < 2 {
        return Err(Error::Samples(format!(
            "level sequence of length {} is too short to average",
            level_seq.len()
        )));
    }
    let seq_tail = &level_seq[level_seq.len() / 2..];
    let mut columns = Vec::with_capacity(gaps.len());
    for &k in gaps {
        let mut slopes = Vec::with_capacity(seq_tail.len());
        let (mut h_sum, mut slack) = (0.0, 0.0f64);
        for &n in seq_tail {
            let (Some(a), Some(b)) = (sf.at_level(n), sf.at_level(n + k)) else {
                return Err(Error::Samples(format!(
                    "f not sampled at levels {n} and {}",
                    n + k
                )));
            };
            let h = b.t - a.t;
            let slope = (b.f_mid() - a.f_mid()) / h;
            if !slope.is_finite() {
                return Err(Error::Degenerate(format!(
                    "zero lower measure bound near level {n}"
                )));
            }
            slopes.push(slope);
            h_sum += h;
            slack = slack.max(0.5 * (a.width() + b.width()) / h);
        }
        let (lo, hi) = min_max(&slopes);
        columns.push(BlowupColumn {
            gap: k,
            h: h_sum / slopes.len() as f64,
            value: slopes.iter().sum::<f64>() / slopes.len() as f64,
            spread: hi - lo,
            slack,
        });
    }
    let h_tail = &columns[columns.len() / 2..];
    let (lower, upper) = min_max(&h_tail.iter().map(|c| c.value).collect::<Vec<_>>());
    let uncertainty = h_tail.iter().map(|c| c.slack).fold(0.0, f64::max);
    let (first, last) = (&columns[0], &columns[columns.len() - 1]);
    let converged = last.spread <= first.spread.max(2.0 * uncertainty) + 1e-12;
    let window =
        Window::levels(level_seq[0], *level_seq.last().unwrap()).with_gaps(h_tail[0].gap, last.gap);
    Ok(BlowupDims {
        lower: Estimate::new(lower, uncertainty, window),
        upper: Estimate::new(upper, uncertainty, window),
        columns,
        converged,
    })
}

fn min_max(xs: &[f64]) -> (f64, f64) {
    xs.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}
