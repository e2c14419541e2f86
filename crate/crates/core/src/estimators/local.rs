//! Local dimensions `liminf/limsup f(t)/t` and the doubling diagnostic.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::estimate::{Estimate, Window};
use crate::measure::ScaleFunction;

pub const MIN_TAIL_SAMPLES: usize = 10;

/// `(d̲, d̄)` as the min/max of `f(t)/t` over the trailing `tail_fraction`
/// of samples.
pub fn local_dims(sf: &ScaleFunction, tail_fraction: f64) -> Result<(Estimate, Estimate)> {
    let start = sf.tail_start(tail_fraction);
    let tail = &sf.samples()[start..];
    if tail.len() < MIN_TAIL_SAMPLES {
        return Err(Error::Samples(format!(
            "{} samples in the tail, need {MIN_TAIL_SAMPLES}",
            tail.len()
        )));
    }
    let t_min = tail[0].t;
    if t_min <= 0.0 {
        return Err(Error::Samples("tail starts at t = 0".into()));
    }
    let (lo, hi) = tail
        .iter()
        .map(|s| s.f_mid() / s.t)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| {
            (a.min(r), b.max(r))
        });
    if !hi.is_finite() {
        return Err(Error::Degenerate(
            "scale function has an infinite sample".into(),
        ));
    }
    let u = sf.max_width(start) / t_min;
    let window = Window::levels(tail[0].level, tail[tail.len() - 1].level);
    Ok((Estimate::new(lo, u, window), Estimate::new(hi, u, window)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoublingReport {
    /// Upper bound of `max μ(B(x, 2r))/μ(B(x, r))` over the tail samples,
    /// with `B(x, 2r)` replaced by the sampled ball of the smallest radius
    /// at least `2r`.
    pub a_window: f64,
    pub log2_a: f64,
    /// Ratio unbounded on the window (a vanishing lower bound).
    pub flagged: bool,
    /// Largest gap between consecutive sampled `t`.
    pub max_spacing: f64,
}

impl DoublingReport {
    /// `δ̄ <= log2 A + u`.
    pub fn bounds(&self, upper_tangential: &Estimate) -> bool {
        upper_tangential.value <= self.log2_a + upper_tangential.uncertainty
    }
}

/// Doubling constant over the tail at natural scales: for each tail sample
/// at `t`, `μ(B(x, 2e^{-t}))` is bounded by the sampled ball at the largest
/// `t' <= t - ln 2`, so `ln A >= f_hi(t) - f_lo(t')`.
pub fn doubling_diagnostic(sf: &ScaleFunction, tail_fraction: f64) -> Result<DoublingReport> {
    let samples = sf.samples();
    let max_spacing = samples
        .windows(2)
        .map(|w| w[1].t - w[0].t)
        .fold(0.0, f64::max);
    if max_spacing > 3.0 * LN_2 {
        return Err(Error::Samples(format!(
            "t spacing {max_spacing:.4} exceeds 3 ln 2"
        )));
    }
    let start = sf.tail_start(tail_fraction);
    let mut ln_a = f64::NEG_INFINITY;
    for (i, s) in samples.iter().enumerate().skip(start) {
        let j = samples[..i].iter().rposition(|p| p.t <= s.t - LN_2);
        let Some(j) = j else { continue };
        ln_a = ln_a.max(s.f_hi - samples[j].f_lo);
    }
    if ln_a == f64::NEG_INFINITY {
        return Err(Error::Samples(
            "no tail sample has a doubled radius sampled".into(),
        ));
    }
    let a_window = ln_a.exp();
    Ok(DoublingReport {
        a_window,
        log2_a: ln_a / LN_2,
        flagged: !a_window.is_finite(),
        max_spacing,
    })
}
