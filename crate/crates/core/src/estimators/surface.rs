//! Slope surfaces `g(t, h)/h` with `g(t, h) = f(t + h) - f(t)` and the
//! tangential dimensions read off them.

use crate::error::{Error, Result};
use crate::estimate::{Estimate, Window};
use crate::measure::ScaleFunction;

/// One `(t, h)` cell of the surface; `lo`/`hi` bracket `g/h` using the `f`
/// intervals, `mid` uses the interval midpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeEntry {
    pub level: usize,
    pub t: f64,
    pub h: f64,
    pub lo: f64,
    pub hi: f64,
    pub mid: f64,
}

/// Entries sharing a gap (in samples).
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeColumn {
    pub gap: usize,
    pub entries: Vec<SlopeEntry>,
}

impl SlopeColumn {
    pub fn h_min(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.h)
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeSurface {
    columns: Vec<SlopeColumn>,
    /// Largest interval width of the underlying `f` samples.
    f_width: f64,
    /// Smallest `t` of the tail.
    t_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Min,
    Max,
}

impl SlopeSurface {
    /// Surface over the trailing `tail_fraction` of `sf` (start points
    /// only; end points may be anywhere after) for the given sample gaps.
    pub fn from_scale(sf: &ScaleFunction, tail_fraction: f64, gaps: &[usize]) -> Result<Self> {
        let samples = sf.samples();
        let start = sf.tail_start(tail_fraction);
        if start >= samples.len() {
            return Err(Error::Samples("empty tail".into()));
        }
        let mut columns = Vec::with_capacity(gaps.len());
        for &k in gaps {
            let entries: Vec<SlopeEntry> = (start..samples.len().saturating_sub(k))
                .map(|i| {
                    let (a, b) = (&samples[i], &samples[i + k]);
                    let h = b.t - a.t;
                    SlopeEntry {
                        level: a.level,
                        t: a.t,
                        h,
                        lo: (b.f_lo - a.f_hi) / h,
                        hi: (b.f_hi - a.f_lo) / h,
                        mid: (b.f_mid() - a.f_mid()) / h,
                    }
                })
                .collect();
            if !entries.is_empty() {
                columns.push(SlopeColumn { gap: k, entries });
            }
        }
        Ok(SlopeSurface {
            columns,
            f_width: sf.max_width(start),
            t_min: samples[start].t,
        })
    }

    /// The estimator band: the first `count` gaps whose every tail entry has
    /// `h >= h_min`.
    pub fn band(sf: &ScaleFunction, tail_fraction: f64, h_min: f64, count: usize) -> Result<Self> {
        let samples = sf.samples();
        let start = sf.tail_start(tail_fraction);
        let k_lo = (1..samples.len()).find(|&k| {
            (start..samples.len() - k).all(|i| samples[i + k].t - samples[i].t >= h_min - H_EPS)
                && start + k < samples.len()
        });
        let Some(k_lo) = k_lo else {
            return Err(Error::Window(format!(
                "no sampled gap reaches h_min = {h_min:.4}"
            )));
        };
        let gaps: Vec<usize> = (k_lo..k_lo + count).collect();
        Self::from_scale(sf, tail_fraction, &gaps)
    }

    pub fn from_columns(columns: Vec<SlopeColumn>, f_width: f64, t_min: f64) -> Self {
        SlopeSurface {
            columns,
            f_width,
            t_min,
        }
    }

    pub fn columns(&self) -> &[SlopeColumn] {
        &self.columns
    }

    pub fn entries(&self) -> impl Iterator<Item = &SlopeEntry> {
        self.columns.iter().flat_map(|c| c.entries.iter())
    }

    pub fn f_width(&self) -> f64 {
        self.f_width
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    /// `f_width (1/h_min + 1/t_min)`.
    pub fn slack(&self, h_min: f64) -> f64 {
        self.f_width * (1.0 / h_min + 1.0 / self.t_min)
    }

    fn usable(&self, h_min: f64) -> Vec<&SlopeColumn> {
        self.columns
            .iter()
            .filter(|c| c.h_min() >= h_min - H_EPS)
            .collect()
    }

    fn window(columns: &[&SlopeColumn]) -> Window {
        let levels = columns
            .iter()
            .flat_map(|c| c.entries.iter().map(|e| e.level));
        let (lo, hi) = levels.fold((usize::MAX, 0), |(a, b), l| (a.min(l), b.max(l)));
        Window::levels(lo, hi).with_gaps(columns[0].gap, columns[columns.len() - 1].gap)
    }
}

/// Tangential dimensions with their certified one-sided bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentialDims {
    /// `max_h min_t` of midpoint slopes.
    pub lower: Estimate,
    /// `min_h max_t` of midpoint slopes.
    pub upper: Estimate,
    /// `max_h min_t g_lo/h`: below the windowed lower dimension.
    pub certified_lower: f64,
    /// `min_h max_t g_hi/h`: above the windowed upper dimension.
    pub certified_upper: f64,
}

pub const MIN_COLUMNS: usize = 5;

/// Rounding allowance when comparing sums of logarithms against `h_min`.
pub(crate) const H_EPS: f64 = 1e-9;

/// Sup/inf form of the tangential dimensions over the columns with
/// `h >= h_min`.
pub fn tangential_dims(surf: &SlopeSurface, h_min: f64) -> Result<TangentialDims> {
    let cols = surf.usable(h_min);
    if cols.len() < MIN_COLUMNS {
        return Err(Error::Window(format!(
            "{} sampled gaps with h >= {h_min:.4}, need {MIN_COLUMNS}",
            cols.len()
        )));
    }
    let fold = |pick: fn(&SlopeEntry) -> f64, inner: Target, outer: Target| {
        let per_col = cols
            .iter()
            .map(|c| extreme(c.entries.iter().map(pick), inner));
        extreme(per_col, outer)
    };
    let lower = fold(|e| e.mid, Target::Min, Target::Max);
    let upper = fold(|e| e.mid, Target::Max, Target::Min);
    if !(lower.is_finite() && upper.is_finite()) {
        return Err(Error::Degenerate(
            "scale function has an infinite sample".into(),
        ));
    }
    let u = surf.slack(h_min);
    let window = SlopeSurface::window(&cols);
    Ok(TangentialDims {
        lower: Estimate::new(lower, u, window),
        upper: Estimate::new(upper, u, window),
        certified_lower: fold(|e| e.lo, Target::Min, Target::Max),
        certified_upper: fold(|e| e.hi, Target::Max, Target::Min),
    })
}

/// Extremes of the midpoint slope over every usable `(t, h)` entry: the
/// joint-limit form of the same quantities.
pub fn joint_extremes(surf: &SlopeSurface, h_min: f64) -> (f64, f64) {
    let mids = surf
        .usable(h_min)
        .into_iter()
        .flat_map(|c| c.entries.iter().map(|e| e.mid));
    mids.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), m| {
        (lo.min(m), hi.max(m))
    })
}

/// For each column, the level at which the midpoint slope is extreme (first
/// one on ties); merged, sorted and deduplicated.
pub fn extremal_level_sequence(surf: &SlopeSurface, target: Target) -> Vec<usize> {
    let mut levels: Vec<usize> = surf
        .columns
        .iter()
        .filter_map(|c| {
            let mut best: Option<&SlopeEntry> = None;
            for e in &c.entries {
                let better = match (best, target) {
                    (None, _) => true,
                    (Some(b), Target::Min) => e.mid < b.mid,
                    (Some(b), Target::Max) => e.mid > b.mid,
                };
                if better {
                    best = Some(e);
                }
            }
            best.map(|e| e.level)
        })
        .collect();
    levels.sort_unstable();
    levels.dedup();
    levels
}

fn extreme(xs: impl Iterator<Item = f64>, target: Target) -> f64 {
    match target {
        Target::Min => xs.fold(f64::INFINITY, f64::min),
        Target::Max => xs.fold(f64::NEG_INFINITY, f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{MeasureInterval, MeasurePoint, ScaleSample};
    use num_rational::BigRational;
    use num_traits::One;

    /// Synthetic scale function with `f(t) = F(n)` at `t = n ln 3` and a
    /// fixed interval width.
    fn synthetic(values: &[f64], width: f64) -> ScaleFunction {
        let samples = values
            .iter()
            .enumerate()
            .map(|(i, &f)| ScaleSample {
                level: i + 1,
                t: (i + 1) as f64 * 3f64.ln(),
                measure: MeasureInterval::exact(BigRational::one()),
                f_lo: f - width / 2.0,
                f_hi: f + width / 2.0,
            })
            .collect();
        ScaleFunction::from_samples(MeasurePoint::first_kept(), 0, samples).unwrap()
    }

    #[test]
    fn linear_f_gives_constant_slopes() {
        let d = 0.7;
        let f: Vec<f64> = (1..=60).map(|n| d * n as f64 * 3f64.ln()).collect();
        let sf = synthetic(&f, 0.1);
        let surf = SlopeSurface::band(&sf, 0.5, 5.0, 5).unwrap();
        assert_eq!(surf.columns()[0].gap, 5);
        let td = tangential_dims(&surf, 5.0).unwrap();
        assert!((td.lower.value - d).abs() < 1e-12 && (td.upper.value - d).abs() < 1e-12);
        assert!(td.certified_lower < d && td.certified_upper > d);
        let slack = 0.1 * (1.0 / 5.0 + 1.0 / (31.0 * 3f64.ln()));
        assert!((td.lower.uncertainty - slack).abs() < 1e-12);
        for e in surf.entries() {
            assert!(e.lo <= e.mid && e.mid <= e.hi);
        }
    }

    #[test]
    fn needs_five_columns() {
        let f: Vec<f64> = (1..=30).map(|n| n as f64).collect();
        let sf = synthetic(&f, 0.0);
        let surf = SlopeSurface::from_scale(&sf, 0.5, &[8, 9, 10, 11]).unwrap();
        assert!(matches!(tangential_dims(&surf, 1.0), Err(Error::Window(_))));
        assert!(SlopeSurface::band(&sf, 0.5, 100.0, 5).is_err());
    }

    #[test]
    fn alternating_runs_and_extremal_sequence() {
        // slope 2 on levels in [20, 30), slope 1 elsewhere
        let mut f = vec![0.0];
        for n in 2..=60 {
            let s = if (20..30).contains(&n) { 2.0 } else { 1.0 };
            f.push(f[f.len() - 1] + s * 3f64.ln());
        }
        let sf = synthetic(&f, 0.0);
        let surf = SlopeSurface::from_scale(&sf, 1.0, &[3, 4, 5, 6, 7]).unwrap();
        let td = tangential_dims(&surf, 0.0).unwrap();
        assert!((td.upper.value - 2.0).abs() < 1e-12);
        assert!((td.lower.value - 1.0).abs() < 1e-12);
        let seq = extremal_level_sequence(&surf, Target::Max);
        assert!(seq.iter().all(|&n| (19..=29).contains(&n)), "{seq:?}");
        let (lo, hi) = joint_extremes(&surf, 0.0);
        assert!((lo - td.lower.value).abs() < 1e-12 && (hi - td.upper.value).abs() < 1e-12);
    }
}
