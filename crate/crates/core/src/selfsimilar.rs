//! Self-similar sets: the Moran equation `Σ λ_j^d = 1` and the collapse of
//! all four dimensions to `d` for constant schedules.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::estimators::EstimateConfig;
use crate::logs::ln_rational;
use crate::measure::{MeasureExpr, MeasurePoint};
use crate::pipeline::{run_estimate, EstimateRun};
use crate::schedule::{GridStep, Schedule};

/// Similarity ratios `λ_1..λ_p` in `(0, 1)`, `p >= 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioList(Vec<BigRational>);

impl RatioList {
    pub fn new(ratios: Vec<BigRational>) -> Result<Self> {
        if ratios.len() < 2 {
            return Err(Error::Argument("need at least two ratios".into()));
        }
        if let Some(bad) = ratios
            .iter()
            .find(|r| **r <= BigRational::zero() || **r >= BigRational::one())
        {
            return Err(Error::Argument(format!("ratio {bad} not in (0, 1)")));
        }
        Ok(RatioList(ratios))
    }

    /// `p` copies of `λ`.
    pub fn equal(p: usize, lambda: BigRational) -> Result<Self> {
        RatioList::new(vec![lambda; p])
    }

    /// Comma-separated `num/den` list, e.g. `1/2,1/4`.
    pub fn parse(text: &str) -> Result<Self> {
        let ratios = text
            .split(',')
            .map(|r| {
                let r = r.trim();
                let (n, d) = r.split_once('/').unwrap_or((r, "1"));
                match (n.trim().parse::<i64>(), d.trim().parse::<i64>()) {
                    (Ok(n), Ok(d)) if d != 0 => Ok(BigRational::new(n.into(), d.into())),
                    _ => Err(Error::Argument(format!("bad ratio `{r}`"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        RatioList::new(ratios)
    }

    pub fn ratios(&self) -> &[BigRational] {
        &self.0
    }
}

impl fmt::Display for RatioList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|r| r.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoranSolution {
    pub d: f64,
    /// `Σ λ_j^d - 1` at the returned `d`.
    pub residual: f64,
    pub iterations: usize,
}

pub const MAX_ITERATIONS: usize = 200;

/// Bisection on the strictly decreasing `d ↦ Σ λ_j^d - 1`. The bracket's
/// upper end `ln p / ln(1/λ_max) + 1` already has a negative value.
pub fn moran_dimension(ratios: &RatioList, tol: f64) -> Result<MoranSolution> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Argument(format!("tolerance {tol} must be positive")));
    }
    let logs: Vec<f64> = ratios.0.iter().map(ln_rational).collect();
    let g = |d: f64| logs.iter().map(|l| (d * l).exp()).sum::<f64>() - 1.0;
    let p = logs.len() as f64;
    let (mut lo, mut hi) = (
        0.0,
        logs.iter().map(|l| p.ln() / -l).fold(0.0, f64::max) + 1.0,
    );
    let mut iterations = 0;
    while hi - lo > tol && iterations < MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let d = 0.5 * (lo + hi);
    Ok(MoranSolution {
        d,
        residual: g(d),
        iterations,
    })
}

#[derive(Debug, Clone)]
pub struct CollapseReport {
    /// `ln p / ln m`.
    pub d: f64,
    pub run: EstimateRun,
    /// Range of `f(t) - d t` over all samples (interval midpoints).
    pub band: (f64, f64),
    /// The band over the second half of the samples leaves the band over the
    /// first half by more than the interval slack.
    pub band_growing: bool,
}

impl CollapseReport {
    pub fn band_width(&self) -> f64 {
        self.band.1 - self.band.0
    }

    /// Every estimate within `tol` of `d` (plus its uncertainty).
    pub fn all_agree(&self, tol: f64) -> bool {
        self.run
            .dims
            .rows()
            .iter()
            .all(|(_, e)| e.agrees_with(self.d, tol))
    }
}

/// Runs the estimator pipeline on the constant schedule of `step` at the
/// first-kept point and checks `f(t) - d t` for boundedness.
pub fn selfsimilar_collapse_check(step: GridStep, cfg: &EstimateConfig) -> Result<CollapseReport> {
    let d = (step.p() as f64).ln() / (step.m() as f64).ln();
    let e = MeasureExpr::base(Schedule::constant(step));
    let run = run_estimate(&e, &MeasurePoint::first_kept(), cfg)?;
    let dev: Vec<f64> = run
        .scale
        .samples()
        .iter()
        .map(|s| s.f_mid() - d * s.t)
        .collect();
    let range = |xs: &[f64]| {
        xs.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            })
    };
    let band = range(&dev);
    let half = dev.len() / 2;
    let (first, second) = (range(&dev[..half]), range(&dev[half..]));
    let slack = run.scale.max_width(0);
    let band_growing = second.0 < first.0 - slack || second.1 > first.1 + slack;
    Ok(CollapseReport {
        d,
        run,
        band,
        band_growing,
    })
}
