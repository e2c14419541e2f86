//! Covering-number proxies: kept cells of side `λr` meeting `B̄(x, r)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use super::surface::{
    tangential_dims, SlopeColumn, SlopeEntry, SlopeSurface, TangentialDims, H_EPS,
};
use super::EstimateConfig;
use crate::error::{Error, Result};
use crate::geometry::{covering_count, CountInterval, PointAddress};
use crate::logs::ln_biguint;
use crate::schedule::Schedule;

/// Level-`m` kept cells meeting `B̄(x, r)`, bracketed when the descent is cut
/// off `guard` levels below the radius.
pub fn covering_counts(
    s: &Schedule,
    x: &PointAddress,
    r: &BigRational,
    m: usize,
    guard: usize,
) -> Result<CountInterval> {
    covering_count(s, x, r, m, guard)
}

/// First level of the trailing `tail_fraction` of levels `1..=depth`.
pub(crate) fn tail_first_level(depth: usize, tail_fraction: f64) -> usize {
    let keep = ((depth as f64) * tail_fraction.clamp(0.0, 1.0)).ceil() as usize;
    depth + 1 - keep.clamp(1, depth)
}

/// Tangential dimensions of the set: the sup/inf slope estimator applied to
/// `ln n(Λ_{n+k}, B̄(x, Λ_n)) / h` with `h = ln(Λ_n / Λ_{n+k})`.
pub fn metric_tangential_dims(
    s: &Schedule,
    x: &PointAddress,
    cfg: &EstimateConfig,
) -> Result<TangentialDims> {
    cfg.validate()?;
    let n0 = tail_first_level(cfg.depth, cfg.tail_fraction);
    let k_lo = (1..=cfg.depth - n0)
        .find(|&k| (n0..=cfg.depth - k).all(|n| s.t(n + k) - s.t(n) >= cfg.h_min - H_EPS))
        .ok_or_else(|| Error::Window(format!("no gap reaches h_min = {:.4}", cfg.h_min)))?;
    let gaps: Vec<usize> = (k_lo..k_lo + cfg.h_columns)
        .filter(|k| n0 + k <= cfg.depth)
        .collect();
    let pairs: Vec<(usize, usize)> = gaps
        .iter()
        .flat_map(|&k| (n0..=cfg.depth - k).map(move |n| (n, k)))
        .collect();
    let entries = pairs
        .par_iter()
        .map(|&(n, k)| {
            let (_, inv) = s.exact_counts(n);
            let r = BigRational::new(1.into(), BigInt::from(inv));
            let c = covering_counts(s, x, &r, n + k, cfg.guard)?;
            if c.lo == 0u32.into() {
                return Err(Error::Degenerate(format!(
                    "no cell certainly meets the ball at level {n}"
                )));
            }
            let h = s.t(n + k) - s.t(n);
            let (lo, hi) = (ln_biguint(&c.lo) / h, ln_biguint(&c.hi) / h);
            Ok((
                k,
                SlopeEntry {
                    level: n,
                    t: s.t(n),
                    h,
                    lo,
                    hi,
                    mid: 0.5 * (lo + hi),
                },
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let width = entries
        .iter()
        .map(|(_, e)| (e.hi - e.lo) * e.h)
        .fold(0.0, f64::max);
    let columns = gaps
        .iter()
        .map(|&k| SlopeColumn {
            gap: k,
            entries: entries
                .iter()
                .filter(|(g, _)| *g == k)
                .map(|(_, e)| e.clone())
                .collect(),
        })
        .collect();
    let surf = SlopeSurface::from_columns(columns, width, s.t(n0));
    tangential_dims(&surf, cfg.h_min)
}
