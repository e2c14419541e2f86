//! Comparability of ball measures at nearby centres.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{cells_inside_ball, point_box, PointAddress};
use crate::measure::{ball_measure_auto, MeasureExpr, MeasureInterval, MeasurePoint};
use crate::schedule::Schedule;

/// Up to `count` points of the fractal inside `B(x, r)`: anchor points of
/// level-`level` kept cells certainly inside the ball, taken at an even
/// stride through the lexicographic cell order.
pub fn sample_points(
    s: &Schedule,
    x: &PointAddress,
    r: &BigRational,
    level: usize,
    count: usize,
    guard: usize,
) -> Result<Vec<PointAddress>> {
    let point = point_box(s, x, level + guard)?;
    let cells = cells_inside_ball(s, &point, r, level, usize::MAX)?;
    if count == 0 || cells.is_empty() {
        return Ok(Vec::new());
    }
    let total = cells.len();
    let picks = count.min(total);
    Ok((0..picks)
        .map(|i| PointAddress::anchor_of(&cells[i * total / picks]))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewAssumReport {
    /// `max hi(B(y,r))/lo(B(x,r))` and `max hi(B(x,r))/lo(B(y,r))` over all
    /// samples and radii.
    pub c_max: f64,
    /// Same maximum for each radius.
    pub per_radius: Vec<f64>,
    pub samples: usize,
}

/// Empirical constant of `C^{-1} μ(B(x,r)) <= μ(B(y,r)) <= C μ(B(x,r))`.
pub fn newassum_check(
    e: &MeasureExpr,
    x: &MeasurePoint,
    samples: &[MeasurePoint],
    radii: &[BigRational],
    guard: usize,
) -> Result<NewAssumReport> {
    if samples.is_empty() || radii.is_empty() {
        return Err(Error::Argument("need sample points and radii".into()));
    }
    let per_radius = radii
        .par_iter()
        .map(|r| {
            let at_x = nondegenerate(ball_measure_auto(e, x, r, guard)?)?;
            let mut worst = BigRational::one();
            for y in samples {
                let at_y = nondegenerate(ball_measure_auto(e, y, r, guard)?)?;
                worst = worst.max(&at_y.hi / &at_x.lo).max(&at_x.hi / &at_y.lo);
            }
            Ok(ratio_to_f64(&worst))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(NewAssumReport {
        c_max: per_radius.iter().copied().fold(0.0, f64::max),
        per_radius,
        samples: samples.len(),
    })
}

/// Extremes of `μ(B(y, λr))` over the sampled centres.
#[derive(Debug, Clone, PartialEq)]
pub struct BallExtrema {
    /// Encloses `min_y μ(B(y, λr))`.
    pub min: MeasureInterval,
    /// Encloses `max_y μ(B(y, λr))`.
    pub max: MeasureInterval,
}

impl BallExtrema {
    /// Upper bound of `ln(M/m)`.
    pub fn log_ratio(&self) -> f64 {
        if self.min.lo.is_zero() {
            return f64::INFINITY;
        }
        crate::logs::ln_rational(&(&self.max.hi / &self.min.lo))
    }
}

/// `m_x(λr, r)` and `M_x(λr, r)` over sampled centres (which should lie in
/// `B(x, r)`, e.g. from [`sample_points`]).
pub fn ball_measure_extrema(
    e: &MeasureExpr,
    r: &BigRational,
    lambda: &BigRational,
    samples: &[MeasurePoint],
    guard: usize,
) -> Result<BallExtrema> {
    if !(lambda > &BigRational::zero() && lambda < &BigRational::one()) {
        return Err(Error::Argument(format!("λ = {lambda} not in (0, 1)")));
    }
    if samples.is_empty() {
        return Err(Error::Samples("no sample point".into()));
    }
    let radius = r * lambda;
    let ivs = samples
        .par_iter()
        .map(|y| ball_measure_auto(e, y, &radius, guard))
        .collect::<Result<Vec<_>>>()?;
    let pick = |f: fn(&BigRational, &BigRational) -> bool| {
        let lo = ivs
            .iter()
            .map(|i| &i.lo)
            .reduce(|a, b| if f(b, a) { b } else { a });
        let hi = ivs
            .iter()
            .map(|i| &i.hi)
            .reduce(|a, b| if f(b, a) { b } else { a });
        MeasureInterval::new(lo.unwrap().clone(), hi.unwrap().clone())
    };
    Ok(BallExtrema {
        min: pick(|a, b| a < b),
        max: pick(|a, b| a > b),
    })
}

fn nondegenerate(iv: MeasureInterval) -> Result<MeasureInterval> {
    if iv.lo.is_zero() {
        return Err(Error::Degenerate(format!(
            "ball measure interval {iv} has lower bound 0"
        )));
    }
    Ok(iv)
}

fn ratio_to_f64(q: &BigRational) -> f64 {
    crate::logs::ln_rational(q).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn lam(s: &Schedule, n: usize) -> BigRational {
        BigRational::new(1.into(), BigInt::from(s.exact_counts(n).1))
    }

    #[test]
    fn same_point_gives_one_up_to_slack() {
        let s = Schedule::cantor();
        let e = MeasureExpr::base(s.clone());
        let x = MeasurePoint::first_kept();
        let radii: Vec<_> = (3..8).map(|k| lam(&s, k)).collect();
        let rep = newassum_check(&e, &x, std::slice::from_ref(&x), &radii, 4).unwrap();
        // slack of one interval, squared at most: (16/15)
        assert!(
            rep.c_max >= 1.0 && rep.c_max <= 16.0 / 15.0 + 1e-12,
            "{rep:?}"
        );
    }

    #[test]
    fn cantor_nearby_points() {
        let s = Schedule::cantor();
        let e = MeasureExpr::base(s.clone());
        let x = PointAddress::first_kept();
        let n = 8;
        let pts = sample_points(&s, &x, &lam(&s, n), n + 3, 8, 4).unwrap();
        // 8 level-11 cells in [0, 3^-8]; the last touches the sphere
        assert_eq!(pts.len(), 7);
        let ys: Vec<MeasurePoint> = pts.into_iter().map(MeasurePoint::Address).collect();
        let radii: Vec<_> = (2..n).map(|k| lam(&s, k)).collect();
        let rep = newassum_check(&e, &MeasurePoint::Address(x), &ys, &radii, 4).unwrap();
        assert!(rep.c_max <= 4.0, "{rep:?}");

        let ext = ball_measure_extrema(
            &e,
            &lam(&s, 4),
            &BigRational::new(1.into(), 9.into()),
            &ys,
            4,
        )
        .unwrap();
        assert!(ext.min.lo <= ext.max.hi);
        assert!(ext.log_ratio() <= 2.0 * rep.c_max.ln() + 1e-9);
        let single = ball_measure_extrema(
            &e,
            &lam(&s, 4),
            &BigRational::new(1.into(), 9.into()),
            &ys[..1],
            4,
        )
        .unwrap();
        assert_eq!(single.min, single.max);
    }

    #[test]
    fn degenerate_and_bad_arguments() {
        let s = Schedule::cantor();
        let e = MeasureExpr::base(s.clone());
        let x = MeasurePoint::first_kept();
        assert!(newassum_check(&e, &x, &[], &[lam(&s, 2)], 4).is_err());
        assert!(ball_measure_extrema(
            &e,
            &lam(&s, 2),
            &BigRational::one(),
            std::slice::from_ref(&x),
            4
        )
        .is_err());
        assert!(ball_measure_extrema(
            &e,
            &lam(&s, 2),
            &BigRational::new(1.into(), 2.into()),
            &[],
            4
        )
        .is_err());
    }
}
