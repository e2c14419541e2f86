//! Certified enclosures of ball measures.
//!
//! For the limit measure of a schedule, a ball `B(x, r)` is bracketed by
//! counting level-`n` cylinders: those certainly inside the ball give a lower
//! bound, those possibly meeting the ball enlarged by one cell diameter give
//! an upper bound (each counted cylinder carries mass `1/P_n`). Sums,
//! products (max metric) and bi-Lipschitz images combine these intervals.

mod parse;
mod scale;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::geometry::{enumerate_cells_in_box, point_box, PointAddress, RationalBox};
use crate::logs::ln_rational;
use crate::schedule::Schedule;

pub use parse::{parse_measure, parse_rational};
pub use scale::{blowup_dims, blowup_dims_from, f_samples, BlowupDims, ScaleFunction, ScaleSample};

/// `lo <= μ(B) <= hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl MeasureInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        MeasureInterval { lo, hi }
    }

    pub fn exact(v: BigRational) -> Self {
        MeasureInterval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// `(-ln hi, -ln lo)`, an enclosure of `-ln μ(B)`; the upper end is
    /// `+inf` when `lo = 0`.
    pub fn neg_log_bounds(&self) -> (f64, f64) {
        (-ln_rational(&self.hi), -ln_rational(&self.lo))
    }

    fn add(&self, other: &Self) -> Self {
        MeasureInterval::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    fn mul(&self, other: &Self) -> Self {
        MeasureInterval::new(&self.lo * &other.lo, &self.hi * &other.hi)
    }
}

impl fmt::Display for MeasureInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A measure built from schedule limit measures.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureExpr {
    Base(Arc<Schedule>),
    Sum(Box<MeasureExpr>, Box<MeasureExpr>),
    /// Product measure on the product space with the max metric.
    Product(Box<MeasureExpr>, Box<MeasureExpr>),
    /// Image under a bi-Lipschitz map with distortion `L >= 1`; only `L` is
    /// needed to bracket ball measures.
    Lipschitz(Box<MeasureExpr>, BigRational),
}

impl MeasureExpr {
    pub fn base(s: Schedule) -> Self {
        MeasureExpr::Base(Arc::new(s))
    }

    pub fn sum(a: MeasureExpr, b: MeasureExpr) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::Expression(format!(
                "sum of measures on R^{} and R^{}",
                a.dim(),
                b.dim()
            )));
        }
        Ok(MeasureExpr::Sum(Box::new(a), Box::new(b)))
    }

    pub fn product(a: MeasureExpr, b: MeasureExpr) -> Self {
        MeasureExpr::Product(Box::new(a), Box::new(b))
    }

    pub fn lipschitz(e: MeasureExpr, distortion: BigRational) -> Result<Self> {
        if distortion < BigRational::one() {
            return Err(Error::Expression(format!(
                "Lipschitz distortion {distortion} is below 1"
            )));
        }
        Ok(MeasureExpr::Lipschitz(Box::new(e), distortion))
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        match self {
            MeasureExpr::Base(s) => s.dim(),
            MeasureExpr::Sum(a, _) | MeasureExpr::Lipschitz(a, _) => a.dim(),
            MeasureExpr::Product(a, b) => a.dim() + b.dim(),
        }
    }

    pub fn total_mass(&self) -> BigRational {
        match self {
            MeasureExpr::Base(_) => BigRational::one(),
            MeasureExpr::Sum(a, b) => a.total_mass() + b.total_mass(),
            MeasureExpr::Product(a, b) => a.total_mass() * b.total_mass(),
            MeasureExpr::Lipschitz(a, _) => a.total_mass(),
        }
    }

    /// Leftmost base schedule. Point addresses are read on this schedule,
    /// and it supplies the natural scales `Λ_n` for sampling.
    pub fn anchor(&self) -> &Arc<Schedule> {
        match self {
            MeasureExpr::Base(s) => s,
            MeasureExpr::Sum(a, _) | MeasureExpr::Product(a, _) | MeasureExpr::Lipschitz(a, _) => {
                a.anchor()
            }
        }
    }

    /// Base schedules in left-to-right order.
    pub fn bases(&self) -> Vec<&Arc<Schedule>> {
        match self {
            MeasureExpr::Base(s) => vec![s],
            MeasureExpr::Sum(a, b) | MeasureExpr::Product(a, b) => {
                let mut v = a.bases();
                v.extend(b.bases());
                v
            }
            MeasureExpr::Lipschitz(a, _) => a.bases(),
        }
    }
}

impl fmt::Display for MeasureExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureExpr::Base(s) => write!(f, "base[{s}]"),
            MeasureExpr::Sum(a, b) => write!(f, "sum({a},{b})"),
            MeasureExpr::Product(a, b) => write!(f, "product({a},{b})"),
            MeasureExpr::Lipschitz(a, l) => write!(f, "lipschitz({a},{l})"),
        }
    }
}

/// A point of the space a measure lives on. Product measures take pairs; a
/// plain address given to a product is used for every factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasurePoint {
    Address(PointAddress),
    Pair(Box<MeasurePoint>, Box<MeasurePoint>),
}

impl MeasurePoint {
    pub fn first_kept() -> Self {
        MeasurePoint::Address(PointAddress::first_kept())
    }

    pub fn pair(a: MeasurePoint, b: MeasurePoint) -> Self {
        MeasurePoint::Pair(Box::new(a), Box::new(b))
    }

    /// Point specs joined with `&` form (left-nested) pairs.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut parts = spec.split('&');
        let first = MeasurePoint::Address(PointAddress::parse(parts.next().unwrap_or(""))?);
        parts.try_fold(first, |acc, p| {
            Ok(MeasurePoint::pair(
                acc,
                MeasurePoint::Address(PointAddress::parse(p)?),
            ))
        })
    }
}

impl fmt::Display for MeasurePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasurePoint::Address(a) => write!(f, "{a}"),
            MeasurePoint::Pair(a, b) => write!(f, "{a} & {b}"),
        }
    }
}

/// Which cylinder level the enumeration uses for a base measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelPolicy {
    /// The same level for every base and radius.
    Fixed(usize),
    /// `guard` levels below the first level whose cells fit in the radius,
    /// chosen separately for each base and radius.
    Relative,
}

/// Enclosure of `μ(B(x, r))` with cylinders of level `n`, the point resolved
/// to depth `n + guard`.
pub fn ball_measure(
    e: &MeasureExpr,
    x: &MeasurePoint,
    r: &BigRational,
    n: usize,
    guard: usize,
) -> Result<MeasureInterval> {
    eval(e, x, e.anchor(), r, LevelPolicy::Fixed(n), guard)
}

/// As [`ball_measure`], picking the level from the radius
/// ([`LevelPolicy::Relative`]).
pub fn ball_measure_auto(
    e: &MeasureExpr,
    x: &MeasurePoint,
    r: &BigRational,
    guard: usize,
) -> Result<MeasureInterval> {
    eval(e, x, e.anchor(), r, LevelPolicy::Relative, guard)
}

fn eval(
    e: &MeasureExpr,
    x: &MeasurePoint,
    anchor: &Schedule,
    r: &BigRational,
    policy: LevelPolicy,
    guard: usize,
) -> Result<MeasureInterval> {
    if !r.is_positive() {
        return Err(Error::Argument("radius must be positive".into()));
    }
    match e {
        MeasureExpr::Base(s) => {
            let MeasurePoint::Address(addr) = x else {
                return Err(Error::PointSpec(
                    "a point pair was given for a measure on a single space".into(),
                ));
            };
            base_interval(s, addr, anchor, r, policy, guard)
        }
        MeasureExpr::Sum(a, b) => {
            let ia = eval(a, x, anchor, r, policy, guard)?;
            let ib = eval(b, x, anchor, r, policy, guard)?;
            Ok(ia.add(&ib))
        }
        MeasureExpr::Product(a, b) => {
            let (xa, xb) = match x {
                MeasurePoint::Pair(xa, xb) => (xa.as_ref(), xb.as_ref()),
                single => (single, single),
            };
            // max-metric ball = product of balls of the same radius
            let ia = eval(a, xa, a.anchor(), r, policy, guard)?;
            let ib = eval(b, xb, b.anchor(), r, policy, guard)?;
            Ok(ia.mul(&ib))
        }
        MeasureExpr::Lipschitz(a, l) => {
            let lo = eval(a, x, anchor, &(r / l), policy, guard)?;
            let hi = eval(a, x, anchor, &(r * l), policy, guard)?;
            Ok(MeasureInterval::new(lo.lo, hi.hi))
        }
    }
}

fn base_interval(
    s: &Schedule,
    x: &PointAddress,
    anchor: &Schedule,
    r: &BigRational,
    policy: LevelPolicy,
    guard: usize,
) -> Result<MeasureInterval> {
    let n = match policy {
        LevelPolicy::Fixed(n) => n,
        LevelPolicy::Relative => {
            s.level_for_radius(r.numer().magnitude(), r.denom().magnitude()) + guard
        }
    };
    let point = located_box(s, x, anchor, n + guard)?;
    let counts = enumerate_cells_in_box(s, &point, r, n)?;
    let (p_n, _) = s.exact_counts(n);
    let p_n = BigInt::from(p_n);
    Ok(MeasureInterval::new(
        BigRational::new(counts.inner.into(), p_n.clone()),
        BigRational::new(counts.outer.into(), p_n),
    ))
}

/// Box of side at most `Λ^s_depth` around the point, whose address is read
/// on `anchor`.
fn located_box(
    s: &Schedule,
    x: &PointAddress,
    anchor: &Schedule,
    depth: usize,
) -> Result<RationalBox> {
    if s == anchor {
        return point_box(s, x, depth);
    }
    if s.dim() != anchor.dim() {
        return Err(Error::PointSpec(format!(
            "address on R^{} used for a measure on R^{}",
            anchor.dim(),
            s.dim()
        )));
    }
    let (_, inv) = s.exact_counts(depth);
    let d = anchor.level_for_radius(&1u32.into(), &inv);
    point_box(anchor, x, d)
}

/// Mass of the whole space, for sanity checks: `ball_measure` at a radius
/// covering the unit cube must return exactly this.
pub fn covering_radius(dim: usize) -> BigRational {
    // integer strictly above sqrt(dim)
    let mut k = 1u64;
    while k * k <= dim as u64 {
        k += 1;
    }
    BigRational::from_integer(k.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TailRule;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn cantor() -> MeasureExpr {
        MeasureExpr::base(Schedule::cantor())
    }

    #[test]
    fn cantor_ball_contains_quarter() {
        let iv = ball_measure(&cantor(), &MeasurePoint::first_kept(), &q(1, 9), 6, 4).unwrap();
        assert!(iv.contains(&q(1, 4)), "{iv}");
        assert!(iv.width() <= q(1, 16));
        assert_eq!(iv, MeasureInterval::new(q(15, 64), q(16, 64)));
    }

    #[test]
    fn full_mass_beyond_diameter() {
        for name in ["cantor", "carpet", "vicsek", "carpet-vicsek"] {
            let e = MeasureExpr::base(Schedule::named(name).unwrap());
            let r = covering_radius(e.dim());
            for n in [1, 3] {
                let iv = ball_measure(&e, &MeasurePoint::first_kept(), &r, n, 4).unwrap();
                assert_eq!(iv, MeasureInterval::exact(BigRational::one()), "{name}");
            }
        }
    }

    #[test]
    fn product_of_cantor_balls() {
        let e = MeasureExpr::product(cantor(), cantor());
        let x = MeasurePoint::pair(MeasurePoint::first_kept(), MeasurePoint::first_kept());
        let iv = ball_measure(&e, &x, &q(1, 9), 6, 4).unwrap();
        assert!(iv.contains(&q(1, 16)), "{iv}");
        let single = ball_measure(&e, &MeasurePoint::first_kept(), &q(1, 9), 6, 4).unwrap();
        assert_eq!(iv, single);
        assert_eq!(e.dim(), 2);
    }

    #[test]
    fn sum_and_lipschitz_combine_intervals() {
        let x = MeasurePoint::first_kept();
        let r = q(1, 9);
        let base = ball_measure(&cantor(), &x, &r, 6, 4).unwrap();
        let sum = MeasureExpr::sum(cantor(), cantor()).unwrap();
        let iv = ball_measure(&sum, &x, &r, 6, 4).unwrap();
        assert_eq!(
            iv,
            MeasureInterval::new(&base.lo * q(2, 1), &base.hi * q(2, 1))
        );
        assert_eq!(sum.total_mass(), q(2, 1));

        let lip = MeasureExpr::lipschitz(cantor(), q(2, 1)).unwrap();
        let iv = ball_measure(&lip, &x, &r, 6, 4).unwrap();
        let inner = ball_measure(&cantor(), &x, &q(1, 18), 6, 4).unwrap();
        let outer = ball_measure(&cantor(), &x, &q(2, 9), 6, 4).unwrap();
        assert_eq!(iv, MeasureInterval::new(inner.lo, outer.hi));
        assert!(MeasureExpr::lipschitz(cantor(), q(1, 2)).is_err());
    }

    #[test]
    fn sum_across_schedules_uses_anchor_address() {
        // 1-D schedule keeping {0, 1} of 2: Lebesgue measure on [0, 1]
        let lebesgue = Schedule::constant(
            crate::schedule::GridStep::new(1, 2, vec![vec![0], vec![1]]).unwrap(),
        );
        let e = MeasureExpr::sum(cantor(), MeasureExpr::base(lebesgue)).unwrap();
        let iv = ball_measure_auto(&e, &MeasurePoint::first_kept(), &q(1, 9), 4).unwrap();
        // cantor part 1/4, lebesgue part 1/9 (ball [0, 1/9) inside [0, 1])
        assert!(iv.contains(&(q(1, 4) + q(1, 9))), "{iv}");
        assert!(MeasureExpr::sum(cantor(), MeasureExpr::base(Schedule::carpet_vicsek())).is_err());
    }

    #[test]
    fn relative_level_tracks_radius() {
        let e = MeasureExpr::base(Schedule::carpet_vicsek());
        let x = MeasurePoint::first_kept();
        let (_, inv) = e.anchor().exact_counts(30);
        let r = BigRational::new(1.into(), inv.into());
        let iv = ball_measure_auto(&e, &x, &r, 4).unwrap();
        let fixed = ball_measure(&e, &x, &r, 34, 4).unwrap();
        assert_eq!(iv, fixed);
        let (f_lo, f_hi) = iv.neg_log_bounds();
        assert!(f_lo <= f_hi && f_hi.is_finite());
    }

    #[test]
    fn point_parse_pairs() {
        let p = MeasurePoint::parse("tail=first-kept & prefix=2;tail=periodic:0|2").unwrap();
        let MeasurePoint::Pair(a, b) = &p else {
            panic!("expected a pair")
        };
        assert_eq!(**a, MeasurePoint::first_kept());
        let MeasurePoint::Address(b) = b.as_ref() else {
            panic!()
        };
        assert_eq!(b.tail(), &TailRule::Periodic(vec![vec![0], vec![2]]));
        assert_eq!(MeasurePoint::parse(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn pair_rejected_for_single_space() {
        let x = MeasurePoint::pair(MeasurePoint::first_kept(), MeasurePoint::first_kept());
        assert!(ball_measure(&cantor(), &x, &q(1, 3), 3, 2).is_err());
    }
}
