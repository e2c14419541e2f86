use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use tandim_core::geometry::{PointAddress, TailRule};
use tandim_core::measure::{ball_measure, MeasureExpr, MeasureInterval, MeasurePoint};
use tandim_core::schedule::{grid_cells, GridStep, Schedule};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn radius() -> impl Strategy<Value = BigRational> {
    (1i64..=40, 1i64..=81).prop_map(|(n, d)| q(n, d))
}

fn full_grid(m: u32) -> Schedule {
    Schedule::constant(GridStep::new(1, m, grid_cells(1, m).collect()).unwrap())
}

/// Address of a point with the given prefix digits and first-kept tail.
fn addr(digits: &[u32]) -> PointAddress {
    PointAddress::new(
        digits.iter().map(|&d| vec![d]).collect(),
        TailRule::FirstKept,
    )
    .unwrap()
}

fn at(digits: &[u32]) -> MeasurePoint {
    MeasurePoint::Address(addr(digits))
}

fn contains(outer: &MeasureInterval, inner: &MeasureInterval) -> bool {
    outer.lo <= inner.lo && inner.hi <= outer.hi
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Full-grid schedules give Lebesgue measure on [0, 1]; with a first-kept
    /// (all-zero) tail the point is the left end of its prefix cell, so the
    /// exact value is `|[x - r, x + r] ∩ [0, 1]|`.
    #[test]
    fn lebesgue_enclosure(
        m in 2u32..=4,
        digits in prop::collection::vec(0u32..4, 0..4),
        r in radius(),
        n in 1usize..6,
        guard in 0usize..4,
    ) {
        let digits: Vec<u32> = digits.into_iter().map(|d| d % m).collect();
        let mut x = BigRational::zero();
        let mut side = BigRational::one();
        for &d in &digits {
            side /= BigRational::from_integer(m.into());
            x += &side * BigRational::from_integer(d.into());
        }
        let zero = BigRational::zero();
        let one = BigRational::one();
        let left = (&x - &r).max(zero.clone());
        let right = (&x + &r).min(one);
        let exact = (right - left).max(zero);
        let e = MeasureExpr::base(full_grid(m));
        let iv = ball_measure(&e, &at(&digits), &r, n, guard).unwrap();
        prop_assert!(iv.contains(&exact), "{iv} vs {exact}");
    }

    /// Refining the cylinder level never loosens the enclosure.
    #[test]
    fn refinement_is_monotone(
        digits in prop::collection::vec(0u32..2, 0..4),
        r in radius(),
        n in 1usize..6,
    ) {
        let digits: Vec<u32> = digits.into_iter().map(|d| 2 * d).collect();
        let e = MeasureExpr::base(Schedule::cantor());
        let a = ball_measure(&e, &at(&digits), &r, n, 2).unwrap();
        let b = ball_measure(&e, &at(&digits), &r, n + 1, 2).unwrap();
        prop_assert!(contains(&a, &b), "{a} then {b}");
    }

    #[test]
    fn lipschitz_sandwich(r in radius(), l in 1i64..5, n in 1usize..6) {
        let base = MeasureExpr::base(Schedule::carpet_vicsek());
        let x = MeasurePoint::first_kept();
        let lip = MeasureExpr::lipschitz(base.clone(), q(l, 1)).unwrap();
        let iv = ball_measure(&lip, &x, &r, n, 2).unwrap();
        let inner = ball_measure(&base, &x, &(&r / q(l, 1)), n, 2).unwrap();
        let outer = ball_measure(&base, &x, &(&r * q(l, 1)), n, 2).unwrap();
        let at_r = ball_measure(&base, &x, &r, n, 2).unwrap();
        prop_assert_eq!(&iv.lo, &inner.lo);
        prop_assert_eq!(&iv.hi, &outer.hi);
        prop_assert!(contains(&iv, &at_r));
    }

    /// Max-metric balls are products, so the enclosure is the product of the
    /// factor enclosures.
    #[test]
    fn product_multiplies(r in radius(), n in 1usize..6) {
        let c = || MeasureExpr::base(Schedule::cantor());
        let p = MeasureExpr::product(c(), c());
        let x = MeasurePoint::first_kept();
        let iv = ball_measure(&p, &x, &r, n, 2).unwrap();
        let f = ball_measure(&c(), &x, &r, n, 2).unwrap();
        prop_assert_eq!(iv.lo, &f.lo * &f.lo);
        prop_assert_eq!(iv.hi, &f.hi * &f.hi);
    }

    /// Bases on the same grid resolve the point identically, so enclosures add.
    #[test]
    fn sum_adds(r in radius(), n in 1usize..5) {
        let a = MeasureExpr::base(Schedule::cantor());
        let b = MeasureExpr::base(full_grid(3));
        let s = MeasureExpr::sum(a.clone(), b.clone()).unwrap();
        let x = MeasurePoint::first_kept();
        let iv = ball_measure(&s, &x, &r, n, 2).unwrap();
        let (ia, ib) = (
            ball_measure(&a, &x, &r, n, 2).unwrap(),
            ball_measure(&b, &x, &r, n, 2).unwrap(),
        );
        prop_assert_eq!(iv.lo, &ia.lo + &ib.lo);
        prop_assert_eq!(iv.hi, &ia.hi + &ib.hi);
    }

    /// The Cantor measure restricted to [2/3, 1] is a half-mass copy scaled by
    /// 1/3; balls of radius below the 1/3 gap do not see the other half.
    #[test]
    fn locality(num in 1i64..27, n in 1usize..6) {
        let r = q(num, 81);
        let e = MeasureExpr::base(Schedule::cantor());
        let root = ball_measure(&e, &at(&[]), &r, n, 2).unwrap();
        let right = ball_measure(&e, &at(&[2]), &(&r / q(3, 1)), n + 1, 2).unwrap();
        prop_assert_eq!(&right.lo, &(&root.lo / q(2, 1)));
        prop_assert_eq!(&right.hi, &(&root.hi / q(2, 1)));
    }

    /// Enclosures are monotone in the radius at a fixed level.
    #[test]
    fn monotone_in_radius(r in radius(), s in radius(), n in 1usize..6) {
        let (small, big) = if r <= s { (r, s) } else { (s, r) };
        let e = MeasureExpr::base(Schedule::carpet_vicsek());
        let x = MeasurePoint::first_kept();
        let a = ball_measure(&e, &x, &small, n, 2).unwrap();
        let b = ball_measure(&e, &x, &big, n, 2).unwrap();
        prop_assert!(a.lo <= b.lo && a.hi <= b.hi);
    }
}
