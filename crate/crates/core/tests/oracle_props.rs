use approx::assert_relative_eq;
use proptest::prelude::*;
use tandim_core::schedule::{grid_cells, oracle_dims, GridStep, Schedule, ScheduleRule};
use tandim_core::selfsimilar::{moran_dimension, RatioList};

/// `(dim, m, p)` for a step; the kept cells are the first `p` grid cells.
fn step_shape() -> impl Strategy<Value = (usize, u32, usize)> {
    (1usize..=2, 2u32..=5).prop_flat_map(|(dim, m)| {
        let total = (m as usize).pow(dim as u32);
        (Just(dim), Just(m), 2..=total)
    })
}

fn step(dim: usize, m: u32, p: usize, skip: usize) -> GridStep {
    let cells: Vec<_> = grid_cells(dim, m).collect();
    let kept = cells
        .iter()
        .cycle()
        .skip(skip % cells.len())
        .take(p)
        .cloned()
        .collect();
    GridStep::new(dim, m, kept).unwrap()
}

fn schedule() -> impl Strategy<Value = Schedule> {
    (1usize..=2)
        .prop_flat_map(|dim| {
            let shape = (2u32..=5).prop_flat_map(move |m| {
                let total = (m as usize).pow(dim as u32);
                (Just(m), 2..=total)
            });
            (Just(dim), prop::collection::vec(shape, 1..=6))
        })
        .prop_flat_map(|(dim, shapes)| {
            let len = shapes.len();
            (Just(dim), Just(shapes), 1..=len)
        })
        .prop_map(|(dim, shapes, period)| {
            let steps = shapes
                .into_iter()
                .map(|(m, p)| step(dim, m, p, 0))
                .collect();
            Schedule::periodic(steps, period).unwrap()
        })
}

fn periodic_schedule() -> impl Strategy<Value = Schedule> {
    schedule().prop_map(|s| match s.rule() {
        ScheduleRule::Periodic { steps, .. } => {
            Schedule::periodic(steps.clone(), steps.len()).unwrap()
        }
        _ => unreachable!(),
    })
}

/// Direct evaluation of the step ratio range: every windowed slope is a
/// weighted mean of `ln p_i / ln m_i`.
fn ratio_range(s: &Schedule, levels: usize) -> (f64, f64) {
    (1..=levels)
        .map(|n| {
            let st = s.step(n);
            (st.p() as f64).ln() / (st.m() as f64).ln()
        })
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| {
            (a.min(r), b.max(r))
        })
}

const EPS: f64 = 1e-9;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Purely periodic schedules: the period average lies in the tangential
    /// range, and the local ratios differ from it by at most one period's
    /// worth of log counts over `ln 1/Λ_n`.
    #[test]
    fn oracle_is_ordered_and_in_range(s in periodic_schedule(), k_min in 1usize..6) {
        let depth = 1200;
        let d = oracle_dims(&s, depth, k_min).unwrap();
        let (lt, ll, ul, ut) = (
            d.lower_tangential.value,
            d.lower_local.value,
            d.upper_local.value,
            d.upper_tangential.value,
        );
        let period = match s.rule() {
            ScheduleRule::Periodic { steps, .. } => steps.len(),
            _ => unreachable!(),
        };
        let (lp, lm) = s.log_counts(period);
        let avg = lp / lm;
        prop_assert!(lt <= avg + EPS && avg <= ut + EPS);
        let slack = period as f64 * s.dim() as f64 * 5f64.ln() / s.t(depth / 2);
        prop_assert!(lt <= ll + slack && ll <= ul + EPS && ul <= ut + slack, "{d:?}");
        let (lo, hi) = ratio_range(&s, depth);
        prop_assert!(lo - EPS <= lt && ut <= hi + EPS);
        prop_assert!(ut <= s.dim() as f64 + EPS);
    }

    #[test]
    fn constant_schedule_collapses((dim, m, p) in step_shape()) {
        let s = Schedule::constant(step(dim, m, p, 0));
        let d = oracle_dims(&s, 80, 4).unwrap();
        let exact = (p as f64).ln() / (m as f64).ln();
        for (_, e) in d.rows() {
            assert_relative_eq!(e.value, exact, epsilon = 1e-9);
        }
    }

    /// Only the counts `(p_n, m_n)` matter, not which cells are kept.
    #[test]
    fn oracle_ignores_cell_positions(s in schedule(), skip in 1usize..7) {
        let moved = s
            .map_steps(60, |_, st| step(st.dim(), st.m(), st.p(), skip))
            .unwrap();
        let a = oracle_dims(&s, 60, 3).unwrap();
        let b = oracle_dims(&moved, 60, 3).unwrap();
        for ((_, x), (_, y)) in a.rows().iter().zip(b.rows()) {
            prop_assert_eq!(x.value, y.value);
        }
    }

    /// Larger `k_min` restricts the gaps, so the tangential range shrinks.
    #[test]
    fn tangential_range_shrinks_with_k_min(s in schedule(), k in 1usize..10) {
        let a = oracle_dims(&s, 100, k).unwrap();
        let b = oracle_dims(&s, 100, k + 5).unwrap();
        prop_assert!(b.lower_tangential.value >= a.lower_tangential.value - EPS);
        prop_assert!(b.upper_tangential.value <= a.upper_tangential.value + EPS);
    }

    #[test]
    fn moran_equal_ratios(p in 2usize..12, m in 2i64..20) {
        let lambda = num_rational::BigRational::new(1.into(), m.into());
        let sol = moran_dimension(&RatioList::equal(p, lambda).unwrap(), 1e-12).unwrap();
        assert_relative_eq!(sol.d, (p as f64).ln() / (m as f64).ln(), epsilon = 1e-10);
    }

    /// Enlarging one ratio enlarges the dimension.
    #[test]
    fn moran_monotone(dens in prop::collection::vec(3i64..30, 2..6), i in 0usize..6) {
        let i = i % dens.len();
        let list = |d: &[i64]| {
            d.iter().map(|x| format!("1/{x}")).collect::<Vec<_>>().join(",")
        };
        let mut bigger = dens.clone();
        bigger[i] -= 1;
        let a = moran_dimension(&RatioList::parse(&list(&dens)).unwrap(), 1e-12).unwrap();
        let b = moran_dimension(&RatioList::parse(&list(&bigger)).unwrap(), 1e-12).unwrap();
        prop_assert!(b.d > a.d);
    }
}

#[test]
fn carpet_vicsek_window_values() {
    let d = oracle_dims(&Schedule::carpet_vicsek(), 2000, 10).unwrap();
    assert_relative_eq!(
        d.lower_tangential.value,
        5f64.ln() / 3f64.ln(),
        epsilon = 1e-9
    );
    assert_relative_eq!(
        d.upper_tangential.value,
        8f64.ln() / 3f64.ln(),
        epsilon = 1e-9
    );
}
