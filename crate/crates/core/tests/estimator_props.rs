use std::f64::consts::LN_2;

use tandim_core::estimators::{doubling_diagnostic, local_dims, EstimateConfig};
use tandim_core::measure::{f_samples, MeasureExpr, MeasurePoint, ScaleFunction};
use tandim_core::pipeline::run_on_scale;
use tandim_core::schedule::Schedule;

fn carpet_vicsek_scale(depth: usize) -> ScaleFunction {
    let e = MeasureExpr::base(Schedule::carpet_vicsek());
    let levels: Vec<usize> = (1..=depth).collect();
    f_samples(&e, &MeasurePoint::first_kept(), &levels, 4).unwrap()
}

/// Longer gaps average over more of the schedule, so the lower tangential
/// estimate does not drop (and the upper does not rise) beyond slack.
#[test]
fn h_min_monotonicity() {
    let sf = carpet_vicsek_scale(400);
    let ln3 = 3f64.ln();
    let mut prev: Option<(f64, f64, f64)> = None;
    for h in [20.0, 24.0, 30.0, 40.0] {
        let cfg = EstimateConfig {
            depth: 400,
            h_min: h * ln3,
            ..EstimateConfig::default()
        };
        let run = run_on_scale(sf.clone(), &cfg).unwrap();
        let (lo, hi, u) = (
            run.tangential.lower.value,
            run.tangential.upper.value,
            run.tangential.lower.uncertainty,
        );
        if let Some((plo, phi, pu)) = prev {
            assert!(lo >= plo - (u + pu), "h_min {h}: {lo} < {plo}");
            assert!(hi <= phi + (u + pu), "h_min {h}: {hi} > {phi}");
        }
        assert!(run.dims.ordering_holds(), "{:?}", run.dims);
        prev = Some((lo, hi, u));
    }
}

#[test]
fn local_dims_bracket_tangential() {
    let sf = carpet_vicsek_scale(300);
    let cfg = EstimateConfig {
        depth: 300,
        ..EstimateConfig::default()
    };
    let run = run_on_scale(sf.clone(), &cfg).unwrap();
    let (lo, hi) = local_dims(&sf, 0.5).unwrap();
    assert!(lo.value <= hi.value);
    assert!(run.tangential.lower.value <= lo.value + lo.uncertainty);
    assert!(hi.value <= run.tangential.upper.value + hi.uncertainty);
    // certified bounds sit outside the midpoint values
    assert!(run.tangential.certified_lower <= run.tangential.lower.value);
    assert!(run.tangential.certified_upper >= run.tangential.upper.value);
}

#[test]
fn doubling_rejects_sparse_sampling() {
    let e = MeasureExpr::base(Schedule::cantor());
    // every third level: t steps of 3 ln 3 > 3 ln 2
    let levels: Vec<usize> = (1..=30).map(|k| 3 * k).collect();
    let sf = f_samples(&e, &MeasurePoint::first_kept(), &levels, 4).unwrap();
    assert!(doubling_diagnostic(&sf, 0.5).is_err());
    let dense: Vec<usize> = (1..=60).collect();
    let sf = f_samples(&e, &MeasurePoint::first_kept(), &dense, 4).unwrap();
    let d = doubling_diagnostic(&sf, 0.5).unwrap();
    assert!(d.max_spacing <= 3.0 * LN_2 && !d.flagged);
    assert!(d.log2_a >= 2f64.ln() / 3f64.ln());
}
