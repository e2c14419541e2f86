//! Scale function → slope surface → the four dimensions.

use crate::error::Result;
use crate::estimate::DimensionEstimate;
use crate::estimators::{
    local_dims, tangential_dims, EstimateConfig, SlopeSurface, TangentialDims,
};
use crate::measure::{f_samples, MeasureExpr, MeasurePoint, ScaleFunction};

#[derive(Debug, Clone)]
pub struct EstimateRun {
    pub scale: ScaleFunction,
    /// The gap band used for the tangential dimensions.
    pub surface: SlopeSurface,
    pub tangential: TangentialDims,
    pub dims: DimensionEstimate,
}

/// Samples `f` at levels `1..=depth` of the anchor schedule and estimates
/// `δ̲, d̲, d̄, δ̄` on the trailing window.
pub fn run_estimate(
    e: &MeasureExpr,
    x: &MeasurePoint,
    cfg: &EstimateConfig,
) -> Result<EstimateRun> {
    cfg.validate()?;
    let levels: Vec<usize> = (1..=cfg.depth).collect();
    let scale = f_samples(e, x, &levels, cfg.guard)?;
    run_on_scale(scale, cfg)
}

/// As [`run_estimate`] on an already sampled scale function.
pub fn run_on_scale(scale: ScaleFunction, cfg: &EstimateConfig) -> Result<EstimateRun> {
    let surface = SlopeSurface::band(&scale, cfg.tail_fraction, cfg.h_min, cfg.h_columns)?;
    let tangential = tangential_dims(&surface, cfg.h_min)?;
    let (lower_local, upper_local) = local_dims(&scale, cfg.tail_fraction)?;
    let dims = DimensionEstimate {
        lower_tangential: tangential.lower,
        lower_local,
        upper_local,
        upper_tangential: tangential.upper,
    };
    Ok(EstimateRun {
        scale,
        surface,
        tangential,
        dims,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::Schedule;

    #[test]
    fn cantor_depth_60() {
        let e = MeasureExpr::base(Schedule::cantor());
        let cfg = EstimateConfig {
            depth: 60,
            ..EstimateConfig::default()
        };
        let run = run_estimate(&e, &MeasurePoint::first_kept(), &cfg).unwrap();
        let d = 2f64.ln() / 3f64.ln();
        for (name, est) in run.dims.rows() {
            assert!(est.agrees_with(d, 0.01), "{name}: {est:?}");
        }
        assert!(run.dims.ordering_holds());
    }

    #[test]
    fn product_of_cantor_local_dims() {
        let c = MeasureExpr::base(Schedule::cantor());
        let e = MeasureExpr::product(c.clone(), c);
        let cfg = EstimateConfig {
            depth: 60,
            ..EstimateConfig::default()
        };
        let run = run_estimate(&e, &MeasurePoint::first_kept(), &cfg).unwrap();
        let d = 2.0 * 2f64.ln() / 3f64.ln();
        assert!((run.dims.lower_local.value - d).abs() < 0.02);
        assert!((run.dims.upper_local.value - d).abs() < 0.02);
    }

    #[test]
    fn shallow_depth_is_a_window_error() {
        let e = MeasureExpr::base(Schedule::cantor());
        let cfg = EstimateConfig {
            depth: 30,
            ..EstimateConfig::default()
        };
        assert!(matches!(
            run_estimate(&e, &MeasurePoint::first_kept(), &cfg),
            Err(crate::Error::Window(_))
        ));
    }
}
