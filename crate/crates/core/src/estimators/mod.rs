//! Dimension estimators on sampled scale functions.
//!
//! Limits in `t` become extrema over a trailing window of samples, and the
//! sup/inf over `h` is taken over a band of natural-scale gaps starting at
//! `h_min`. Every estimate carries the slack
//! `(max f width) (1/h_min + 1/t_min)` or its analogue.

mod covering;
mod local;
mod newassum;
mod surface;

pub use covering::{covering_counts, metric_tangential_dims};
pub use local::{doubling_diagnostic, local_dims, DoublingReport, MIN_TAIL_SAMPLES};
pub use newassum::{
    ball_measure_extrema, newassum_check, sample_points, BallExtrema, NewAssumReport,
};
pub use surface::{
    extremal_level_sequence, joint_extremes, tangential_dims, SlopeColumn, SlopeEntry,
    SlopeSurface, TangentialDims, Target, MIN_COLUMNS,
};

use crate::error::{Error, Result};

/// Window parameters shared by the estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateConfig {
    /// Levels `1..=depth` are sampled.
    pub depth: usize,
    pub guard: usize,
    /// Trailing fraction of samples used for liminf/limsup in `t`.
    pub tail_fraction: f64,
    /// Smallest `h` (in units of `t`) entering the sup/inf over `h`.
    pub h_min: f64,
    /// Number of gap columns in the band starting at `h_min`.
    pub h_columns: usize,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            depth: 400,
            guard: 4,
            tail_fraction: 0.5,
            h_min: 20.0 * 3f64.ln(),
            h_columns: MIN_COLUMNS,
        }
    }
}

impl EstimateConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tail_fraction > 0.0 && self.tail_fraction <= 1.0) {
            return Err(Error::Argument(format!(
                "tail fraction {} not in (0, 1]",
                self.tail_fraction
            )));
        }
        if !(self.h_min > 0.0 && self.h_min.is_finite()) {
            return Err(Error::Argument(format!(
                "h_min {} must be positive",
                self.h_min
            )));
        }
        if self.h_columns < MIN_COLUMNS {
            return Err(Error::Argument(format!(
                "need at least {MIN_COLUMNS} gap columns, got {}",
                self.h_columns
            )));
        }
        if self.depth < 2 {
            return Err(Error::Window(format!("depth {} too small", self.depth)));
        }
        Ok(())
    }
}
