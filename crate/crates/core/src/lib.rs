//! Translation fractals, certified ball measures of their limit measures, and
//! estimators of local and tangential dimensions.

pub mod error;
pub mod estimate;
pub mod estimators;
pub mod geometry;
mod logs;
pub mod measure;
pub mod pipeline;
pub mod report;
pub mod schedule;
pub mod selfsimilar;

pub use error::{Error, Result};
pub use estimate::{DimensionEstimate, Estimate, Window};
