//! Resolution of flags, config file and environment into a validated run
//! configuration. Precedence: flags, then `TANDIM_OUT` (output directory
//! only), then the config file, then defaults.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use tandim_core::estimators::EstimateConfig;
use tandim_core::measure::{parse_measure, MeasureExpr, MeasurePoint};
use tandim_core::schedule::{parse_schedule, Schedule};

use crate::args::RunArgs;
use crate::error::CliError;

pub const OUT_ENV: &str = "TANDIM_OUT";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    schedule: Option<PathBuf>,
    generator: Option<String>,
    measure: Option<String>,
    point: Option<String>,
    depth: Option<usize>,
    guard: Option<usize>,
    h_min: Option<f64>,
    h_columns: Option<usize>,
    k_min: Option<usize>,
    tail_fraction: Option<f64>,
    tol: Option<f64>,
    exact: Option<bool>,
    svg: Option<bool>,
    out: Option<PathBuf>,
}

#[derive(Debug)]
pub struct RunConfig {
    /// Loaded schedule, when one was named.
    pub schedule: Option<Arc<Schedule>>,
    pub measure: MeasureExpr,
    pub point: MeasurePoint,
    pub estimate: EstimateConfig,
    pub k_min: usize,
    pub tol: f64,
    pub exact: bool,
    pub svg: bool,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Resolves and validates everything before any computation.
    pub fn resolve(args: &RunArgs, default_depth: usize) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => {
                let text = read(path)?;
                toml::from_str::<FileConfig>(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };

        let schedule_path = args.schedule.clone().or(if args.generator.is_none() {
            file.schedule.clone()
        } else {
            None
        });
        let generator = args.generator.clone().or(if args.schedule.is_none() {
            file.generator.clone()
        } else {
            None
        });
        let schedule = match (schedule_path, generator) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "give either a schedule file or a generator, not both".into(),
                ))
            }
            (Some(path), None) => Some(Arc::new(parse_schedule(&read(&path)?)?)),
            (None, Some(name)) => Some(Arc::new(
                Schedule::named(&name).map_err(|e| CliError::Config(e.to_string()))?,
            )),
            (None, None) => None,
        };

        let measure = match args.measure.clone().or(file.measure) {
            Some(expr) => parse_measure(&expr, |name| match (name, &schedule) {
                ("schedule", Some(s)) => Ok(Schedule::clone(s)),
                _ => Schedule::named(name),
            })?,
            None => match &schedule {
                Some(s) => MeasureExpr::Base(s.clone()),
                None => {
                    return Err(CliError::Config(
                        "need --schedule, --generator or --measure".into(),
                    ))
                }
            },
        };
        let point = match args.point.clone().or(file.point) {
            Some(spec) => MeasurePoint::parse(&spec)?,
            None => MeasurePoint::first_kept(),
        };
        if let MeasurePoint::Address(addr) = &point {
            if !matches!(measure, MeasureExpr::Product(..)) {
                // every level of the prefix and one full tail cycle
                addr.truncate(measure.anchor(), addr.prefix().len() + 8)?;
            }
        }

        let defaults = EstimateConfig::default();
        let estimate = EstimateConfig {
            depth: args.depth.or(file.depth).unwrap_or(default_depth),
            guard: args.guard.or(file.guard).unwrap_or(defaults.guard),
            tail_fraction: args
                .tail_fraction
                .or(file.tail_fraction)
                .unwrap_or(defaults.tail_fraction),
            h_min: args.h_min.or(file.h_min).unwrap_or(defaults.h_min),
            h_columns: args
                .h_columns
                .or(file.h_columns)
                .unwrap_or(defaults.h_columns),
        };
        estimate.validate()?;
        let k_min = args.k_min.or(file.k_min).unwrap_or(10);
        let tol = args.tol.or(file.tol).unwrap_or(0.1);
        if tol.is_nan() || tol <= 0.0 {
            return Err(CliError::Config(format!(
                "tolerance {tol} must be positive"
            )));
        }
        let out = args
            .out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .or(file.out);
        if let Some(dir) = &out {
            ensure_writable(dir)?;
        }
        Ok(RunConfig {
            schedule,
            measure,
            point,
            estimate,
            k_min,
            tol,
            exact: args.exact || file.exact.unwrap_or(false),
            svg: args.svg || file.svg.unwrap_or(false),
            out,
        })
    }

    pub fn require_schedule(&self) -> Result<&Arc<Schedule>, CliError> {
        self.schedule
            .as_ref()
            .ok_or_else(|| CliError::Config("this command needs --schedule or --generator".into()))
    }

    /// `depth >= 2 * (h_min in levels of the anchor schedule)`.
    pub fn check_depth_covers_h_min(&self) -> Result<(), CliError> {
        let anchor = self.measure.anchor();
        let cfg = &self.estimate;
        let mut k = 0;
        while anchor.t(k) < cfg.h_min - 1e-9 {
            k += 1;
        }
        if cfg.depth < 2 * k {
            return Err(CliError::Config(format!(
                "depth {} is below twice h_min in levels ({k})",
                cfg.depth
            )));
        }
        Ok(())
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<Option<PathBuf>, CliError> {
        let Some(dir) = &self.out else {
            return Ok(None);
        };
        let path = dir.join(name);
        fs::write(&path, contents)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok(Some(path))
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn ensure_writable(dir: &Path) -> Result<(), CliError> {
    let fail =
        |e: std::io::Error| CliError::Config(format!("output directory {}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(fail)?;
    let probe = dir.join(".tandim-write-probe");
    fs::write(&probe, b"").map_err(fail)?;
    fs::remove_file(&probe).map_err(fail)
}
