use std::f64::consts::PI;
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use tandim_core::estimators::{
    doubling_diagnostic, metric_tangential_dims, newassum_check, sample_points,
};
use tandim_core::geometry::PointAddress;
use tandim_core::measure::{
    ball_measure, ball_measure_auto, parse_rational, MeasureExpr, MeasurePoint,
};
use tandim_core::pipeline::{run_estimate, EstimateRun};
use tandim_core::report::{dimension_csv, scale_csv, surface_csv, svg_plot};
use tandim_core::schedule::{hausdorff_nontriviality, oracle_dims, Schedule, Trend};
use tandim_core::selfsimilar::{moran_dimension, RatioList};
use tandim_core::DimensionEstimate;

use crate::args::{BallArgs, MoranArgs, RunArgs};
use crate::config::RunConfig;
use crate::error::CliError;

const ORACLE_DEPTH: usize = 2000;
const ESTIMATE_DEPTH: usize = 400;

pub fn oracle(args: &RunArgs, out: &mut String) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(args, ORACLE_DEPTH)?;
    let s = cfg.require_schedule()?;
    let dims = oracle_dims(s, cfg.estimate.depth, cfg.k_min)?;
    let csv = dimension_csv(&dims)?;
    cfg.write("oracle.csv", &csv)?;
    out.push_str(&csv);
    Ok(())
}

fn estimate_run(cfg: &RunConfig) -> Result<EstimateRun, CliError> {
    cfg.check_depth_covers_h_min()?;
    Ok(run_estimate(&cfg.measure, &cfg.point, &cfg.estimate)?)
}

fn check_ordering(dims: &DimensionEstimate) -> Result<(), CliError> {
    if dims.ordering_holds() {
        return Ok(());
    }
    let vals: Vec<String> = dims
        .rows()
        .iter()
        .map(|(n, e)| format!("{n}={}±{}", e.value, e.uncertainty))
        .collect();
    Err(CliError::Invariant(vals.join(" ")))
}

fn write_artifacts(cfg: &RunConfig, run: &EstimateRun, csv: &str) -> Result<(), CliError> {
    cfg.write("scale.csv", &scale_csv(&run.scale, cfg.exact)?)?;
    cfg.write("surface.csv", &surface_csv(&run.surface)?)?;
    cfg.write("estimates.csv", csv)?;
    if cfg.svg {
        cfg.write("plot.svg", &svg_plot(&run.scale, &run.surface, &run.dims))?;
    }
    Ok(())
}

pub fn estimate(args: &RunArgs, out: &mut String) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(args, ESTIMATE_DEPTH)?;
    let run = estimate_run(&cfg)?;
    let csv = dimension_csv(&run.dims)?;
    out.push_str(&csv);
    write_artifacts(&cfg, &run, &csv)?;
    check_ordering(&run.dims)
}

pub fn export(args: &RunArgs, out: &mut String) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(args, ESTIMATE_DEPTH)?;
    let Some(dir) = &cfg.out else {
        return Err(CliError::Config(format!(
            "export needs --out DIR (or {})",
            crate::config::OUT_ENV
        )));
    };
    let run = estimate_run(&cfg)?;
    let csv = dimension_csv(&run.dims)?;
    write_artifacts(&cfg, &run, &csv)?;
    let _ = writeln!(out, "wrote {}", dir.display());
    check_ordering(&run.dims)
}

pub fn ball(args: &BallArgs, out: &mut String) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&args.run, ESTIMATE_DEPTH)?;
    let r = parse_rational(&args.radius)?;
    let guard = cfg.estimate.guard;
    let (level, iv) = match args.level {
        Some(n) => (n, ball_measure(&cfg.measure, &cfg.point, &r, n, guard)?),
        None => {
            let (num, den) = (r.numer().magnitude(), r.denom().magnitude());
            let n = cfg.measure.anchor().level_for_radius(num, den) + guard;
            (n, ball_measure_auto(&cfg.measure, &cfg.point, &r, guard)?)
        }
    };
    let approx = |q: &BigRational| q.to_f64().unwrap_or(f64::NAN);
    let _ = writeln!(out, "level,radius,lo,hi,lo_approx,hi_approx");
    let _ = writeln!(
        out,
        "{level},{r},{},{},{:e},{:e}",
        iv.lo,
        iv.hi,
        approx(&iv.lo),
        approx(&iv.hi)
    );
    Ok(())
}

pub fn moran(args: &MoranArgs, out: &mut String) -> Result<(), CliError> {
    let ratios = RatioList::parse(&args.ratios)?;
    let sol = moran_dimension(&ratios, args.tol)?;
    let _ = writeln!(
        out,
        "d={:.12} residual={:e} iterations={}",
        sol.d, sol.residual, sol.iterations
    );
    Ok(())
}

/// Volume of the unit ball in `R^n`.
fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

struct Report<'a> {
    out: &'a mut String,
    failures: usize,
}

impl Report<'_> {
    fn line(&mut self, name: &str, pass: bool, values: &[(&str, String)]) {
        if !pass {
            self.failures += 1;
        }
        let _ = write!(self.out, "{} {name}", if pass { "PASS" } else { "FAIL" });
        for (k, v) in values {
            let _ = write!(self.out, " {k}={v}");
        }
        self.out.push('\n');
    }

    fn error(&mut self, name: &str, e: &CliError) {
        self.line(name, false, &[("error", format!("\"{e}\""))]);
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.6}")
}

pub fn check(args: &RunArgs, out: &mut String) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(args, ESTIMATE_DEPTH)?;
    let MeasureExpr::Base(s) = &cfg.measure else {
        return Err(CliError::Config(
            "check needs a single schedule measure".into(),
        ));
    };
    let MeasurePoint::Address(x) = &cfg.point else {
        return Err(CliError::Config(
            "check needs a single point address".into(),
        ));
    };
    let run = estimate_run(&cfg)?;
    let mut rep = Report { out, failures: 0 };
    let dims = &run.dims;
    let named = |d: &DimensionEstimate| -> Vec<(&str, String)> {
        d.rows().iter().map(|(n, e)| (*n, fmt(e.value))).collect()
    };

    let mut vals = named(dims);
    vals.push(("u", fmt(dims.max_uncertainty())));
    rep.line("ordering", dims.ordering_holds(), &vals);

    let oracle = oracle_dims(s, cfg.estimate.depth, cfg.k_min);
    match &oracle {
        Ok(o) => {
            let worst = dims
                .rows()
                .iter()
                .zip(o.rows())
                .map(|((_, e), (_, t))| (e.value - t.value).abs() - e.uncertainty)
                .fold(f64::NEG_INFINITY, f64::max);
            let ok = dims
                .rows()
                .iter()
                .zip(o.rows())
                .all(|((_, e), (_, t))| e.agrees_with(t.value, cfg.tol));
            let mut vals = named(o);
            vals.push(("max_excess", fmt(worst)));
            vals.push(("tol", fmt(cfg.tol)));
            rep.line("oracle_vs_estimate", ok, &vals);
        }
        Err(e) => rep.error("oracle_vs_estimate", &CliError::Core(e.clone())),
    }

    match doubling_diagnostic(&run.scale, cfg.estimate.tail_fraction) {
        Ok(d) => rep.line(
            "doubling",
            d.bounds(&dims.upper_tangential) && !d.flagged,
            &[
                ("log2_a", fmt(d.log2_a)),
                ("upper_tangential", fmt(dims.upper_tangential.value)),
                ("flagged", d.flagged.to_string()),
            ],
        ),
        Err(e) => rep.error("doubling", &e.into()),
    }

    match metric_tangential_dims(s, x, &cfg.estimate) {
        Ok(m) => {
            let dl = (m.lower.value - run.tangential.lower.value).abs();
            let du = (m.upper.value - run.tangential.upper.value).abs();
            rep.line(
                "metric_measure",
                dl <= 0.15 && du <= 0.15,
                &[
                    ("metric_lower", fmt(m.lower.value)),
                    ("metric_upper", fmt(m.upper.value)),
                    ("diff_lower", fmt(dl)),
                    ("diff_upper", fmt(du)),
                ],
            );
        }
        Err(e) => rep.error("metric_measure", &e.into()),
    }

    match newassum(s, x, &cfg) {
        Ok(vals) => {
            let pass = vals.iter().all(|(_, _, ok)| *ok);
            let vals: Vec<(&str, String)> = vals.into_iter().map(|(k, v, _)| (k, v)).collect();
            rep.line("newassum", pass, &vals);
        }
        Err(e) => rep.error("newassum", &e),
    }

    match &oracle {
        Ok(o) => {
            let d = o.lower_local.value;
            let coincide = o.rows().iter().all(|(_, e)| (e.value - d).abs() <= 1e-9);
            match hausdorff_nontriviality(s, d, cfg.estimate.depth) {
                Ok(h) => {
                    let bounded = h.trend == Trend::Bounded;
                    rep.line(
                        "hausdorff_nontriviality",
                        bounded || !coincide,
                        &[
                            ("d", fmt(d)),
                            ("min", fmt(h.min)),
                            ("argmin", h.argmin.to_string()),
                            ("trend", if bounded { "bounded" } else { "drifting" }.into()),
                        ],
                    );
                }
                Err(e) => rep.error("hausdorff_nontriviality", &e.into()),
            }
        }
        Err(e) => rep.error("hausdorff_nontriviality", &CliError::Core(e.clone())),
    }

    match rep.failures {
        0 => Ok(()),
        n => Err(CliError::CheckFailed(n)),
    }
}

/// Ball comparability at points sampled near `x`, with 16 and 32 samples.
fn newassum(
    s: &Schedule,
    x: &PointAddress,
    cfg: &RunConfig,
) -> Result<Vec<(&'static str, String, bool)>, CliError> {
    let guard = cfg.estimate.guard;
    let n0 = 20.min(cfg.estimate.depth / 4).max(1);
    let lambda = |n: usize| BigRational::new(1.into(), s.exact_counts(n).1.into());
    let radii: Vec<BigRational> = (n0.saturating_sub(8).max(1)..n0).map(lambda).collect();
    if radii.is_empty() {
        return Err(CliError::Config(format!(
            "depth {} too small for sampling",
            cfg.estimate.depth
        )));
    }
    let xp = MeasurePoint::Address(x.clone());
    let run = |count: usize| -> Result<f64, CliError> {
        let pts = sample_points(s, x, &lambda(n0), n0 + 4, count, guard)?;
        let pts: Vec<MeasurePoint> = pts.into_iter().map(MeasurePoint::Address).collect();
        Ok(newassum_check(&cfg.measure, &xp, &pts, &radii, guard)?.c_max)
    };
    let (c16, c32) = (run(16)?, run(32)?);
    let p_max = (1..=cfg.estimate.depth)
        .map(|n| s.step(n).p())
        .max()
        .unwrap_or(1);
    let n = s.dim();
    // a = 1 / (ω_N 2^N)
    let bound = p_max as f64 * unit_ball_volume(n) * 2f64.powi(n as i32);
    let stable = (c32 - c16).abs() <= 0.1 * c16;
    Ok(vec![
        ("c_max_16", fmt(c16), c16.is_finite()),
        ("c_max_32", fmt(c32), c32.is_finite() && stable),
        ("sanity_bound", fmt(bound), c32 <= bound),
    ])
}
