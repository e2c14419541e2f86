//! CSV and SVG emission. Row order is fixed by the data (levels, gaps,
//! quantities), never by evaluation order.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::estimate::{DimensionEstimate, Estimate};
use crate::estimators::SlopeSurface;
use crate::measure::ScaleFunction;

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Argument(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Argument(format!("csv: {e}")))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Argument(format!("csv: {e}"))
}

/// `level,t,f_lo,f_hi`; with `exact`, the measure bounds follow as
/// `mu_lo,mu_hi` in `num/den` form.
pub fn scale_csv(sf: &ScaleFunction, exact: bool) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["level", "t", "f_lo", "f_hi"];
    if exact {
        header.extend(["mu_lo", "mu_hi"]);
    }
    w.write_record(&header).map_err(csv_err)?;
    for s in sf.samples() {
        let mut row = vec![
            s.level.to_string(),
            s.t.to_string(),
            s.f_lo.to_string(),
            s.f_hi.to_string(),
        ];
        if exact {
            row.push(s.measure.lo.to_string());
            row.push(s.measure.hi.to_string());
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    finish(w)
}

/// `t,h,g_lo_over_h,g_hi_over_h`, by gap then `t`.
pub fn surface_csv(surf: &SlopeSurface) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "h", "g_lo_over_h", "g_hi_over_h"])
        .map_err(csv_err)?;
    for e in surf.entries() {
        w.write_record([
            e.t.to_string(),
            e.h.to_string(),
            e.lo.to_string(),
            e.hi.to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

/// `quantity,value,uncertainty,window`.
pub fn estimates_csv<'a>(
    rows: impl IntoIterator<Item = (&'a str, &'a Estimate)>,
) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["quantity", "value", "uncertainty", "window"])
        .map_err(csv_err)?;
    for (name, e) in rows {
        w.write_record([
            name.to_string(),
            e.value.to_string(),
            e.uncertainty.to_string(),
            e.window.to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

pub fn dimension_csv(d: &DimensionEstimate) -> Result<String> {
    estimates_csv(d.rows())
}

/// Static plot: `f(t)/t` against `t`, with the band `[min, max]` of the
/// midpoint slopes for each gap column drawn as horizontal bars, and the
/// four estimates as dashed lines.
pub fn svg_plot(sf: &ScaleFunction, surf: &SlopeSurface, dims: &DimensionEstimate) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 40.0;
    let pts: Vec<(f64, f64)> = sf
        .samples()
        .iter()
        .filter(|s| s.t > 0.0 && s.f_mid().is_finite())
        .map(|s| (s.t, s.f_mid() / s.t))
        .collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    if pts.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let t_max = pts.iter().map(|p| p.0).fold(0.0, f64::max);
    let rows = dims.rows();
    let ys = pts
        .iter()
        .map(|p| p.1)
        .chain(surf.entries().map(|e| e.mid))
        .chain(rows.iter().map(|(_, e)| e.value));
    let (y_lo, y_hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| {
        (a.min(y), b.max(y))
    });
    let (y_lo, y_hi) = (y_lo - 0.05, y_hi + 0.05);
    let sx = |t: f64| PAD + (W - 2.0 * PAD) * t / t_max;
    let sy = |y: f64| H - PAD - (H - 2.0 * PAD) * (y - y_lo) / (y_hi - y_lo);

    let _ = writeln!(
        svg,
        r##"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="#999"/>"##,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    for col in surf.columns() {
        let (lo, hi) = col
            .entries
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), e| {
                (a.min(e.mid), b.max(e.mid))
            });
        let (t0, t1) = (col.entries[0].t, col.entries[col.entries.len() - 1].t);
        let _ = writeln!(
            svg,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#4a90d9" fill-opacity="0.12"/>"##,
            sx(t0),
            sy(hi),
            sx(t1) - sx(t0),
            sy(lo) - sy(hi)
        );
    }
    let path: Vec<String> = pts
        .iter()
        .map(|&(t, y)| format!("{:.2},{:.2}", sx(t), sy(y)))
        .collect();
    let _ = writeln!(
        svg,
        r##"<polyline points="{}" fill="none" stroke="#222" stroke-width="1.2"/>"##,
        path.join(" ")
    );
    for (name, e) in dims.rows() {
        let y = sy(e.value);
        let _ = writeln!(
            svg,
            r##"<line x1="{PAD}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#c0392b" stroke-dasharray="4 3"/>"##,
            W - PAD
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="10">{name} {:.4}</text>"#,
            W - PAD - 150.0,
            y - 2.0,
            e.value
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{PAD}" y="{:.2}" font-size="11">t = ln 1/r (0 .. {t_max:.1}); f(t)/t in [{y_lo:.3}, {y_hi:.3}]</text>"#,
        H - 12.0
    );
    svg.push_str("</svg>\n");
    svg
}
