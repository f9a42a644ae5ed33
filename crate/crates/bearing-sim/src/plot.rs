//! Self-contained SVG plots of a run: bearing components, observer angle
//! errors, and measurement error with outlier markers.
//!
//! Output is deterministic for fixed input: coordinates are formatted with
//! fixed precision and no timestamps or random ids are embedded. Long runs
//! are downsampled to at most ~2000 polyline vertices per curve; outlier
//! markers are never downsampled.

use std::path::Path;

use thiserror::Error;

use crate::csv::{write_text, OutputError};
use crate::run::Record;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("cannot plot an empty record sequence")]
    Empty,
    #[error(transparent)]
    Output(#[from] OutputError),
}

/// Which estimate column panel (a) draws as the solid curves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateSource {
    Equivariant,
    Naive,
}

const WIDTH: f64 = 900.0;
const PANEL_HEIGHT: f64 = 240.0;
const PANEL_GAP: f64 = 46.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 34.0;
const LOG_FLOOR_DEG: f64 = 1e-4;
const LOG_CEIL_DEG: f64 = 200.0;

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    tmin: f64,
    tmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Frame {
    fn map_x(&self, t: f64) -> f64 {
        self.x0 + (t - self.tmin) / (self.tmax - self.tmin) * self.w
    }

    fn map_y(&self, v: f64) -> f64 {
        self.y0 + self.h - (v - self.ymin) / (self.ymax - self.ymin) * self.h
    }
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

fn polyline(out: &mut String, frame: &Frame, pts: &[(f64, f64)], style: &str) {
    out.push_str(r#"<polyline fill="none" "#);
    out.push_str(style);
    out.push_str(r#" points=""#);
    for (i, (t, v)) in pts.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&px(frame.map_x(*t)));
        out.push(',');
        out.push_str(&px(frame.map_y(*v)));
    }
    out.push_str("\"/>\n");
}

fn text(out: &mut String, x: f64, y: f64, anchor: &str, content: &str) {
    out.push_str(&format!(
        r##"<text x="{}" y="{}" text-anchor="{anchor}" font-family="monospace" font-size="11" fill="#333">{content}</text>"##,
        px(x),
        px(y)
    ));
    out.push('\n');
}

fn frame_box(out: &mut String, frame: &Frame, title: &str, ylabel: &str) {
    out.push_str(&format!(
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#999" stroke-width="1"/>"##,
        px(frame.x0),
        px(frame.y0),
        px(frame.w),
        px(frame.h)
    ));
    out.push('\n');
    text(out, frame.x0, frame.y0 - 8.0, "start", title);
    out.push_str(&format!(
        r##"<text x="{}" y="{}" text-anchor="middle" font-family="monospace" font-size="11" fill="#333" transform="rotate(-90 {} {})">{ylabel}</text>"##,
        px(frame.x0 - 46.0),
        px(frame.y0 + frame.h / 2.0),
        px(frame.x0 - 46.0),
        px(frame.y0 + frame.h / 2.0)
    ));
    out.push('\n');
    // Time ticks at quarters.
    for q in 0..=4 {
        let t = frame.tmin + (frame.tmax - frame.tmin) * q as f64 / 4.0;
        let x = frame.map_x(t);
        out.push_str(&format!(
            r##"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#999" stroke-width="1"/>"##,
            px(x),
            px(frame.y0 + frame.h),
            px(frame.y0 + frame.h + 4.0)
        ));
        out.push('\n');
        text(out, x, frame.y0 + frame.h + 16.0, "middle", &format!("{t:.1}"));
    }
    text(out, frame.x0 + frame.w / 2.0, frame.y0 + frame.h + 30.0, "middle", "t [s]");
}

fn log_ticks(out: &mut String, frame: &Frame) {
    let mut decade = -4;
    while decade <= 2 {
        let v = decade as f64;
        if v >= frame.ymin && v <= frame.ymax {
            let y = frame.map_y(v);
            out.push_str(&format!(
                r##"<line x1="{0}" y1="{2}" x2="{1}" y2="{2}" stroke="#e5e5e5" stroke-width="1"/>"##,
                px(frame.x0),
                px(frame.x0 + frame.w),
                px(y)
            ));
            out.push('\n');
            text(out, frame.x0 - 6.0, y + 4.0, "end", &format!("1e{decade}"));
        }
        decade += 1;
    }
}

fn linear_ticks(out: &mut String, frame: &Frame, values: &[f64]) {
    for &v in values {
        let y = frame.map_y(v);
        out.push_str(&format!(
            r##"<line x1="{0}" y1="{2}" x2="{1}" y2="{2}" stroke="#e5e5e5" stroke-width="1"/>"##,
            px(frame.x0),
            px(frame.x0 + frame.w),
            px(y)
        ));
        out.push('\n');
        text(out, frame.x0 - 6.0, y + 4.0, "end", &format!("{v:.1}"));
    }
}

fn log_deg(angle_rad: f64) -> f64 {
    angle_rad.to_degrees().clamp(LOG_FLOOR_DEG, LOG_CEIL_DEG).log10()
}

fn stride(n: usize) -> usize {
    n.div_ceil(2000).max(1)
}

/// Indices used for polylines: every stride-th record plus the last.
fn sampled(n: usize) -> Vec<usize> {
    let s = stride(n);
    let mut idx: Vec<usize> = (0..n).step_by(s).collect();
    if *idx.last().unwrap() != n - 1 {
        idx.push(n - 1);
    }
    idx
}

pub fn render_svg(records: &[Record], source: EstimateSource) -> Result<String, PlotError> {
    if records.is_empty() {
        return Err(PlotError::Empty);
    }
    let n = records.len();
    let idx = sampled(n);
    let tmin = records[0].t;
    let tmax = records[n - 1].t.max(tmin + 1e-9);
    let total_h = MARGIN_TOP + 3.0 * PANEL_HEIGHT + 2.0 * PANEL_GAP + 44.0;

    let mut out = String::with_capacity(256 * 1024);
    out.push_str(&format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        WIDTH, total_h, WIDTH, total_h
    ));
    out.push('\n');
    out.push_str(&format!(
        r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#,
        WIDTH, total_h
    ));
    out.push('\n');

    let frame_at = |row: f64, ymin: f64, ymax: f64| Frame {
        x0: MARGIN_LEFT,
        y0: MARGIN_TOP + row * (PANEL_HEIGHT + PANEL_GAP),
        w: WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        h: PANEL_HEIGHT,
        tmin,
        tmax,
        ymin,
        ymax,
    };

    // Panel (a): bearing components, truth dashed, estimate solid.
    let fa = frame_at(0.0, -1.05, 1.05);
    out.push_str("<g id=\"panel-components\">\n");
    frame_box(
        &mut out,
        &fa,
        match source {
            EstimateSource::Equivariant => {
                "bearing components: truth (dashed) vs equivariant estimate (solid)"
            }
            EstimateSource::Naive => "bearing components: truth (dashed) vs naive estimate (solid)",
        },
        "component",
    );
    linear_ticks(&mut out, &fa, &[-1.0, 0.0, 1.0]);
    let colors = ["#1f77b4", "#2ca02c", "#9467bd"];
    let comp = |v: &bearing_core::Vector3, axis: usize| match axis {
        0 => v.x,
        1 => v.y,
        _ => v.z,
    };
    for axis in 0..3 {
        let truth: Vec<(f64, f64)> =
            idx.iter().map(|&i| (records[i].t, comp(&records[i].xi, axis))).collect();
        let est: Vec<(f64, f64)> = idx
            .iter()
            .map(|&i| {
                let v = match source {
                    EstimateSource::Equivariant => &records[i].xihat_eqv,
                    EstimateSource::Naive => &records[i].xihat_naive,
                };
                (records[i].t, comp(v, axis))
            })
            .collect();
        let c = colors[axis];
        polyline(
            &mut out,
            &fa,
            &truth,
            &format!(r#"stroke="{c}" stroke-width="1.2" stroke-dasharray="6 4""#),
        );
        polyline(&mut out, &fa, &est, &format!(r#"stroke="{c}" stroke-width="1.2""#));
    }
    let axis_names = ["x", "y", "z"];
    for axis in 0..3 {
        text(
            &mut out,
            fa.x0 + 60.0 + 50.0 * axis as f64,
            fa.y0 + 14.0,
            "start",
            &format!(r#"<tspan fill="{}">{}</tspan>"#, colors[axis], axis_names[axis]),
        );
    }
    out.push_str("</g>\n");

    // Panel (b): observer angle errors, log degrees.
    let fb = frame_at(1.0, LOG_FLOOR_DEG.log10(), LOG_CEIL_DEG.log10());
    out.push_str("<g id=\"panel-angle-error\">\n");
    frame_box(&mut out, &fb, "angle error [deg, log]: equivariant (blue) vs naive (orange)", "deg");
    log_ticks(&mut out, &fb);
    let eqv: Vec<(f64, f64)> =
        idx.iter().map(|&i| (records[i].t, log_deg(records[i].angle_err_eqv))).collect();
    let naive: Vec<(f64, f64)> =
        idx.iter().map(|&i| (records[i].t, log_deg(records[i].angle_err_naive))).collect();
    polyline(&mut out, &fb, &eqv, r##"stroke="#1f77b4" stroke-width="1.2""##);
    polyline(&mut out, &fb, &naive, r##"stroke="#ff7f0e" stroke-width="1.2""##);
    out.push_str("</g>\n");

    // Panel (c): measurement error with outlier markers.
    let fc = frame_at(2.0, LOG_FLOOR_DEG.log10(), LOG_CEIL_DEG.log10());
    out.push_str("<g id=\"panel-measurement-error\">\n");
    frame_box(&mut out, &fc, "measurement angle error [deg, log] with outliers marked", "deg");
    log_ticks(&mut out, &fc);
    let meas_err = |r: &Record| r.y.dot(r.xi).clamp(-1.0, 1.0).acos();
    let meas: Vec<(f64, f64)> =
        idx.iter().map(|&i| (records[i].t, log_deg(meas_err(&records[i])))).collect();
    polyline(&mut out, &fc, &meas, r##"stroke="#2a9d8f" stroke-width="1.0""##);
    for r in records.iter().filter(|r| r.outlier) {
        out.push_str(&format!(
            r##"<circle cx="{}" cy="{}" r="2.4" fill="none" stroke="#d62728" stroke-width="1"/>"##,
            px(fc.map_x(r.t)),
            px(fc.map_y(log_deg(meas_err(r))))
        ));
        out.push('\n');
    }
    out.push_str("</g>\n");

    out.push_str("</svg>\n");
    Ok(out)
}

/// Writes the plot with the equivariant estimate in panel (a).
pub fn write_plot(records: &[Record], path: &Path) -> Result<(), PlotError> {
    write_plot_with(records, path, EstimateSource::Equivariant)
}

pub fn write_plot_with(
    records: &[Record],
    path: &Path,
    source: EstimateSource,
) -> Result<(), PlotError> {
    let svg = render_svg(records, source)?;
    write_text(&svg, path)?;
    Ok(())
}
