//! Report artifacts: the evaluation table (CSV) and the ΔSSIM/ΔVMAF scatter.
//!
//! CSV columns, in order:
//!
//! | column        | meaning                                              |
//! |---------------|------------------------------------------------------|
//! | `index`       | row number, 0 = baseline                             |
//! | `role`        | `baseline` or `candidate`                            |
//! | `family`      | `identity`, `unsharp` or `histeq`                    |
//! | `radius`      | unsharp Gaussian σ (empty otherwise)                 |
//! | `amount`      | unsharp amount (empty otherwise)                     |
//! | `kernel_size` | histeq tiles per dimension (empty otherwise)         |
//! | `clip_limit`  | histeq clip limit (empty otherwise)                  |
//! | `vmaf`        | pooled VMAF, 6 decimals                              |
//! | `ssim`        | pooled SSIM, 6 decimals                              |
//! | `psnr`        | pooled PSNR in dB, 6 decimals                        |
//! | `delta_vmaf`  | vmaf − baseline vmaf, 6 decimals                     |
//! | `delta_ssim`  | ssim − baseline ssim, 6 decimals                     |
//! | `encoded`     | `true` when the external encoder was in the loop     |
//! | `pareto`      | `true` for members of the reported front             |
//!
//! Parameters are written in shortest round-trip form. Wall-clock timings are
//! kept out of this file so that reruns compare byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use super::compare::xml_escape;
use super::{EvalRecord, ParetoReport};
use crate::enhance::{TransformFamily, TransformParams};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 14] = [
    "index",
    "role",
    "family",
    "radius",
    "amount",
    "kernel_size",
    "clip_limit",
    "vmaf",
    "ssim",
    "psnr",
    "delta_vmaf",
    "delta_ssim",
    "encoded",
    "pareto",
];

/// One parsed row of an emitted report table.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CsvRow {
    pub index: usize,
    pub role: String,
    pub family: String,
    pub radius: Option<f64>,
    pub amount: Option<f64>,
    pub kernel_size: Option<usize>,
    pub clip_limit: Option<f64>,
    pub vmaf: f64,
    pub ssim: f64,
    pub psnr: f64,
    pub delta_vmaf: f64,
    pub delta_ssim: f64,
    pub encoded: bool,
    pub pareto: bool,
}

/// Six decimals, without a negative sign on values that round to zero.
pub fn fixed6(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

fn record_fields(index: usize, record: &EvalRecord, baseline: bool, pareto: bool) -> Vec<String> {
    let empty = String::new;
    let (family, radius, amount, kernel_size, clip_limit) = if baseline {
        ("identity".to_string(), empty(), empty(), empty(), empty())
    } else {
        match record.params {
            TransformParams::UnsharpMask { radius, amount } => (
                TransformFamily::Unsharp.to_string(),
                radius.to_string(),
                amount.to_string(),
                empty(),
                empty(),
            ),
            TransformParams::HistEq {
                kernel_size,
                clip_limit,
            } => (
                TransformFamily::Histeq.to_string(),
                empty(),
                empty(),
                kernel_size.to_string(),
                clip_limit.to_string(),
            ),
        }
    };
    vec![
        index.to_string(),
        if baseline { "baseline" } else { "candidate" }.to_string(),
        family,
        radius,
        amount,
        kernel_size,
        clip_limit,
        fixed6(record.vmaf),
        fixed6(record.ssim),
        fixed6(record.psnr),
        fixed6(record.delta_vmaf),
        fixed6(record.delta_ssim),
        record.encoded.to_string(),
        pareto.to_string(),
    ]
}

fn write_rows<'a>(path: &Path, rows: impl Iterator<Item = Vec<String>> + 'a) -> Result<()> {
    let io = |e: std::io::Error| Error::write(path, e);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_path(path)
        .map_err(|e| Error::write(path, e.into()))?;
    w.write_record(CSV_HEADER).map_err(|e| io(e.into()))?;
    for row in rows {
        w.write_record(&row).map_err(|e| io(e.into()))?;
    }
    w.flush().map_err(io)
}

/// The full table: baseline row first, then every candidate in evaluation
/// order.
pub fn emit_csv(report: &ParetoReport, path: impl AsRef<Path>) -> Result<()> {
    let rows = report
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| record_fields(i, r, i == 0, report.front.contains(&i)));
    write_rows(path.as_ref(), rows)
}

/// Only the front members, with their indices into the full table.
pub fn emit_front_csv(report: &ParetoReport, path: impl AsRef<Path>) -> Result<()> {
    let rows = report
        .front
        .iter()
        .map(|&i| record_fields(i, &report.records[i], i == 0, true));
    write_rows(path.as_ref(), rows)
}

pub fn parse_csv(path: impl AsRef<Path>) -> Result<Vec<CsvRow>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::read(path, e.into()))?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| Error::read(path, e.into()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header != CSV_HEADER {
        return Err(Error::Parse {
            offset: 0,
            message: format!("unexpected report header {header:?}"),
        });
    }
    r.deserialize()
        .map(|row| {
            row.map_err(|e| Error::Parse {
                offset: e.position().map_or(0, |p| p.byte() as usize),
                message: e.to_string(),
            })
        })
        .collect()
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 48.0;
const BOTTOM: f64 = 56.0;

/// Data range that always contains 0, padded, never empty.
fn axis_range(values: impl Iterator<Item = f64>, min_half_span: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if hi - lo < 2.0 * min_half_span {
        let mid = 0.5 * (lo + hi);
        return (mid - min_half_span, mid + min_half_span);
    }
    let pad = 0.08 * (hi - lo);
    (lo - pad, hi + pad)
}

/// One point on the scatter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterPoint {
    pub delta_ssim: f64,
    pub delta_vmaf: f64,
    pub family: TransformFamily,
    pub pareto: bool,
}

/// ΔSSIM on x, ΔVMAF on y, axes through the origin. Unsharp candidates are
/// circles and histeq candidates squares; front members are filled, the rest
/// hollow. Every data marker carries class `marker`.
pub fn render_scatter(points: &[ScatterPoint], title: &str) -> String {
    let (x0, x1) = axis_range(points.iter().map(|p| p.delta_ssim), 1e-3);
    let (y0, y1) = axis_range(points.iter().map(|p| p.delta_vmaf), 1.0);
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (SVG_W - LEFT - RIGHT);
    let py = |y: f64| TOP + (y1 - y) / (y1 - y0) * (SVG_H - TOP - BOTTOM);
    let (ox, oy) = (px(0.0), py(0.0));

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SVG_W} {SVG_H}" width="{SVG_W}" height="{SVG_H}">"#
    );
    let _ = writeln!(s, "<title>{}</title>", xml_escape(title));
    let _ = writeln!(
        s,
        r##"<rect x="0" y="0" width="{SVG_W}" height="{SVG_H}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        s,
        r##"<rect class="plot-area" x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="#999999"/>"##,
        SVG_W - LEFT - RIGHT,
        SVG_H - TOP - BOTTOM
    );
    let _ = writeln!(
        s,
        r##"<line class="axis x-axis" x1="{LEFT}" y1="{oy:.2}" x2="{:.2}" y2="{oy:.2}" stroke="#000000"/>"##,
        SVG_W - RIGHT
    );
    let _ = writeln!(
        s,
        r##"<line class="axis y-axis" x1="{ox:.2}" y1="{TOP}" x2="{ox:.2}" y2="{:.2}" stroke="#000000"/>"##,
        SVG_H - BOTTOM
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">ΔSSIM</text>"#,
        LEFT + 0.5 * (SVG_W - LEFT - RIGHT),
        SVG_H - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.2})">ΔVMAF</text>"#,
        TOP + 0.5 * (SVG_H - TOP - BOTTOM),
        TOP + 0.5 * (SVG_H - TOP - BOTTOM)
    );
    for (x, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(
            s,
            r#"<text class="tick" x="{:.2}" y="{:.2}" font-size="10" text-anchor="{anchor}">{x:.4}</text>"#,
            px(x),
            SVG_H - BOTTOM + 14.0
        );
    }
    for y in [y0, y1] {
        let _ = writeln!(
            s,
            r#"<text class="tick" x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{y:.2}</text>"#,
            LEFT - 4.0,
            py(y) + 4.0
        );
    }
    let _ = writeln!(s, "<g class=\"data\">");
    for p in points
        .iter()
        .filter(|p| p.delta_ssim.is_finite() && p.delta_vmaf.is_finite())
    {
        let (cx, cy) = (px(p.delta_ssim), py(p.delta_vmaf));
        let (fill, state) = if p.pareto {
            ("#c0392b", "pareto")
        } else {
            ("none", "dominated")
        };
        let data = format!(
            r#"data-delta-ssim="{}" data-delta-vmaf="{}""#,
            p.delta_ssim, p.delta_vmaf
        );
        match p.family {
            TransformFamily::Unsharp => {
                let _ = writeln!(
                    s,
                    r##"<circle class="marker unsharp {state}" cx="{cx:.2}" cy="{cy:.2}" r="4" fill="{fill}" stroke="#c0392b" {data}/>"##
                );
            }
            TransformFamily::Histeq => {
                let _ = writeln!(
                    s,
                    r##"<rect class="marker histeq {state}" x="{:.2}" y="{:.2}" width="8" height="8" fill="{fill}" stroke="#1f618d" {data}/>"##,
                    cx - 4.0,
                    cy - 4.0
                );
            }
        }
    }
    let _ = writeln!(s, "</g>");
    let lx = SVG_W - RIGHT - 150.0;
    let _ = writeln!(
        s,
        r##"<g class="legend"><circle cx="{lx}" cy="20" r="4" fill="none" stroke="#c0392b"/><text x="{}" y="24" font-size="11">unsharp</text><rect x="{}" y="16" width="8" height="8" fill="none" stroke="#1f618d"/><text x="{}" y="24" font-size="11">histeq</text><text x="{LEFT}" y="24" font-size="11">filled = Pareto front</text></g>"##,
        lx + 8.0,
        lx + 66.0,
        lx + 78.0
    );
    s.push_str("</svg>\n");
    s
}

pub fn scatter_points(report: &ParetoReport) -> Vec<ScatterPoint> {
    report
        .records
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, r)| ScatterPoint {
            delta_ssim: r.delta_ssim,
            delta_vmaf: r.delta_vmaf,
            family: r.params.family(),
            pareto: report.front.contains(&i),
        })
        .collect()
}

/// Plots every candidate (the baseline is the origin by construction).
pub fn emit_scatter(report: &ParetoReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let points = scatter_points(report);
    if points.is_empty() {
        return Err(Error::Config("scatter plot needs at least one candidate".into()));
    }
    let title = format!(
        "ΔVMAF vs ΔSSIM, {} candidates, {} on the front",
        points.len(),
        report.front.len()
    );
    std::fs::write(path, render_scatter(&points, &title)).map_err(|e| Error::write(path, e))
}
