//! Side-by-side comparison artifacts: checkerboard composites and luma
//! histograms.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::media::Frame;
use crate::plane::Plane;

/// Alternating `tile`×`tile` blocks, reference first (top-left block).
pub fn checkerboard(reference: &Frame, distorted: &Frame, tile: usize) -> Result<Plane<u16>> {
    if tile == 0 {
        return Err(Error::Config("checkerboard tile must be at least 1 pixel".into()));
    }
    if reference.meta() != distorted.meta() {
        let (a, b) = (reference.meta(), distorted.meta());
        return Err(Error::shape(format!(
            "checkerboard needs equal frames: {}x{}@{}bit vs {}x{}@{}bit",
            a.width, a.height, a.bit_depth, b.width, b.height, b.bit_depth
        )));
    }
    let (r, d) = (reference.luma(), distorted.luma());
    Ok(Plane::from_fn(r.width(), r.height(), |x, y| {
        if (x / tile + y / tile).is_multiple_of(2) {
            r.get(x, y)
        } else {
            d.get(x, y)
        }
    }))
}

/// Binary PGM; samples above 255 are written as 16-bit big-endian.
fn write_pgm(plane: &Plane<u16>, max_value: u16, path: &Path) -> Result<()> {
    let mut bytes = format!("P5\n{} {}\n{}\n", plane.width(), plane.height(), max_value).into_bytes();
    for &v in plane.data() {
        if max_value > 255 {
            bytes.extend_from_slice(&v.to_be_bytes());
        } else {
            bytes.push(v as u8);
        }
    }
    std::fs::write(path, bytes).map_err(|e| Error::write(path, e))
}

pub fn emit_checkerboard(reference: &Frame, distorted: &Frame, tile: usize, path: impl AsRef<Path>) -> Result<()> {
    let plane = checkerboard(reference, distorted, tile)?;
    write_pgm(&plane, reference.meta().max_value(), path.as_ref())
}

/// Luma sample counts, one bin per code value.
pub fn luma_histogram(frame: &Frame) -> Vec<u64> {
    let mut bins = vec![0u64; 1usize << frame.meta().bit_depth];
    for &v in frame.luma().data() {
        bins[v as usize] += 1;
    }
    bins
}

pub fn histogram_csv(bins: &[u64]) -> String {
    let mut out = String::from("value,count\n");
    for (v, c) in bins.iter().enumerate() {
        let _ = writeln!(out, "{v},{c}");
    }
    out
}

pub fn render_histogram_svg(bins: &[u64], title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 320.0;
    const MARGIN: f64 = 30.0;
    let peak = bins.iter().copied().max().unwrap_or(0).max(1) as f64;
    let bar_w = (W - 2.0 * MARGIN) / bins.len().max(1) as f64;
    let plot_h = H - 2.0 * MARGIN;
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" width="{W}" height="{H}">"#
    );
    let _ = writeln!(svg, "<title>{}</title>", xml_escape(title));
    let _ = writeln!(svg, r##"<rect x="0" y="0" width="{W}" height="{H}" fill="#ffffff"/>"##);
    for (v, &c) in bins.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let h = plot_h * c as f64 / peak;
        let _ = writeln!(
            svg,
            r##"<rect class="bar" data-value="{v}" data-count="{c}" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="#3b6ea5"/>"##,
            MARGIN + v as f64 * bar_w,
            MARGIN + plot_h - h,
            bar_w.max(0.5),
            h
        );
    }
    let _ = writeln!(
        svg,
        r##"<line class="axis" x1="{MARGIN}" y1="{y}" x2="{x2}" y2="{y}" stroke="#000000"/>"##,
        y = H - MARGIN,
        x2 = W - MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="{}" font-size="11">0</text><text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
        H - 10.0,
        W - MARGIN,
        H - 10.0,
        bins.len().saturating_sub(1)
    );
    svg.push_str("</svg>\n");
    svg
}

/// Writes the histogram as CSV at `path` and as an SVG bar chart next to it
/// (same stem, `.svg` extension).
pub fn emit_histogram(frame: &Frame, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bins = luma_histogram(frame);
    std::fs::write(path, histogram_csv(&bins)).map_err(|e| Error::write(path, e))?;
    let svg_path = path.with_extension("svg");
    let title = format!("luma histogram, {} bins", bins.len());
    std::fs::write(&svg_path, render_histogram_svg(&bins, &title)).map_err(|e| Error::write(&svg_path, e))
}

pub(crate) fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}
