//! Contrast-limited adaptive histogram equalization.
//!
//! The frame is split into `kernel_size × kernel_size` tiles. Each tile gets
//! a lookup table from its clipped histogram; every pixel blends the tables
//! of the (up to four) nearest tile centres bilinearly.

use crate::enhance::to_sample;
use crate::error::{Error, Result};
use crate::media::Frame;
use crate::plane::Plane;

/// Tile boundaries along one axis: tile `i` covers `[edges[i], edges[i + 1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct TileGrid {
    pub edges: Vec<usize>,
}

impl TileGrid {
    pub fn new(len: usize, tiles: usize) -> Self {
        Self {
            edges: (0..=tiles).map(|i| i * len / tiles).collect(),
        }
    }

    pub fn tiles(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn center(&self, i: usize) -> f64 {
        (self.edges[i] + self.edges[i + 1] - 1) as f64 / 2.0
    }

    /// Neighbouring tile indices and the weight of the second one.
    fn locate(&self, pos: f64) -> (usize, usize, f64) {
        let last = self.tiles() - 1;
        if pos <= self.center(0) {
            return (0, 0, 0.0);
        }
        if pos >= self.center(last) {
            return (last, last, 0.0);
        }
        let mut i = 0;
        while self.center(i + 1) <= pos {
            i += 1;
        }
        let (c0, c1) = (self.center(i), self.center(i + 1));
        (i, i + 1, (pos - c0) / (c1 - c0))
    }
}

/// Lookup table for one tile's samples.
fn tile_lut(samples: impl Iterator<Item = u16>, n_bins: usize, clip_limit: f64) -> Vec<f64> {
    let mut hist = vec![0.0f64; n_bins];
    let mut count = 0usize;
    for s in samples {
        hist[s as usize] += 1.0;
        count += 1;
    }
    let max = (n_bins - 1) as f64;
    let occupied = hist.iter().filter(|&&h| h > 0.0).count();
    if occupied <= 1 {
        // a flat tile maps every level to itself
        return (0..n_bins).map(|v| v as f64).collect();
    }
    let cap = clip_limit * count as f64;
    let mut excess = 0.0;
    for h in hist.iter_mut() {
        if *h > cap {
            excess += *h - cap;
            *h = cap;
        }
    }
    let share = excess / n_bins as f64;
    let total = count as f64;
    let mut cdf = 0.0;
    hist.iter()
        .map(|h| {
            cdf += h + share;
            (max * cdf / total).min(max)
        })
        .collect()
}

/// Per-tile lookup tables in row-major tile order.
pub fn clahe_luts(luma: &Plane<u16>, max_value: u16, kernel_size: usize, clip_limit: f64) -> Result<Vec<Vec<f64>>> {
    let (w, h) = luma.dims();
    if w < kernel_size || h < kernel_size {
        return Err(Error::shape(format!(
            "{w}x{h} frame is smaller than the {kernel_size}x{kernel_size} tile grid"
        )));
    }
    let gx = TileGrid::new(w, kernel_size);
    let gy = TileGrid::new(h, kernel_size);
    let n_bins = max_value as usize + 1;
    let mut luts = Vec::with_capacity(kernel_size * kernel_size);
    for ty in 0..kernel_size {
        for tx in 0..kernel_size {
            let (x0, x1) = (gx.edges[tx], gx.edges[tx + 1]);
            let samples = (gy.edges[ty]..gy.edges[ty + 1]).flat_map(|y| luma.row(y)[x0..x1].iter().copied());
            luts.push(tile_lut(samples, n_bins, clip_limit));
        }
    }
    Ok(luts)
}

pub fn hist_equalize(frame: &Frame, kernel_size: usize, clip_limit: f64) -> Result<Frame> {
    if kernel_size == 0 || !(clip_limit > 0.0 && clip_limit <= 1.0) {
        return Err(Error::Config(format!(
            "histeq needs kernel_size >= 1 and clip_limit in (0, 1], got {kernel_size} / {clip_limit}"
        )));
    }
    let luma = frame.luma();
    let max = frame.meta().max_value();
    let luts = clahe_luts(luma, max, kernel_size, clip_limit)?;
    let (w, h) = luma.dims();
    let gx = TileGrid::new(w, kernel_size);
    let gy = TileGrid::new(h, kernel_size);
    let cols: Vec<(usize, usize, f64)> = (0..w).map(|x| gx.locate(x as f64)).collect();

    let mut out = Plane::new(w, h, 0u16);
    for y in 0..h {
        let (ty0, ty1, wy) = gy.locate(y as f64);
        for (x, &(tx0, tx1, wx)) in cols.iter().enumerate() {
            let v = luma.get(x, y) as usize;
            let at = |ty: usize, tx: usize| luts[ty * kernel_size + tx][v];
            let top = (1.0 - wx) * at(ty0, tx0) + wx * at(ty0, tx1);
            let bottom = (1.0 - wx) * at(ty1, tx0) + wx * at(ty1, tx1);
            out.set(x, y, to_sample((1.0 - wy) * top + wy * bottom, max));
        }
    }
    frame.with_luma(out)
}
