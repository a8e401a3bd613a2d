//! PSNR, SSIM and SI/TI over luma.

mod psnr;
mod siti;
mod ssim;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::media::{Clip, Frame};

pub use psnr::{psnr_frame, PSNR_CAP_DB};
pub use siti::{si_ti, SiTi};
pub use ssim::{ssim_frame, SSIM_SIGMA, SSIM_WINDOW};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricId {
    Psnr,
    Ssim,
    Vmaf,
}

/// Per-frame scores plus their pooled value (arithmetic mean).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricScore {
    pub metric_id: MetricId,
    pub per_frame: Vec<f64>,
    pub pooled: f64,
}

impl MetricScore {
    pub fn from_frames(metric_id: MetricId, per_frame: Vec<f64>) -> Self {
        let pooled = mean_pool(&per_frame);
        Self {
            metric_id,
            per_frame,
            pooled,
        }
    }
}

/// Arithmetic mean, summed in frame order.
pub fn mean_pool(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

fn per_frame_pairs(
    reference: &Clip,
    distorted: &Clip,
    f: impl Fn(&Frame, &Frame) -> Result<f64> + Sync,
) -> Result<Vec<f64>> {
    reference.check_compatible(distorted)?;
    reference
        .frames()
        .par_iter()
        .zip(distorted.frames())
        .map(|(r, d)| f(r, d))
        .collect()
}

pub fn psnr_clip(reference: &Clip, distorted: &Clip) -> Result<MetricScore> {
    let frames = per_frame_pairs(reference, distorted, psnr_frame)?;
    Ok(MetricScore::from_frames(MetricId::Psnr, frames))
}

pub fn ssim_clip(reference: &Clip, distorted: &Clip) -> Result<MetricScore> {
    let frames = per_frame_pairs(reference, distorted, ssim_frame)?;
    Ok(MetricScore::from_frames(MetricId::Ssim, frames))
}
