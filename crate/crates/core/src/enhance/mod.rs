//! Parametric luma enhancement operators: unsharp masking and
//! contrast-limited adaptive histogram equalization. Chroma passes through.

mod clahe;
mod unsharp;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::media::{Clip, Frame};

pub use clahe::{clahe_luts, hist_equalize, TileGrid};
pub use unsharp::unsharp_mask;

/// Default tile count per dimension for histogram equalization.
pub const DEFAULT_KERNEL_SIZE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformFamily {
    Unsharp,
    Histeq,
}

impl fmt::Display for TransformFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformFamily::Unsharp => "unsharp",
            TransformFamily::Histeq => "histeq",
        })
    }
}

impl std::str::FromStr for TransformFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unsharp" => Ok(TransformFamily::Unsharp),
            "histeq" => Ok(TransformFamily::Histeq),
            other => Err(Error::Config(format!("unknown transform family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransformParams {
    /// `radius` is the Gaussian σ in pixels.
    UnsharpMask { radius: f64, amount: f64 },
    /// `kernel_size` is the number of tiles per dimension.
    HistEq { kernel_size: usize, clip_limit: f64 },
}

impl TransformParams {
    pub fn family(&self) -> TransformFamily {
        match self {
            TransformParams::UnsharpMask { .. } => TransformFamily::Unsharp,
            TransformParams::HistEq { .. } => TransformFamily::Histeq,
        }
    }

    /// A transform that leaves every frame untouched.
    pub fn identity() -> Self {
        TransformParams::UnsharpMask {
            radius: 1.0,
            amount: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TransformParams::UnsharpMask { radius, amount } => {
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(Error::Config(format!("unsharp radius must be positive, got {radius}")));
                }
                if !(amount >= 0.0 && amount.is_finite()) {
                    return Err(Error::Config(format!(
                        "unsharp amount must be non-negative, got {amount}"
                    )));
                }
            }
            TransformParams::HistEq {
                kernel_size,
                clip_limit,
            } => {
                if kernel_size == 0 {
                    return Err(Error::Config("histeq kernel_size must be at least 1".into()));
                }
                if !(clip_limit > 0.0 && clip_limit <= 1.0) {
                    return Err(Error::Config(format!(
                        "histeq clip_limit must be in (0, 1], got {clip_limit}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn apply_frame(&self, frame: &Frame) -> Result<Frame> {
        match *self {
            TransformParams::UnsharpMask { radius, amount } => unsharp_mask(frame, radius, amount),
            TransformParams::HistEq {
                kernel_size,
                clip_limit,
            } => hist_equalize(frame, kernel_size, clip_limit),
        }
    }
}

impl fmt::Display for TransformParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformParams::UnsharpMask { radius, amount } => {
                write!(f, "unsharp(radius={radius}, amount={amount})")
            }
            TransformParams::HistEq {
                kernel_size,
                clip_limit,
            } => write!(f, "histeq(kernel_size={kernel_size}, clip_limit={clip_limit})"),
        }
    }
}

/// Applies `params` to every frame; metadata is unchanged.
pub fn apply_transform(clip: &Clip, params: &TransformParams) -> Result<Clip> {
    params.validate()?;
    let frames = clip
        .frames()
        .par_iter()
        .map(|f| params.apply_frame(f))
        .collect::<Result<Vec<_>>>()?;
    Clip::new(*clip.meta(), frames)
}

/// Round half away from zero and clamp into `[0, max]`.
#[inline]
pub(crate) fn to_sample(v: f64, max: u16) -> u16 {
    v.round().clamp(0.0, f64::from(max)) as u16
}
