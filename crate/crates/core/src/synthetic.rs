//! Deterministic synthetic clips used as hermetic stand-ins for natural video.
//!
//! * `LowContrast`: a smooth gradient with faint texture, panning slowly.
//! * `Contrasted`: hard-edged blocks over a full-range ramp, with grain and
//!   mid-scale texture.
//! * `Texture`: mid-contrast band-limited noise, for metric sweeps.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::gaussian_blur;
use crate::media::{ChromaFormat, Clip, Frame, Rational, VideoMeta};
use crate::plane::Plane;

pub const BUNDLED_WIDTH: usize = 192;
pub const BUNDLED_HEIGHT: usize = 108;
pub const BUNDLED_FRAMES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticKind {
    LowContrast,
    Contrasted,
    Texture,
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SyntheticKind::LowContrast => "low-contrast",
            SyntheticKind::Contrasted => "contrasted",
            SyntheticKind::Texture => "texture",
        })
    }
}

impl std::str::FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "low-contrast" => Ok(SyntheticKind::LowContrast),
            "contrasted" => Ok(SyntheticKind::Contrasted),
            "texture" => Ok(SyntheticKind::Texture),
            other => Err(Error::Config(format!("unknown synthetic clip kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub seed: u64,
}

impl SyntheticSpec {
    /// The 16-frame 192×108 clip of the given kind.
    pub fn bundled(kind: SyntheticKind) -> Self {
        Self {
            kind,
            width: BUNDLED_WIDTH,
            height: BUNDLED_HEIGHT,
            frames: BUNDLED_FRAMES,
            seed: match kind {
                SyntheticKind::LowContrast => 11,
                SyntheticKind::Contrasted => 23,
                SyntheticKind::Texture => 37,
            },
        }
    }
}

/// Zero-mean, unit-variance noise low-passed with σ = `grain`, on a canvas
/// large enough to pan across.
fn smooth_noise(rng: &mut ChaCha8Rng, width: usize, height: usize, grain: f64) -> Plane<f64> {
    let raw = Plane::from_fn(width, height, |_, _| rng.gen::<f64>() - 0.5);
    let smooth = gaussian_blur(&raw, grain);
    let mean = smooth.mean();
    let var = smooth.data().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / smooth.data().len() as f64;
    let scale = 1.0 / var.sqrt().max(1e-12);
    smooth.map(|v| (v - mean) * scale)
}

fn quantize(p: &Plane<f64>) -> Plane<u16> {
    p.map(|v| v.round().clamp(0.0, 255.0) as u16)
}

pub fn generate(spec: &SyntheticSpec) -> Result<Clip> {
    let SyntheticSpec {
        kind,
        width: w,
        height: h,
        frames,
        seed,
    } = *spec;
    if frames == 0 {
        return Err(Error::Config("synthetic clip needs at least one frame".into()));
    }
    let chroma = if w % 2 == 0 && h % 2 == 0 {
        ChromaFormat::Yuv420
    } else {
        ChromaFormat::Yuv444
    };
    let meta = VideoMeta::new(w, h, Rational::new(25, 1), 8, chroma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pan = frames;
    let (cw, ch) = (w + pan, h + pan / 2 + 1);

    let planes: Vec<Plane<u16>> = match kind {
        SyntheticKind::LowContrast => {
            let fine = smooth_noise(&mut rng, cw, ch, 1.2);
            let coarse = smooth_noise(&mut rng, cw, ch, 6.0);
            (0..frames)
                .map(|t| {
                    Plane::from_fn(w, h, |x, y| {
                        let (xf, yf) = (x as f64 / w as f64, y as f64 / h as f64);
                        let (sx, sy) = (x + t, y + t / 2);
                        96.0 + 28.0 * xf + 12.0 * yf + 3.0 * coarse.get(sx, sy) + 2.0 * fine.get(sx, sy)
                    })
                })
                .map(|p| quantize(&p))
                .collect()
        }
        SyntheticKind::Contrasted => {
            let blocks: Vec<(usize, usize, usize, usize, f64)> = (0..12)
                .map(|_| {
                    let bw = rng.gen_range(6..w / 3);
                    let bh = rng.gen_range(6..h / 3);
                    (
                        rng.gen_range(0..cw - bw),
                        rng.gen_range(0..ch - bh),
                        bw,
                        bh,
                        rng.gen_range(10.0..245.0),
                    )
                })
                .collect();
            let grain = smooth_noise(&mut rng, cw, ch, 0.8);
            let mid = smooth_noise(&mut rng, cw, ch, 3.0);
            let mut canvas = Plane::from_fn(cw, ch, |x, _| 40.0 + 170.0 * x as f64 / cw as f64);
            for &(bx, by, bw, bh, v) in &blocks {
                for y in by..by + bh {
                    for x in bx..bx + bw {
                        canvas.set(x, y, v);
                    }
                }
            }
            (0..frames)
                .map(|t| {
                    Plane::from_fn(w, h, |x, y| {
                        let (sx, sy) = (x + t, y + t / 2);
                        canvas.get(sx, sy) + 4.0 * grain.get(sx, sy) + 6.0 * mid.get(sx, sy)
                    })
                })
                .map(|p| quantize(&p))
                .collect()
        }
        SyntheticKind::Texture => {
            let tex = smooth_noise(&mut rng, cw, ch, 1.5);
            let wave_fx = rng.gen_range(0.05..0.3);
            let wave_fy = rng.gen_range(0.05..0.3);
            (0..frames)
                .map(|t| {
                    Plane::from_fn(w, h, |x, y| {
                        let (sx, sy) = (x + t, y + t / 2);
                        let wave = (sx as f64 * wave_fx).sin() * (sy as f64 * wave_fy).cos();
                        128.0 + 30.0 * tex.get(sx, sy) + 25.0 * wave
                    })
                })
                .map(|p| quantize(&p))
                .collect()
        }
    };
    let frames = planes
        .into_iter()
        .map(|p| Frame::from_luma(meta, p))
        .collect::<Result<Vec<_>>>()?;
    Clip::new(meta, frames)
}

/// One of the bundled 16-frame 192×108 clips.
pub fn bundled_clip(kind: SyntheticKind) -> Clip {
    generate(&SyntheticSpec::bundled(kind)).expect("bundled synthetic clip")
}
