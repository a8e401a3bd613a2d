//! Uncompressed video containers (Y4M and headerless planar YUV) and the
//! frame/clip types every metric and transform operates on.
//!
//! Samples are stored as `u16` regardless of bit depth. Metrics only look
//! at luma; chroma is carried through untouched.

mod raw;
mod y4m;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::Plane;

pub use raw::{decode_raw, encode_raw};
pub use y4m::{decode_y4m, encode_y4m, LUMA_ONLY_TAG};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChromaFormat {
    #[serde(rename = "420")]
    Yuv420,
    #[serde(rename = "422")]
    Yuv422,
    #[serde(rename = "444")]
    Yuv444,
    #[serde(rename = "luma_only")]
    LumaOnly,
}

impl ChromaFormat {
    /// Chroma plane dimensions for a given luma size, `None` for luma-only.
    pub fn chroma_dims(self, width: usize, height: usize) -> Option<(usize, usize)> {
        match self {
            ChromaFormat::Yuv420 => Some((width.div_ceil(2), height.div_ceil(2))),
            ChromaFormat::Yuv422 => Some((width.div_ceil(2), height)),
            ChromaFormat::Yuv444 => Some((width, height)),
            ChromaFormat::LumaOnly => None,
        }
    }
}

impl fmt::Display for ChromaFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChromaFormat::Yuv420 => "420",
            ChromaFormat::Yuv422 => "422",
            ChromaFormat::Yuv444 => "444",
            ChromaFormat::LumaOnly => "luma_only",
        })
    }
}

/// Exact frame rate as `num / den` frames per second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rational {
    pub num: u32,
    pub den: u32,
}

impl Rational {
    pub const fn new(num: u32, den: u32) -> Self {
        Self { num, den }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.num, self.den)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VideoMeta {
    pub width: usize,
    pub height: usize,
    pub frame_rate: Rational,
    pub bit_depth: u8,
    pub chroma_format: ChromaFormat,
}

impl VideoMeta {
    pub fn new(
        width: usize,
        height: usize,
        frame_rate: Rational,
        bit_depth: u8,
        chroma_format: ChromaFormat,
    ) -> Result<Self> {
        let meta = Self {
            width,
            height,
            frame_rate,
            bit_depth,
            chroma_format,
        };
        meta.validate()?;
        Ok(meta)
    }

    /// 8-bit luma-only metadata at 25 fps, handy for synthetic content.
    pub fn luma8(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            frame_rate: Rational::new(25, 1),
            bit_depth: 8,
            chroma_format: ChromaFormat::LumaOnly,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::UnsupportedFormat(format!(
                "frame size {}x{} must be positive",
                self.width, self.height
            )));
        }
        if self.chroma_format == ChromaFormat::Yuv420
            && (!self.width.is_multiple_of(2) || !self.height.is_multiple_of(2))
        {
            return Err(Error::UnsupportedFormat(format!(
                "4:2:0 needs even dimensions, got {}x{}",
                self.width, self.height
            )));
        }
        if self.bit_depth != 8 && self.bit_depth != 10 {
            return Err(Error::UnsupportedFormat(format!(
                "bit depth {} (only 8 and 10 are supported)",
                self.bit_depth
            )));
        }
        if self.frame_rate.num == 0 || self.frame_rate.den == 0 {
            return Err(Error::UnsupportedFormat(format!(
                "frame rate {} must be positive",
                self.frame_rate
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn max_value(&self) -> u16 {
        ((1u32 << self.bit_depth) - 1) as u16
    }

    pub fn bytes_per_sample(&self) -> usize {
        if self.bit_depth > 8 {
            2
        } else {
            1
        }
    }

    pub fn samples_per_frame(&self) -> usize {
        let chroma = self
            .chroma_format
            .chroma_dims(self.width, self.height)
            .map_or(0, |(w, h)| 2 * w * h);
        self.width * self.height + chroma
    }

    pub fn frame_bytes(&self) -> usize {
        self.samples_per_frame() * self.bytes_per_sample()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    meta: VideoMeta,
    luma: Plane<u16>,
    chroma: Option<[Plane<u16>; 2]>,
}

impl Frame {
    pub fn new(meta: VideoMeta, luma: Plane<u16>, chroma: Option<[Plane<u16>; 2]>) -> Result<Self> {
        if luma.dims() != (meta.width, meta.height) {
            return Err(Error::shape(format!(
                "luma plane {}x{} does not match {}x{}",
                luma.width(),
                luma.height(),
                meta.width,
                meta.height
            )));
        }
        match (meta.chroma_format.chroma_dims(meta.width, meta.height), &chroma) {
            (None, None) => {}
            (Some(dims), Some([u, v])) if u.dims() == dims && v.dims() == dims => {}
            _ => {
                return Err(Error::shape(format!(
                    "chroma planes inconsistent with {} layout",
                    meta.chroma_format
                )))
            }
        }
        let max = meta.max_value();
        let planes = std::iter::once(&luma).chain(chroma.iter().flatten());
        for plane in planes {
            if let Some(&bad) = plane.data().iter().find(|&&s| s > max) {
                return Err(Error::shape(format!(
                    "sample {bad} exceeds {max} for {}-bit video",
                    meta.bit_depth
                )));
            }
        }
        Ok(Self { meta, luma, chroma })
    }

    /// Builds a frame from a luma plane, synthesizing neutral chroma when the
    /// metadata calls for it.
    pub fn from_luma(meta: VideoMeta, luma: Plane<u16>) -> Result<Self> {
        let chroma = meta.chroma_format.chroma_dims(meta.width, meta.height).map(|(w, h)| {
            let gray = neutral_chroma(meta.bit_depth);
            [Plane::new(w, h, gray), Plane::new(w, h, gray)]
        });
        Self::new(meta, luma, chroma)
    }

    pub fn meta(&self) -> &VideoMeta {
        &self.meta
    }

    pub fn luma(&self) -> &Plane<u16> {
        &self.luma
    }

    pub fn chroma(&self) -> Option<&[Plane<u16>; 2]> {
        self.chroma.as_ref()
    }

    pub fn width(&self) -> usize {
        self.meta.width
    }

    pub fn height(&self) -> usize {
        self.meta.height
    }

    /// Replaces the luma plane, keeping chroma and metadata.
    pub fn with_luma(&self, luma: Plane<u16>) -> Result<Self> {
        Self::new(self.meta, luma, self.chroma.clone())
    }
}

pub fn neutral_chroma(bit_depth: u8) -> u16 {
    1u16 << (bit_depth - 1)
}

/// Ordered, non-empty sequence of frames sharing one [`VideoMeta`].
#[derive(Debug, Clone, PartialEq)]
pub struct Clip {
    meta: VideoMeta,
    frames: Vec<Frame>,
}

impl Clip {
    pub fn new(meta: VideoMeta, frames: Vec<Frame>) -> Result<Self> {
        meta.validate()?;
        if frames.is_empty() {
            return Err(Error::shape("a clip needs at least one frame"));
        }
        if let Some(i) = frames.iter().position(|f| f.meta != meta) {
            return Err(Error::shape(format!("frame {i} metadata differs from clip metadata")));
        }
        Ok(Self { meta, frames })
    }

    pub fn meta(&self) -> &VideoMeta {
        &self.meta
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Every `step`-th frame starting from the first.
    pub fn subsample(&self, step: usize) -> Clip {
        let step = step.max(1);
        Clip {
            meta: self.meta,
            frames: self.frames.iter().step_by(step).cloned().collect(),
        }
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<Clip> {
        let frames = self
            .frames
            .get(range.clone())
            .ok_or_else(|| Error::shape(format!("frame range {range:?} out of bounds")))?;
        Clip::new(self.meta, frames.to_vec())
    }

    /// True when both clips can be compared frame by frame.
    pub fn check_compatible(&self, other: &Clip) -> Result<()> {
        let (a, b) = (&self.meta, &other.meta);
        if a.width != b.width || a.height != b.height || a.bit_depth != b.bit_depth {
            return Err(Error::shape(format!(
                "clip geometry differs: {}x{}@{}bit vs {}x{}@{}bit",
                a.width, a.height, a.bit_depth, b.width, b.height, b.bit_depth
            )));
        }
        if self.len() != other.len() {
            return Err(Error::shape(format!(
                "frame count differs: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContainerFormat {
    Y4m,
    Raw,
}

fn detect_format(path: &Path, bytes: &[u8]) -> ContainerFormat {
    let by_ext = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("y4m"));
    if by_ext || bytes.starts_with(b"YUV4MPEG2") {
        ContainerFormat::Y4m
    } else {
        ContainerFormat::Raw
    }
}

pub fn load_clip(
    path: impl AsRef<Path>,
    format_hint: Option<ContainerFormat>,
    raw_meta: Option<VideoMeta>,
) -> Result<Clip> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::read(path, e))?;
    match format_hint.unwrap_or_else(|| detect_format(path, &bytes)) {
        ContainerFormat::Y4m => decode_y4m(&bytes),
        ContainerFormat::Raw => {
            let meta = raw_meta.ok_or_else(|| {
                Error::UnsupportedFormat(format!(
                    "{} looks like raw YUV; width, height and format must be supplied",
                    path.display()
                ))
            })?;
            decode_raw(&bytes, meta)
        }
    }
}

pub fn save_clip(clip: &Clip, path: impl AsRef<Path>, format: ContainerFormat) -> Result<()> {
    let path = path.as_ref();
    let bytes = match format {
        ContainerFormat::Y4m => encode_y4m(clip),
        ContainerFormat::Raw => encode_raw(clip),
    };
    std::fs::write(path, bytes).map_err(|e| Error::write(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn meta_rejects_odd_420() {
        let err = VideoMeta::new(5, 4, Rational::new(25, 1), 8, ChromaFormat::Yuv420).unwrap_err();
        assert!(matches!(err, Error::UnsupportedFormat(_)));
        assert!(VideoMeta::new(5, 4, Rational::new(25, 1), 8, ChromaFormat::Yuv444).is_ok());
    }

    #[test]
    fn meta_rejects_bad_depth() {
        assert!(VideoMeta::new(4, 4, Rational::new(25, 1), 12, ChromaFormat::Yuv420).is_err());
    }

    #[test]
    fn frame_rejects_out_of_range_sample() {
        let meta = VideoMeta::luma8(2, 2);
        let luma = Plane::from_vec(2, 2, vec![0, 1, 2, 256]).unwrap();
        assert!(Frame::new(meta, luma, None).is_err());
    }

    #[test]
    fn frame_rejects_missing_chroma() {
        let meta = VideoMeta::new(4, 4, Rational::new(25, 1), 8, ChromaFormat::Yuv420).unwrap();
        assert!(Frame::new(meta, Plane::new(4, 4, 0), None).is_err());
        let f = Frame::from_luma(meta, Plane::new(4, 4, 0)).unwrap();
        assert_eq!(f.chroma().unwrap()[0].dims(), (2, 2));
        assert_eq!(f.chroma().unwrap()[1].get(1, 1), 128);
    }

    #[test]
    fn clip_rejects_mixed_meta_and_empty() {
        let a = VideoMeta::luma8(2, 2);
        let b = VideoMeta::luma8(4, 2);
        let fa = Frame::new(a, Plane::new(2, 2, 0), None).unwrap();
        let fb = Frame::new(b, Plane::new(4, 2, 0), None).unwrap();
        assert!(Clip::new(a, vec![fa.clone(), fb]).is_err());
        assert!(Clip::new(a, vec![]).is_err());
        assert_eq!(Clip::new(a, vec![fa.clone(), fa]).unwrap().len(), 2);
    }

    #[test]
    fn subsample_keeps_first_frame() {
        let meta = VideoMeta::luma8(2, 2);
        let frames = (0..5)
            .map(|i| Frame::new(meta, Plane::new(2, 2, i), None).unwrap())
            .collect();
        let clip = Clip::new(meta, frames).unwrap();
        let sub = clip.subsample(2);
        let firsts: Vec<u16> = sub.frames().iter().map(|f| f.luma().get(0, 0)).collect();
        assert_eq!(firsts, vec![0, 2, 4]);
    }
}
