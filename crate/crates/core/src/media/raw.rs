//! Headerless planar YUV: frames back to back, each frame Y then U then V.

use crate::error::{Error, Result};
use crate::media::y4m::{read_plane, write_plane};
use crate::media::{Clip, Frame, VideoMeta};

pub fn decode_raw(bytes: &[u8], meta: VideoMeta) -> Result<Clip> {
    meta.validate()?;
    let frame_bytes = meta.frame_bytes();
    if bytes.is_empty() || !bytes.len().is_multiple_of(frame_bytes) {
        return Err(Error::Size {
            expected: frame_bytes,
            actual: bytes.len(),
        });
    }
    let bps = meta.bytes_per_sample();
    let luma_len = meta.width * meta.height * bps;
    let chroma_dims = meta.chroma_format.chroma_dims(meta.width, meta.height);
    let chroma_len = chroma_dims.map_or(0, |(w, h)| w * h * bps);

    let frames = bytes
        .chunks_exact(frame_bytes)
        .enumerate()
        .map(|(i, chunk)| {
            let base = i * frame_bytes;
            let luma = read_plane(&chunk[..luma_len], meta.width, meta.height, meta.bit_depth, base)?;
            let chroma = match chroma_dims {
                Some((cw, ch)) => {
                    let u = &chunk[luma_len..luma_len + chroma_len];
                    let v = &chunk[luma_len + chroma_len..];
                    Some([
                        read_plane(u, cw, ch, meta.bit_depth, base + luma_len)?,
                        read_plane(v, cw, ch, meta.bit_depth, base + luma_len + chroma_len)?,
                    ])
                }
                None => None,
            };
            Frame::new(meta, luma, chroma)
        })
        .collect::<Result<Vec<_>>>()?;
    Clip::new(meta, frames)
}

pub fn encode_raw(clip: &Clip) -> Vec<u8> {
    let meta = clip.meta();
    let mut out = Vec::with_capacity(clip.len() * meta.frame_bytes());
    for frame in clip.frames() {
        write_plane(&mut out, frame.luma(), meta.bit_depth);
        if let Some([u, v]) = frame.chroma() {
            write_plane(&mut out, u, meta.bit_depth);
            write_plane(&mut out, v, meta.bit_depth);
        }
    }
    out
}
