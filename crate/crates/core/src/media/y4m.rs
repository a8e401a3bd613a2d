//! YUV4MPEG2 reader and writer.
//!
//! Stream layout: a single header line `YUV4MPEG2 W.. H.. F.. [I..] [A..] [C..] [X..]`
//! followed by frames, each introduced by a `FRAME` line and carrying planar
//! Y, U, V payloads. Samples wider than 8 bits are two bytes little-endian.

use crate::error::{Error, Result};
use crate::media::{ChromaFormat, Clip, Frame, Rational, VideoMeta};
use crate::plane::Plane;

const MAGIC: &[u8] = b"YUV4MPEG2";
const FRAME_MAGIC: &[u8] = b"FRAME";

/// Comment token marking a stream whose chroma was synthesized from a
/// luma-only clip. Readers that do not know it see ordinary 4:2:0 video.
pub const LUMA_ONLY_TAG: &str = "XLAB=LUMA_ONLY";

fn parse_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        offset,
        message: message.into(),
    }
}

fn parse_ratio(value: &str, offset: usize) -> Result<Rational> {
    let (n, d) = value
        .split_once(':')
        .ok_or_else(|| parse_err(offset, format!("expected ratio n:d, got {value:?}")))?;
    let num = n
        .parse()
        .map_err(|_| parse_err(offset, format!("bad ratio numerator {n:?}")))?;
    let den = d
        .parse()
        .map_err(|_| parse_err(offset, format!("bad ratio denominator {d:?}")))?;
    Ok(Rational::new(num, den))
}

fn parse_colorspace(tag: &str) -> Result<(ChromaFormat, u8)> {
    let (base, depth) = match tag.split_once('p') {
        Some((base, bits)) if !base.is_empty() && bits.chars().all(|c| c.is_ascii_digit()) => {
            let depth: u8 = bits
                .parse()
                .map_err(|_| Error::UnsupportedFormat(format!("colorspace C{tag}")))?;
            (base, depth)
        }
        _ => (tag, 8),
    };
    let (format, depth) = match base {
        "420" | "420jpeg" | "420paldv" | "420mpeg2" => (ChromaFormat::Yuv420, depth),
        "422" => (ChromaFormat::Yuv422, depth),
        "444" => (ChromaFormat::Yuv444, depth),
        "mono" => (ChromaFormat::LumaOnly, depth),
        "mono10" => (ChromaFormat::LumaOnly, 10),
        _ => return Err(Error::UnsupportedFormat(format!("colorspace C{tag}"))),
    };
    if depth != 8 && depth != 10 {
        return Err(Error::UnsupportedFormat(format!("colorspace C{tag} ({depth}-bit)")));
    }
    Ok((format, depth))
}

fn colorspace_tag(format: ChromaFormat, bit_depth: u8) -> String {
    let base = match format {
        // luma-only streams are written as 4:2:0 with neutral chroma
        ChromaFormat::Yuv420 | ChromaFormat::LumaOnly => "420",
        ChromaFormat::Yuv422 => "422",
        ChromaFormat::Yuv444 => "444",
    };
    if bit_depth == 8 {
        if base == "420" {
            "420jpeg".to_owned()
        } else {
            base.to_owned()
        }
    } else {
        format!("{base}p{bit_depth}")
    }
}

struct Header {
    meta: VideoMeta,
    /// Chroma layout present in the byte stream (differs from `meta` for
    /// tagged luma-only streams).
    stored_chroma: ChromaFormat,
    payload_start: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    if !bytes.starts_with(MAGIC) {
        return Err(parse_err(0, "missing YUV4MPEG2 signature"));
    }
    let end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| parse_err(bytes.len(), "header line is not terminated"))?;
    let line = std::str::from_utf8(&bytes[..end]).map_err(|e| parse_err(e.valid_up_to(), "header is not ASCII"))?;

    let mut width = None;
    let mut height = None;
    let mut rate = None;
    let mut colorspace = (ChromaFormat::Yuv420, 8u8);
    let mut luma_only = false;

    let mut offset = MAGIC.len();
    for token in line[MAGIC.len()..].split(' ') {
        let token_offset = offset;
        offset += token.len() + 1;
        if token.is_empty() {
            continue;
        }
        let (key, value) = token.split_at(1);
        match key {
            "W" => {
                width = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| parse_err(token_offset, format!("bad width {value:?}")))?,
                )
            }
            "H" => {
                height = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| parse_err(token_offset, format!("bad height {value:?}")))?,
                )
            }
            "F" => rate = Some(parse_ratio(value, token_offset)?),
            "I" => match value {
                "p" | "?" => {}
                "t" | "b" | "m" => {
                    return Err(Error::UnsupportedFormat(format!(
                        "interlaced stream (I{value}); only progressive video is supported"
                    )))
                }
                _ => return Err(parse_err(token_offset, format!("bad interlace tag {value:?}"))),
            },
            "A" => {
                parse_ratio(value, token_offset)?;
            }
            "C" => colorspace = parse_colorspace(value)?,
            "X" => {
                if token == LUMA_ONLY_TAG {
                    luma_only = true;
                }
            }
            _ => return Err(parse_err(token_offset, format!("unknown header token {token:?}"))),
        }
    }

    let width = width.ok_or_else(|| parse_err(end, "header lacks W"))?;
    let height = height.ok_or_else(|| parse_err(end, "header lacks H"))?;
    let frame_rate = rate.ok_or_else(|| parse_err(end, "header lacks F"))?;
    let (stored_chroma, bit_depth) = colorspace;
    let chroma_format = if luma_only {
        ChromaFormat::LumaOnly
    } else {
        stored_chroma
    };
    let meta = VideoMeta::new(width, height, frame_rate, bit_depth, chroma_format)?;
    Ok(Header {
        meta,
        stored_chroma,
        payload_start: end + 1,
    })
}

pub(crate) fn read_plane(
    bytes: &[u8],
    width: usize,
    height: usize,
    bit_depth: u8,
    base_offset: usize,
) -> Result<Plane<u16>> {
    let max = ((1u32 << bit_depth) - 1) as u16;
    let samples: Vec<u16> = if bit_depth > 8 {
        bytes
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]))
            .collect()
    } else {
        bytes.iter().map(|&b| u16::from(b)).collect()
    };
    if let Some(i) = samples.iter().position(|&s| s > max) {
        return Err(parse_err(
            base_offset + i * if bit_depth > 8 { 2 } else { 1 },
            format!("sample {} exceeds {bit_depth}-bit range", samples[i]),
        ));
    }
    Plane::from_vec(width, height, samples)
}

pub(crate) fn write_plane(out: &mut Vec<u8>, plane: &Plane<u16>, bit_depth: u8) {
    if bit_depth > 8 {
        for &s in plane.data() {
            out.extend_from_slice(&s.to_le_bytes());
        }
    } else {
        out.extend(plane.data().iter().map(|&s| s as u8));
    }
}

pub fn decode_y4m(bytes: &[u8]) -> Result<Clip> {
    let header = parse_header(bytes)?;
    let meta = header.meta;
    let bps = meta.bytes_per_sample();
    let luma_len = meta.width * meta.height * bps;
    let chroma_dims = header.stored_chroma.chroma_dims(meta.width, meta.height);
    let chroma_len = chroma_dims.map_or(0, |(w, h)| w * h * bps);

    let mut frames = Vec::new();
    let mut pos = header.payload_start;
    while pos < bytes.len() {
        if !bytes[pos..].starts_with(FRAME_MAGIC) {
            return Err(parse_err(pos, "expected FRAME marker"));
        }
        let line_end = bytes[pos..]
            .iter()
            .position(|&b| b == b'\n')
            .map(|i| pos + i)
            .ok_or_else(|| parse_err(pos, "unterminated FRAME line"))?;
        let start = line_end + 1;
        let needed = luma_len + 2 * chroma_len;
        if bytes.len() - start < needed {
            return Err(parse_err(
                start,
                format!(
                    "truncated frame {}: need {needed} bytes, {} left",
                    frames.len(),
                    bytes.len() - start
                ),
            ));
        }
        let luma = read_plane(
            &bytes[start..start + luma_len],
            meta.width,
            meta.height,
            meta.bit_depth,
            start,
        )?;
        let chroma = match chroma_dims {
            Some((cw, ch)) => {
                let u_at = start + luma_len;
                let v_at = u_at + chroma_len;
                let u = read_plane(&bytes[u_at..v_at], cw, ch, meta.bit_depth, u_at)?;
                let v = read_plane(&bytes[v_at..v_at + chroma_len], cw, ch, meta.bit_depth, v_at)?;
                Some([u, v])
            }
            None => None,
        };
        let chroma = if meta.chroma_format == ChromaFormat::LumaOnly {
            None
        } else {
            chroma
        };
        frames.push(Frame::new(meta, luma, chroma)?);
        pos = start + needed;
    }
    if frames.is_empty() {
        return Err(parse_err(pos, "stream contains no frames"));
    }
    Clip::new(meta, frames)
}

pub fn encode_y4m(clip: &Clip) -> Vec<u8> {
    let meta = clip.meta();
    let mut out = Vec::with_capacity(64 + clip.len() * (6 + meta.frame_bytes()));
    let mut header = format!(
        "YUV4MPEG2 W{} H{} F{} Ip A1:1 C{}",
        meta.width,
        meta.height,
        meta.frame_rate,
        colorspace_tag(meta.chroma_format, meta.bit_depth)
    );
    if meta.chroma_format == ChromaFormat::LumaOnly {
        header.push(' ');
        header.push_str(LUMA_ONLY_TAG);
    }
    out.extend_from_slice(header.as_bytes());
    out.push(b'\n');

    let neutral = ChromaFormat::Yuv420
        .chroma_dims(meta.width, meta.height)
        .map(|(w, h)| Plane::new(w, h, super::neutral_chroma(meta.bit_depth)));
    for frame in clip.frames() {
        out.extend_from_slice(b"FRAME\n");
        write_plane(&mut out, frame.luma(), meta.bit_depth);
        match (frame.chroma(), &neutral) {
            (Some([u, v]), _) => {
                write_plane(&mut out, u, meta.bit_depth);
                write_plane(&mut out, v, meta.bit_depth);
            }
            (None, Some(gray)) => {
                write_plane(&mut out, gray, meta.bit_depth);
                write_plane(&mut out, gray, meta.bit_depth);
            }
            (None, None) => unreachable!("4:2:0 always has chroma planes"),
        }
    }
    out
}
