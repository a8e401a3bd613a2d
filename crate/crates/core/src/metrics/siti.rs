use serde::{Deserialize, Serialize};

use crate::media::Clip;
use crate::plane::Plane;

/// Spatial and temporal information of a clip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiTi {
    pub si: f64,
    pub ti: f64,
    /// False for single-frame clips, where `ti` is reported as 0.
    pub ti_defined: bool,
}

fn stddev(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let (n, sum) = values.clone().fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    if n == 0 {
        return 0.0;
    }
    let mean = sum / n as f64;
    (values.map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt()
}

/// Sobel gradient magnitude over interior pixels (1-pixel border excluded).
pub(crate) fn sobel_magnitude(plane: &Plane<f64>) -> Vec<f64> {
    let (w, h) = plane.dims();
    if w < 3 || h < 3 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity((w - 2) * (h - 2));
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let p = |dx: isize, dy: isize| plane.get((x as isize + dx) as usize, (y as isize + dy) as usize);
            let gx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
            let gy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
            out.push((gx * gx + gy * gy).sqrt());
        }
    }
    out
}

pub fn si_ti(clip: &Clip) -> SiTi {
    let planes: Vec<Plane<f64>> = clip.frames().iter().map(|f| f.luma().to_f64()).collect();
    let si = planes
        .iter()
        .map(|p| stddev(sobel_magnitude(p).into_iter()))
        .fold(0.0, f64::max);
    let ti = planes
        .windows(2)
        .map(|pair| stddev(pair[1].data().iter().zip(pair[0].data()).map(|(a, b)| a - b)))
        .fold(0.0, f64::max);
    SiTi {
        si,
        ti,
        ti_defined: planes.len() >= 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::{Frame, VideoMeta};

    fn clip_of(planes: &[Plane<u16>]) -> Clip {
        let (w, h) = planes[0].dims();
        let meta = VideoMeta::luma8(w, h);
        let frames = planes
            .iter()
            .map(|p| Frame::new(meta, p.clone(), None).unwrap())
            .collect();
        Clip::new(meta, frames).unwrap()
    }

    #[test]
    fn static_constant_clip_is_zero() {
        let p = Plane::new(8, 8, 77);
        let s = si_ti(&clip_of(&[p.clone(), p.clone(), p]));
        assert_eq!((s.si, s.ti, s.ti_defined), (0.0, 0.0, true));
    }

    #[test]
    fn uniform_offset_has_zero_ti() {
        let a = Plane::from_fn(8, 8, |x, y| (x * 9 + y * 5) as u16);
        let b = a.map(|v| v + 12);
        assert_eq!(si_ti(&clip_of(&[a, b])).ti, 0.0);
    }

    #[test]
    fn single_frame_flags_ti() {
        let s = si_ti(&clip_of(&[Plane::new(4, 4, 0)]));
        assert!(!s.ti_defined);
        assert_eq!(s.ti, 0.0);
    }

    #[test]
    fn vertical_step_edge() {
        // columns 0..4 dark, 4..8 bright; interior is 6x6.
        let p = Plane::from_fn(8, 8, |x, _| if x < 4 { 20 } else { 120 });
        // Only interior columns 3 and 4 straddle the edge, each with
        // |gx| = 4 * 100; the remaining 4 interior columns are 0.
        let mags: Vec<f64> = [0.0, 0.0, 400.0, 400.0, 0.0, 0.0].repeat(6);
        let mean = mags.iter().sum::<f64>() / 36.0;
        let expected = (mags.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / 36.0).sqrt();
        let got = si_ti(&clip_of(&[p])).si;
        assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
        // closed form: a third of samples at 400 → 400·sqrt(1/3·2/3)
        assert!((got - 400.0 * (2.0f64 / 9.0).sqrt()).abs() < 1e-9);
    }
}
