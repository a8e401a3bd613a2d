//! Detail loss: how much of the reference's wavelet detail survives in the
//! distorted plane once additive impairments are decoupled.

use crate::error::{Error, Result};
use crate::filter::mirror;
use crate::plane::Plane;
use crate::vmaf::{EngineConfig, FeatureValue};

pub const DLM_MIN_SIZE: usize = 16;

/// Daubechies-2 analysis low-pass taps.
pub fn db2_lowpass() -> [f64; 4] {
    let s3 = 3f64.sqrt();
    let norm = 4.0 * 2f64.sqrt();
    [
        (1.0 + s3) / norm,
        (3.0 + s3) / norm,
        (3.0 - s3) / norm,
        (1.0 - s3) / norm,
    ]
}

/// Quadrature-mirror high-pass: `g[k] = (-1)^k h[3 - k]`.
pub fn db2_highpass() -> [f64; 4] {
    let h = db2_lowpass();
    [h[3], -h[2], h[1], -h[0]]
}

/// One-dimensional analysis step; outputs have `ceil(n / 2)` samples.
/// Coefficient `i` is centred on input sample `2i`, mirrored at the borders.
fn analyze_line(src: &[f64], lo: &mut Vec<f64>, hi: &mut Vec<f64>) {
    let (h, g) = (db2_lowpass(), db2_highpass());
    let n = src.len();
    lo.clear();
    hi.clear();
    for i in 0..n.div_ceil(2) {
        let (mut a, mut d) = (0.0, 0.0);
        for k in 0..4 {
            let s = src[mirror(2 * i as isize + k as isize - 1, n)];
            a += h[k] * s;
            d += g[k] * s;
        }
        lo.push(a);
        hi.push(d);
    }
}

/// One 2-D decomposition level: `(approx, [lh, hl, hh])`.
pub(crate) fn dwt2(plane: &Plane<f64>) -> (Plane<f64>, [Plane<f64>; 3]) {
    let (w, h) = plane.dims();
    let hw = w.div_ceil(2);
    let hh = h.div_ceil(2);
    let mut row_lo = Plane::new(hw, h, 0.0);
    let mut row_hi = Plane::new(hw, h, 0.0);
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    for y in 0..h {
        analyze_line(plane.row(y), &mut lo, &mut hi);
        row_lo.row_mut(y).copy_from_slice(&lo);
        row_hi.row_mut(y).copy_from_slice(&hi);
    }
    let columns = |src: &Plane<f64>| -> (Plane<f64>, Plane<f64>) {
        let mut out_lo = Plane::new(hw, hh, 0.0);
        let mut out_hi = Plane::new(hw, hh, 0.0);
        let (mut lo, mut hi) = (Vec::new(), Vec::new());
        let mut col = vec![0.0; h];
        for x in 0..hw {
            for (y, c) in col.iter_mut().enumerate() {
                *c = src.get(x, y);
            }
            analyze_line(&col, &mut lo, &mut hi);
            for y in 0..hh {
                out_lo.set(x, y, lo[y]);
                out_hi.set(x, y, hi[y]);
            }
        }
        (out_lo, out_hi)
    };
    let (ll, lh) = columns(&row_lo);
    let (hl, hh_band) = columns(&row_hi);
    (ll, [lh, hl, hh_band])
}

/// Reference coefficient restored from the distorted one: same sign keeps
/// the smaller magnitude, opposite sign (or zero) restores nothing.
#[inline]
pub(crate) fn restore(orig: f64, dist: f64) -> f64 {
    if orig > 0.0 && dist > 0.0 {
        orig.min(dist)
    } else if orig < 0.0 && dist < 0.0 {
        orig.max(dist)
    } else {
        0.0
    }
}

fn centered(plane: &Plane<f64>) -> Plane<f64> {
    let mean = plane.mean();
    plane.map(|v| v - mean)
}

pub fn dlm(reference: &Plane<f64>, distorted: &Plane<f64>, cfg: &EngineConfig) -> Result<FeatureValue> {
    if reference.dims() != distorted.dims() {
        return Err(Error::shape("dlm: reference and distorted planes differ in size"));
    }
    let (w, h) = reference.dims();
    if w < DLM_MIN_SIZE || h < DLM_MIN_SIZE {
        return Err(Error::shape(format!(
            "dlm: {w}x{h} plane is smaller than {DLM_MIN_SIZE}x{DLM_MIN_SIZE}"
        )));
    }
    let mut orig = centered(reference);
    let mut dist = centered(distorted);
    let border = cfg.dlm_border;
    let (mut restored_energy, mut orig_energy) = (0.0, 0.0);
    for _ in 0..cfg.dlm_levels {
        let (o_ll, o_bands) = dwt2(&orig);
        let (d_ll, d_bands) = dwt2(&dist);
        for (o, d) in o_bands.iter().zip(&d_bands) {
            let (bw, bh) = o.dims();
            for y in border..bh.saturating_sub(border) {
                for x in border..bw.saturating_sub(border) {
                    let (ov, dv) = (o.get(x, y), d.get(x, y));
                    restored_energy += restore(ov, dv).abs().powi(3);
                    orig_energy += ov.abs().powi(3);
                }
            }
        }
        orig = o_ll;
        dist = d_ll;
    }
    if orig_energy <= f64::MIN_POSITIVE {
        return Ok(FeatureValue::degenerate(1.0));
    }
    let ratio = restored_energy.cbrt() / orig_energy.cbrt();
    Ok(FeatureValue::new(ratio.clamp(0.0, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::gaussian_blur;

    fn texture(w: usize, h: usize) -> Plane<f64> {
        Plane::from_fn(w, h, |x, y| {
            let (xf, yf) = (x as f64, y as f64);
            128.0 + 45.0 * (xf * 1.1).sin() * (yf * 0.7).cos() + 30.0 * ((xf - 2.0 * yf) * 0.37).cos()
        })
    }

    #[test]
    fn filters_are_orthonormal() {
        let (h, g) = (db2_lowpass(), db2_highpass());
        let dot = |a: &[f64; 4], b: &[f64; 4]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        assert!((dot(&h, &h) - 1.0).abs() < 1e-15);
        assert!((dot(&g, &g) - 1.0).abs() < 1e-15);
        assert!(dot(&h, &g).abs() < 1e-15);
        assert!((h.iter().sum::<f64>() - 2f64.sqrt()).abs() < 1e-15);
        assert!(g.iter().sum::<f64>().abs() < 1e-15);
    }

    #[test]
    fn restore_rule() {
        assert_eq!(restore(3.0, 5.0), 3.0);
        assert_eq!(restore(3.0, 1.0), 1.0);
        assert_eq!(restore(-3.0, -1.0), -1.0);
        assert_eq!(restore(-3.0, -7.0), -3.0);
        assert_eq!(restore(3.0, -1.0), 0.0);
        assert_eq!(restore(0.0, 1.0), 0.0);
    }

    #[test]
    fn identity_is_one() {
        let t = texture(40, 36);
        let v = dlm(&t, &t, &EngineConfig::default()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_reference_is_degenerate() {
        let v = dlm(&Plane::new(16, 16, 50.0), &texture(16, 16), &EngineConfig::default()).unwrap();
        assert!(v.degenerate);
        assert_eq!(v.value, 1.0);
    }

    #[test]
    fn blur_lowers_dlm() {
        let t = texture(64, 64);
        let cfg = EngineConfig::default();
        let vals: Vec<f64> = [1.0, 2.0, 4.0]
            .iter()
            .map(|&s| dlm(&t, &gaussian_blur(&t, s), &cfg).unwrap().value)
            .collect();
        assert!(vals[0] < 1.0);
        assert!(vals[0] > vals[1] && vals[1] > vals[2], "{vals:?}");
    }

    #[test]
    fn sign_flip_is_near_zero() {
        let t = texture(16, 16).map(|v| v.round());
        let flipped = t.map(|v| 255.0 - v);
        let v = dlm(&t, &flipped, &EngineConfig::default()).unwrap();
        assert!(v.value < 1e-6, "{}", v.value);
    }

    #[test]
    fn rejects_small_planes() {
        let t = texture(15, 32);
        assert!(dlm(&t, &t, &EngineConfig::default()).is_err());
    }
}
