//! Brute-force reference implementations shared by the integration tests.
//!
//! Everything here is written for clarity, not speed: direct 2-D sums,
//! explicit reflection loops, quadratic front peeling.

#![allow(dead_code)]

use lab_core::media::{Clip, Frame, VideoMeta};
use lab_core::plane::Plane;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Half-sample symmetric reflection, one fold at a time.
pub fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut i = i;
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - 1 - i;
        } else {
            return i as usize;
        }
    }
}

pub fn gauss_taps(sigma: f64, radius: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..=2 * radius)
        .map(|k| {
            let d = k as f64 - radius as f64;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|t| t / total).collect()
}

/// Direct 2-D convolution with the outer product of `taps` with itself.
pub fn conv2(p: &Plane<f64>, taps: &[f64]) -> Plane<f64> {
    let r = (taps.len() / 2) as isize;
    let (w, h) = p.dims();
    Plane::from_fn(w, h, |x, y| {
        let mut acc = 0.0;
        for (j, wy) in taps.iter().enumerate() {
            for (i, wx) in taps.iter().enumerate() {
                let sx = reflect(x as isize + i as isize - r, w);
                let sy = reflect(y as isize + j as isize - r, h);
                acc += wx * wy * p.get(sx, sy);
            }
        }
        acc
    })
}

pub fn blur(p: &Plane<f64>, sigma: f64) -> Plane<f64> {
    conv2(p, &gauss_taps(sigma, (3.0 * sigma).ceil() as usize))
}

fn mean(p: &Plane<f64>) -> f64 {
    let mut s = 0.0;
    for y in 0..p.height() {
        for x in 0..p.width() {
            s += p.get(x, y);
        }
    }
    s / (p.width() * p.height()) as f64
}

/// VIF at one scale: 9-tap σ=1.5 window, noise variance 2, planes
/// mean-centred, decimation = window blur then even samples.
pub fn vif(reference: &Plane<f64>, distorted: &Plane<f64>, scale: usize) -> f64 {
    let window = gauss_taps(1.5, 4);
    let (mut r, mut d) = (reference.clone(), distorted.clone());
    for _ in 0..scale {
        let (br, bd) = (conv2(&r, &window), conv2(&d, &window));
        let (w, h) = (r.width().div_ceil(2), r.height().div_ceil(2));
        r = Plane::from_fn(w, h, |x, y| br.get(2 * x, 2 * y));
        d = Plane::from_fn(w, h, |x, y| bd.get(2 * x, 2 * y));
    }
    let (mr0, md0) = (mean(&r), mean(&d));
    let r = r.map(|v| v - mr0);
    let d = d.map(|v| v - md0);
    let mu_r = conv2(&r, &window);
    let mu_d = conv2(&d, &window);
    let rr = conv2(&r.zip_map(&r, |a, b| a * b), &window);
    let dd = conv2(&d.zip_map(&d, |a, b| a * b), &window);
    let rd = conv2(&r.zip_map(&d, |a, b| a * b), &window);
    let (eps, noise) = (1e-10, 2.0);
    let (mut num, mut den) = (0.0, 0.0);
    for y in 0..r.height() {
        for x in 0..r.width() {
            let (a, b) = (mu_r.get(x, y), mu_d.get(x, y));
            let var_r = f64::max(rr.get(x, y) - a * a, 0.0);
            let var_d = f64::max(dd.get(x, y) - b * b, 0.0);
            let cov = rd.get(x, y) - a * b;
            let g = f64::max(cov / (var_r + eps), 0.0);
            let var_v = f64::max(var_d - g * cov, eps);
            num += (1.0 + g * g * var_r / (var_v + noise)).log2();
            den += (1.0 + var_r / noise).log2();
        }
    }
    if den <= f64::MIN_POSITIVE {
        1.0
    } else {
        num / den
    }
}

fn db2() -> ([f64; 4], [f64; 4]) {
    let s = 3f64.sqrt();
    let n = 4.0 * 2f64.sqrt();
    let h = [(1.0 + s) / n, (3.0 + s) / n, (3.0 - s) / n, (1.0 - s) / n];
    let g = [h[3], -h[2], h[1], -h[0]];
    (h, g)
}

/// One subband computed coefficient by coefficient.
fn band(p: &Plane<f64>, fx: &[f64; 4], fy: &[f64; 4]) -> Plane<f64> {
    let (w, h) = p.dims();
    Plane::from_fn(w.div_ceil(2), h.div_ceil(2), |i, j| {
        let mut acc = 0.0;
        for (l, wy) in fy.iter().enumerate() {
            for (k, wx) in fx.iter().enumerate() {
                let sx = reflect(2 * i as isize + k as isize - 1, w);
                let sy = reflect(2 * j as isize + l as isize - 1, h);
                acc += wx * wy * p.get(sx, sy);
            }
        }
        acc
    })
}

/// Detail loss: 4-level db2 pyramid, one-coefficient border crop,
/// restoration by sign-matched minimum magnitude, cube-root energy ratio.
pub fn dlm(reference: &Plane<f64>, distorted: &Plane<f64>) -> f64 {
    let (lo, hi) = db2();
    let (m0, m1) = (mean(reference), mean(distorted));
    let mut o = reference.map(|v| v - m0);
    let mut d = distorted.map(|v| v - m1);
    let (mut num, mut den) = (0.0, 0.0);
    for _ in 0..4 {
        for (fx, fy) in [(&lo, &hi), (&hi, &lo), (&hi, &hi)] {
            let (ob, db) = (band(&o, fx, fy), band(&d, fx, fy));
            for y in 1..ob.height().saturating_sub(1) {
                for x in 1..ob.width().saturating_sub(1) {
                    let (a, b) = (ob.get(x, y), db.get(x, y));
                    let restored = if a * b > 0.0 {
                        if a.abs() < b.abs() {
                            a
                        } else {
                            b
                        }
                    } else {
                        0.0
                    };
                    num += restored.abs().powi(3);
                    den += a.abs().powi(3);
                }
            }
        }
        o = band(&o, &lo, &lo);
        d = band(&d, &lo, &lo);
    }
    if den <= f64::MIN_POSITIVE {
        1.0
    } else {
        (num.cbrt() / den.cbrt()).clamp(0.0, 1.0)
    }
}

pub fn svr(support_vectors: &[Vec<f64>], coefs: &[f64], gamma: f64, bias: f64, x: &[f64]) -> f64 {
    let mut total = 0.0;
    for (sv, c) in support_vectors.iter().zip(coefs) {
        let mut d2 = 0.0;
        for k in 0..x.len() {
            d2 += (sv[k] - x[k]) * (sv[k] - x[k]);
        }
        total += c * (-gamma * d2).exp();
    }
    total + bias
}

fn dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
}

/// Peels non-dominated layers one at a time.
pub fn fronts(objectives: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = (0..objectives.len()).collect();
    let mut out = Vec::new();
    while !left.is_empty() {
        let layer: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| !left.iter().any(|&j| dominates(&objectives[j], &objectives[i])))
            .collect();
        left.retain(|i| !layer.contains(i));
        out.push(layer);
    }
    out
}

/// Integer-valued plane mixing smooth structure and noise.
pub fn random_plane(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Plane<f64> {
    let (fx, fy) = (rng.gen_range(0.05..0.9), rng.gen_range(0.05..0.9));
    let (amp, noise) = (rng.gen_range(5.0..80.0), rng.gen_range(0.0..40.0));
    let base = rng.gen_range(60.0..190.0);
    Plane::from_fn(w, h, |x, y| {
        let v = base + amp * (x as f64 * fx).sin() * (y as f64 * fy).cos();
        (v + noise * (rng.gen::<f64>() - 0.5)).round().clamp(0.0, 255.0)
    })
}

/// 8-bit 4:2:0 clip of `frames` random frames (even dimensions).
pub fn random_clip(rng: &mut ChaCha8Rng, w: usize, h: usize, frames: usize) -> Clip {
    let meta = VideoMeta::new(w, h, lab_core::Rational::new(25, 1), 8, lab_core::ChromaFormat::Yuv420).unwrap();
    let frames = (0..frames)
        .map(|_| {
            let luma = random_plane(rng, w, h).map(|v| v as u16);
            Frame::from_luma(meta, luma).unwrap()
        })
        .collect();
    Clip::new(meta, frames).unwrap()
}
