//! Separable Gaussian filtering with symmetric (half-sample mirror) borders.
//!
//! Shared by SSIM, the VIF/motion features and the unsharp mask.

use crate::plane::Plane;

/// Normalized 1-D Gaussian with `2 * radius + 1` taps.
pub fn gaussian_kernel(sigma: f64, radius: usize) -> Vec<f64> {
    let r = radius as isize;
    let denom = 2.0 * sigma * sigma;
    let mut taps: Vec<f64> = (-r..=r).map(|i| (-((i * i) as f64) / denom).exp()).collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Kernel radius `⌈3σ⌉` used by [`gaussian_blur`].
pub fn blur_radius(sigma: f64) -> usize {
    (3.0 * sigma).ceil() as usize
}

/// Half-sample symmetric index: `-1 → 0`, `-2 → 1`, `n → n - 1`.
/// Folds repeatedly so any offset is valid for any `n ≥ 1`.
#[inline]
pub fn mirror(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - 1 - m }) as usize
}

fn convolve_line(src: &[f64], dst: &mut [f64], kernel: &[f64]) {
    let n = src.len();
    let radius = (kernel.len() / 2) as isize;
    for (i, out) in dst.iter_mut().enumerate() {
        let base = i as isize - radius;
        let interior = base >= 0 && (base as usize + kernel.len()) <= n;
        *out = if interior {
            let window = &src[base as usize..base as usize + kernel.len()];
            window.iter().zip(kernel).map(|(s, k)| s * k).sum()
        } else {
            kernel
                .iter()
                .enumerate()
                .map(|(k, w)| w * src[mirror(base + k as isize, n)])
                .sum()
        };
    }
}

/// Applies `kernel` along rows, then along columns.
pub fn convolve_separable(plane: &Plane<f64>, kernel: &[f64]) -> Plane<f64> {
    let (w, h) = plane.dims();
    let mut horiz = Plane::new(w, h, 0.0);
    for y in 0..h {
        convolve_line(plane.row(y), horiz.row_mut(y), kernel);
    }
    let mut out = Plane::new(w, h, 0.0);
    let mut column = vec![0.0; h];
    let mut filtered = vec![0.0; h];
    for x in 0..w {
        for (y, c) in column.iter_mut().enumerate() {
            *c = horiz.get(x, y);
        }
        convolve_line(&column, &mut filtered, kernel);
        for (y, &v) in filtered.iter().enumerate() {
            out.set(x, y, v);
        }
    }
    out
}

/// Gaussian blur truncated at `±⌈3σ⌉` taps with mirrored borders.
pub fn gaussian_blur(plane: &Plane<f64>, sigma: f64) -> Plane<f64> {
    debug_assert!(sigma > 0.0, "sigma must be positive");
    convolve_separable(plane, &gaussian_kernel(sigma, blur_radius(sigma)))
}

/// "Valid" separable convolution: only positions where the whole kernel
/// fits inside the plane. Output is `(w - k + 1) × (h - k + 1)`.
pub fn convolve_separable_valid(plane: &Plane<f64>, kernel: &[f64]) -> Plane<f64> {
    let (w, h) = plane.dims();
    let k = kernel.len();
    debug_assert!(w >= k && h >= k);
    let (ow, oh) = (w - k + 1, h - k + 1);
    let mut horiz = Plane::new(ow, h, 0.0);
    for y in 0..h {
        let row = plane.row(y);
        for (x, out) in horiz.row_mut(y).iter_mut().enumerate() {
            *out = row[x..x + k].iter().zip(kernel).map(|(s, t)| s * t).sum();
        }
    }
    Plane::from_fn(ow, oh, |x, y| (0..k).map(|j| kernel[j] * horiz.get(x, y + j)).sum())
}
