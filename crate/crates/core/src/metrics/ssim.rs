use crate::error::{Error, Result};
use crate::filter::{convolve_separable_valid, gaussian_kernel};
use crate::media::Frame;
use crate::metrics::psnr::check_same_shape;
use crate::plane::Plane;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;

/// Mean local SSIM over luma with an 11×11 Gaussian window (σ = 1.5),
/// evaluated at every position where the window fits inside the frame.
pub fn ssim_frame(reference: &Frame, distorted: &Frame) -> Result<f64> {
    check_same_shape(reference, distorted)?;
    let max = f64::from(reference.meta().max_value());
    ssim_plane(&reference.luma().to_f64(), &distorted.luma().to_f64(), max)
}

pub(crate) fn ssim_plane(x: &Plane<f64>, y: &Plane<f64>, max: f64) -> Result<f64> {
    let (w, h) = x.dims();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::shape(format!(
            "{w}x{h} frame is smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} SSIM window"
        )));
    }
    let c1 = (K1 * max).powi(2);
    let c2 = (K2 * max).powi(2);
    let kernel = gaussian_kernel(SSIM_SIGMA, SSIM_WINDOW / 2);

    let mu_x = convolve_separable_valid(x, &kernel);
    let mu_y = convolve_separable_valid(y, &kernel);
    let xx = convolve_separable_valid(&x.zip_map(x, |a, b| a * b), &kernel);
    let yy = convolve_separable_valid(&y.zip_map(y, |a, b| a * b), &kernel);
    let xy = convolve_separable_valid(&x.zip_map(y, |a, b| a * b), &kernel);

    let n = mu_x.data().len();
    let mut total = 0.0;
    for i in 0..n {
        let (mx, my) = (mu_x.data()[i], mu_y.data()[i]);
        let sxx = xx.data()[i] - mx * mx;
        let syy = yy.data()[i] - my * my;
        let sxy = xy.data()[i] - mx * my;
        let num = (2.0 * mx * my + c1) * (2.0 * sxy + c2);
        let den = (mx * mx + my * my + c1) * (sxx + syy + c2);
        total += num / den;
    }
    Ok(total / n as f64)
}
