//! Pixel-domain Visual Information Fidelity at one scale.

use crate::error::{Error, Result};
use crate::filter::{convolve_separable, gaussian_kernel};
use crate::plane::Plane;
use crate::vmaf::{EngineConfig, FeatureValue};

pub(crate) fn vif_window(cfg: &EngineConfig) -> Vec<f64> {
    gaussian_kernel(cfg.vif_window_sigma, cfg.vif_window_taps / 2)
}

/// Low-pass with the VIF window, then keep even rows and columns.
pub(crate) fn decimate(plane: &Plane<f64>, window: &[f64]) -> Plane<f64> {
    let blurred = convolve_separable(plane, window);
    let (w, h) = plane.dims();
    Plane::from_fn(w.div_ceil(2), h.div_ceil(2), |x, y| blurred.get(2 * x, 2 * y))
}

fn centered(plane: &Plane<f64>) -> Plane<f64> {
    let mean = plane.mean();
    plane.map(|v| v - mean)
}

/// VIF of `distorted` against `reference` at `scale` (0 = full resolution).
///
/// A reference without any local variance yields 1.0 flagged degenerate.
pub fn vif_scale(
    reference: &Plane<f64>,
    distorted: &Plane<f64>,
    scale: usize,
    cfg: &EngineConfig,
) -> Result<FeatureValue> {
    if reference.dims() != distorted.dims() {
        return Err(Error::shape("vif: reference and distorted planes differ in size"));
    }
    let window = vif_window(cfg);
    let (mut r, mut d) = (reference.clone(), distorted.clone());
    for _ in 0..scale {
        r = decimate(&r, &window);
        d = decimate(&d, &window);
    }
    if r.width() < 2 || r.height() < 2 {
        return Err(Error::shape(format!(
            "vif: {}x{} plane is too small for scale {scale}",
            reference.width(),
            reference.height()
        )));
    }
    // Moments are shift invariant; centering keeps flat planes exactly flat.
    let r = centered(&r);
    let d = centered(&d);

    let mu_r = convolve_separable(&r, &window);
    let mu_d = convolve_separable(&d, &window);
    let rr = convolve_separable(&r.zip_map(&r, |a, b| a * b), &window);
    let dd = convolve_separable(&d.zip_map(&d, |a, b| a * b), &window);
    let rd = convolve_separable(&r.zip_map(&d, |a, b| a * b), &window);

    let eps = cfg.vif_eps;
    let noise = cfg.vif_noise_var;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..r.data().len() {
        let (mr, md) = (mu_r.data()[i], mu_d.data()[i]);
        let var_r = (rr.data()[i] - mr * mr).max(0.0);
        let var_d = (dd.data()[i] - md * md).max(0.0);
        let cov = rd.data()[i] - mr * md;
        let gain = (cov / (var_r + eps)).max(0.0);
        let var_v = (var_d - gain * cov).max(eps);
        num += (1.0 + gain * gain * var_r / (var_v + noise)).log2();
        den += (1.0 + var_r / noise).log2();
    }
    if den <= f64::MIN_POSITIVE {
        return Ok(FeatureValue::degenerate(1.0));
    }
    Ok(FeatureValue::new(num / den))
}
