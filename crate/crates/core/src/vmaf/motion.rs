use crate::error::{Error, Result};
use crate::filter::gaussian_blur;
use crate::plane::Plane;
use crate::vmaf::EngineConfig;

/// Mean absolute difference between consecutive blurred luma planes.
/// The first frame of a clip has no predecessor and scores 0.
pub fn motion(prev: Option<&Plane<f64>>, cur: &Plane<f64>, cfg: &EngineConfig) -> Result<f64> {
    let Some(prev) = prev else {
        return Ok(0.0);
    };
    if prev.dims() != cur.dims() {
        return Err(Error::shape("motion: consecutive planes differ in size"));
    }
    let a = gaussian_blur(prev, cfg.motion_sigma);
    let b = gaussian_blur(cur, cfg.motion_sigma);
    let sad: f64 = a.data().iter().zip(b.data()).map(|(x, y)| (x - y).abs()).sum();
    Ok(sad / a.data().len() as f64)
}
