use crate::enhance::to_sample;
use crate::error::Result;
use crate::filter::gaussian_blur;
use crate::media::Frame;

/// `out = in + amount · (in − blur(in, radius))` on luma, rounded and clamped.
pub fn unsharp_mask(frame: &Frame, radius: f64, amount: f64) -> Result<Frame> {
    if amount == 0.0 {
        return Ok(frame.clone());
    }
    let max = frame.meta().max_value();
    let src = frame.luma().to_f64();
    let blurred = gaussian_blur(&src, radius);
    let luma = src.zip_map(&blurred, |v, b| to_sample(v + amount * (v - b), max));
    frame.with_luma(luma)
}
