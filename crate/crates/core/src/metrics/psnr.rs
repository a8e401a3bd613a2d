use crate::error::{Error, Result};
use crate::media::Frame;

/// Score reported for identical frames.
pub const PSNR_CAP_DB: f64 = 100.0;

pub(crate) fn check_same_shape(a: &Frame, b: &Frame) -> Result<()> {
    if a.luma().dims() != b.luma().dims() || a.meta().bit_depth != b.meta().bit_depth {
        return Err(Error::shape(format!(
            "frames differ: {}x{}@{}bit vs {}x{}@{}bit",
            a.width(),
            a.height(),
            a.meta().bit_depth,
            b.width(),
            b.height(),
            b.meta().bit_depth
        )));
    }
    Ok(())
}

/// Luma PSNR in dB, capped at [`PSNR_CAP_DB`].
pub fn psnr_frame(reference: &Frame, distorted: &Frame) -> Result<f64> {
    check_same_shape(reference, distorted)?;
    let sse: u64 = reference
        .luma()
        .data()
        .iter()
        .zip(distorted.luma().data())
        .map(|(&a, &b)| {
            let d = i64::from(a) - i64::from(b);
            (d * d) as u64
        })
        .sum();
    if sse == 0 {
        return Ok(PSNR_CAP_DB);
    }
    let mse = sse as f64 / reference.luma().data().len() as f64;
    let max = f64::from(reference.meta().max_value());
    Ok((10.0 * (max * max / mse).log10()).clamp(0.0, PSNR_CAP_DB))
}
