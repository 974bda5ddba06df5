use super::{check_same_shape, MetricParams};
use crate::error::Result;
use crate::raster::Image;

/// `10 log10(L^2 / MSE)` on 0–255 samples, MSE pooled over all channels.
/// Identical inputs give `f64::INFINITY`.
pub fn psnr(reference: &Image, test: &Image, params: &MetricParams) -> Result<f64> {
    check_same_shape(reference, test)?;
    let l = params.dynamic_range;
    let (mut sum, mut count) = (0.0, 0usize);
    for (a, b) in reference.planes().iter().zip(test.planes()) {
        for (x, y) in a.iter().zip(b) {
            let d = l * x - l * y;
            sum += d * d;
        }
        count += a.len();
    }
    let mse = sum / count as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (l * l / mse).log10())
}
