//! Orthogonal wavelet transform and soft-threshold denoising.

mod filter;
mod threshold;
mod transform;

pub use filter::WaveletFilterBank;
pub use threshold::{select_threshold, soft_threshold, ThresholdPolicy};
pub use transform::{
    analyze_1d, coeff_len, dwt2, idwt2, max_levels, synthesize_1d, DetailLevel, Extension, Plane, WaveletPyramid,
    MIN_LEVEL_INPUT,
};

pub(crate) use transform::reflect;

use crate::error::{Error, Result};
use crate::noise::estimate_sigma_plane;
use crate::raster::Image;

/// Knobs of [`wavelet_denoise`]. Shrinkage is always soft.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WaveletParams {
    /// Decomposition depth; `None` picks [`default_levels`].
    pub levels: Option<usize>,
    pub threshold_policy: ThresholdPolicy,
    /// Noise std on the 0–255 scale; estimated per channel when `None`.
    pub sigma_est: Option<f64>,
}

/// `min(4, floor(log2(min(w, h))) - 2)`, at least 1 and never deeper than
/// the image allows.
pub fn default_levels(width: usize, height: usize) -> usize {
    let min_dim = width.min(height).max(1);
    let log2 = (usize::BITS - 1 - min_dim.leading_zeros()) as i64;
    let wanted = (log2 - 2).clamp(1, 4) as usize;
    wanted.min(max_levels(width, height, 4, Extension::Symmetric).max(1))
}

/// Soft-thresholds every detail subband of `pyr` in place of a copy; the
/// approximation band is left untouched.
pub fn threshold_pyramid(
    pyr: &WaveletPyramid,
    sigma: f64,
    policy: ThresholdPolicy,
    image_len: usize,
) -> Result<WaveletPyramid> {
    let mut out = pyr.clone();
    for level in out.details.iter_mut() {
        for band in level.bands_mut() {
            let lambda = select_threshold(&band.data, sigma, policy, image_len)?;
            band.data = soft_threshold(&band.data, lambda)?;
        }
    }
    Ok(out)
}

/// Decompose, shrink details, reconstruct and clamp, channel by channel.
pub fn wavelet_denoise(img: &Image, params: &WaveletParams) -> Result<Image> {
    let bank = WaveletFilterBank::db2();
    let (w, h) = (img.width(), img.height());
    let levels = params.levels.unwrap_or_else(|| default_levels(w, h));
    if let Some(s) = params.sigma_est {
        if !(s >= 0.0) {
            return Err(Error::InvalidParameter(format!("sigma_est must be >= 0, got {s}")));
        }
    }
    let mut planes = Vec::with_capacity(img.channels());
    for c in 0..img.channels() {
        let plane = Plane::new(w, h, img.plane(c).to_vec());
        let sigma255 = match params.sigma_est {
            Some(s) => s,
            None => estimate_sigma_plane(&plane)?,
        };
        let pyr = dwt2(&plane, &bank, levels, Extension::Symmetric)?;
        let shrunk = threshold_pyramid(&pyr, sigma255 / 255.0, params.threshold_policy, w * h)?;
        let rec = idwt2(&shrunk, &bank)?;
        planes.push(rec.data.into_iter().map(|v| v.clamp(0.0, 1.0)).collect());
    }
    Image::from_planes(w, h, planes)
}
