//! Spatial-domain denoisers: Gaussian smoothing and non-local means.

mod gauss;
mod nlm;

pub use gauss::{gaussian_kernel_1d, gaussian_smooth, GaussParams};
pub use nlm::{nlm_denoise, nlm_denoise_reference, NlmOutput, NlmParams, NlmStatus, SIGMA_FLOOR};
