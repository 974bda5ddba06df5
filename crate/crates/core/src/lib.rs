//! Image denoising with non-local means and wavelet soft thresholding,
//! full-reference quality metrics, and a corpus benchmark harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod error;
pub mod fixtures;
pub mod iqa;
pub mod noise;
pub mod raster;
pub mod spatial;
pub mod wavelet;

pub use bench::{emit_tables, run_bench, run_bench_with_jobs, BenchConfig, BenchResult, MethodSpec, TableFormat};
pub use error::{Error, Result};
pub use iqa::{compute_metrics, cw_ssim, psnr, ssim, summer_like, Metric, MetricParams, MetricReport};
pub use noise::{add_gaussian_noise, estimate_sigma, NoiseSpec};
pub use raster::{load_image, save_image, to_gray, Image};
pub use spatial::{gaussian_smooth, nlm_denoise, GaussParams, NlmOutput, NlmParams, NlmStatus};
pub use wavelet::{dwt2, idwt2, wavelet_denoise, ThresholdPolicy, WaveletFilterBank, WaveletParams, WaveletPyramid};
