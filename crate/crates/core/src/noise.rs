//! Synthetic Gaussian noise and robust noise-level estimation.
//!
//! Noise streams are generated by `ChaCha8Rng::seed_from_u64(seed)` drawing
//! standard normals (`rand_distr::StandardNormal`), one per sample, in
//! channel-major then row-major order. Changing any part of that mapping
//! invalidates stored noisy fixtures.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::raster::Image;
use crate::wavelet::{dwt2, Extension, Plane, WaveletFilterBank, MIN_LEVEL_INPUT};

/// Gaussian consistency constant for the median absolute deviation.
pub const MAD_TO_SIGMA: f64 = 0.6745;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Standard deviation on the 0–255 scale.
    pub sigma255: f64,
    pub seed: u64,
    /// Clamp noisy samples back into `[0, 1]`.
    pub clamp: bool,
}

impl NoiseSpec {
    /// Clamping spec. Panics unless `sigma255` is finite and positive.
    pub fn new(sigma255: f64, seed: u64) -> Self {
        assert!(sigma255.is_finite() && sigma255 > 0.0, "sigma255 must be positive, got {sigma255}");
        Self {
            sigma255,
            seed,
            clamp: true,
        }
    }

    pub fn unclamped(mut self) -> Self {
        self.clamp = false;
        self
    }
}

/// `s + n` with `n ~ N(0, (sigma255 / 255)^2)` for every sample.
pub fn add_gaussian_noise(img: &Image, spec: &NoiseSpec) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let scale = spec.sigma255 / 255.0;
    img.map_planes(|plane| {
        plane
            .iter()
            .map(|&s| {
                let z: f64 = StandardNormal.sample(&mut rng);
                let v = s + scale * z;
                if spec.clamp {
                    v.clamp(0.0, 1.0)
                } else {
                    v
                }
            })
            .collect()
    })
}

/// Noise std (0–255 scale) from the finest diagonal db2 subband:
/// `255 * median(|HH1|) / 0.6745`. Color images average their channels.
pub fn estimate_sigma(img: &Image) -> Result<f64> {
    let mut total = 0.0;
    for c in 0..img.channels() {
        total += estimate_sigma_plane(&Plane::new(img.width(), img.height(), img.plane(c).to_vec()))?;
    }
    Ok(total / img.channels() as f64)
}

pub fn estimate_sigma_plane(plane: &Plane) -> Result<f64> {
    if plane.width.min(plane.height) < MIN_LEVEL_INPUT {
        return Err(Error::TooSmall(format!(
            "noise estimation needs at least {MIN_LEVEL_INPUT}x{MIN_LEVEL_INPUT}, got {}x{}",
            plane.width, plane.height
        )));
    }
    let pyr = dwt2(plane, &WaveletFilterBank::db2(), 1, Extension::Symmetric)?;
    let mut mags: Vec<f64> = pyr.details[0].hh.data.iter().map(|v| v.abs()).collect();
    Ok(255.0 * median(&mut mags) / MAD_TO_SIGMA)
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
