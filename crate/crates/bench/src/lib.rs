//! Shared inputs for the criterion benchmarks.

use denoisekit::{add_gaussian_noise, fixtures::synthetic_scene, Image, NoiseSpec};

/// A clean scene and its noisy copy at `sigma255`.
pub fn noisy_pair(size: usize, sigma255: f64) -> (Image, Image) {
    let clean = synthetic_scene(1, size, 2024);
    let noisy = add_gaussian_noise(&clean, &NoiseSpec::new(sigma255, 1));
    (clean, noisy)
}
