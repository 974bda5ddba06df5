use crate::error::{Error, Result};
use crate::raster::Image;
use crate::wavelet::reflect;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussParams {
    /// Kernel standard deviation in pixels.
    pub sigma_spatial: f64,
    /// Kernel half-width; `ceil(3 * sigma_spatial)` when `None`.
    pub radius: Option<usize>,
}

impl GaussParams {
    pub fn new(sigma_spatial: f64) -> Self {
        Self {
            sigma_spatial,
            radius: None,
        }
    }

    pub fn effective_radius(&self) -> usize {
        self.radius.unwrap_or_else(|| (3.0 * self.sigma_spatial).ceil() as usize)
    }
}

impl Default for GaussParams {
    fn default() -> Self {
        Self::new(1.0)
    }
}

/// Sampled Gaussian on `-radius..=radius`, normalized to unit sum.
pub fn gaussian_kernel_1d(sigma: f64, radius: usize) -> Vec<f64> {
    let r = radius as isize;
    let raw: Vec<f64> = (-r..=r)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

/// Separable Gaussian blur with half-sample symmetric border extension.
pub fn gaussian_smooth(img: &Image, params: &GaussParams) -> Result<Image> {
    if !(params.sigma_spatial > 0.0) || !params.sigma_spatial.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "sigma_spatial must be positive, got {}",
            params.sigma_spatial
        )));
    }
    let radius = params.effective_radius();
    let kernel = gaussian_kernel_1d(params.sigma_spatial, radius);
    let (w, h) = (img.width(), img.height());
    let r = radius as isize;
    Ok(img.map_planes(|plane| {
        let mut tmp = vec![0.0; w * h];
        for y in 0..h {
            let row = &plane[y * w..(y + 1) * w];
            for x in 0..w {
                tmp[y * w + x] = kernel
                    .iter()
                    .enumerate()
                    .map(|(k, kv)| kv * row[reflect(x as isize + k as isize - r, w)])
                    .sum();
            }
        }
        let mut out = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                let acc: f64 = kernel
                    .iter()
                    .enumerate()
                    .map(|(k, kv)| kv * tmp[reflect(y as isize + k as isize - r, h) * w + x])
                    .sum();
                out[y * w + x] = acc.clamp(0.0, 1.0);
            }
        }
        out
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{add_gaussian_noise, NoiseSpec};

    #[test]
    fn kernel_is_positive_and_normalized() {
        let k = gaussian_kernel_1d(1.7, 6);
        assert!(k.iter().all(|&v| v > 0.0));
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_is_fixed_point() {
        let img = Image::filled(20, 15, 1, 0.6).unwrap();
        let out = gaussian_smooth(&img, &GaussParams::new(2.0)).unwrap();
        assert!(out.plane(0).iter().all(|v| (v - 0.6).abs() < 1e-14));
    }

    #[test]
    fn impulse_response_is_the_kernel() {
        let mut data = vec![0.0; 33 * 33];
        data[16 * 33 + 16] = 1.0;
        let img = Image::gray(33, 33, data).unwrap();
        let p = GaussParams::new(2.0);
        let out = gaussian_smooth(&img, &p).unwrap();
        let k = gaussian_kernel_1d(2.0, p.effective_radius());
        let r = p.effective_radius();
        for y in 0..33 {
            for x in 0..33 {
                let (dx, dy) = (x as isize - 16, y as isize - 16);
                let expected = if dx.unsigned_abs() <= r && dy.unsigned_abs() <= r {
                    k[(dx + r as isize) as usize] * k[(dy + r as isize) as usize]
                } else {
                    0.0
                };
                assert!((out.get(0, x, y) - expected).abs() < 1e-15);
                assert_eq!(out.get(0, x, y), out.get(0, 32 - x, y));
                assert_eq!(out.get(0, x, y), out.get(0, x, 32 - y));
            }
        }
    }

    #[test]
    fn reduces_noise_variance() {
        let variance = |img: &Image| {
            let p = img.plane(0);
            let m = p.iter().sum::<f64>() / p.len() as f64;
            p.iter().map(|v| (v - m).powi(2)).sum::<f64>() / p.len() as f64
        };
        for seed in 0..10 {
            let noisy = add_gaussian_noise(&Image::filled(48, 48, 1, 0.5).unwrap(), &NoiseSpec::new(50.0, seed));
            let out = gaussian_smooth(&noisy, &GaussParams::new(1.5)).unwrap();
            assert!(variance(&out) < variance(&noisy));
        }
    }

    #[test]
    fn preserves_mean_of_mirror_periodic_images() {
        // cos(pi k (x + 1/2) / n) continues seamlessly under half-sample reflection
        let (w, h) = (40, 24);
        let img = Image::from_fn(w, h, |x, y| {
            let cx = (std::f64::consts::PI * 3.0 * (x as f64 + 0.5) / w as f64).cos();
            let cy = (std::f64::consts::PI * 2.0 * (y as f64 + 0.5) / h as f64).cos();
            0.5 + 0.25 * cx + 0.2 * cy
        })
        .unwrap();
        let out = gaussian_smooth(&img, &GaussParams::new(2.5)).unwrap();
        let mean = |p: &[f64]| p.iter().sum::<f64>() / p.len() as f64;
        assert!((mean(img.plane(0)) - mean(out.plane(0))).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_sigma() {
        let img = Image::filled(4, 4, 1, 0.0).unwrap();
        assert!(gaussian_smooth(&img, &GaussParams::new(0.0)).is_err());
    }
}
