use super::{check_same_shape, MetricParams};
use crate::error::{Error, Result};
use crate::raster::Image;
use crate::spatial::gaussian_kernel_1d;

/// Mean SSIM over every position where the Gaussian window fits inside the
/// image, computed on 0–255 samples. Color images average their channels.
pub fn ssim(reference: &Image, test: &Image, params: &MetricParams) -> Result<f64> {
    Ok(ssim_per_channel(reference, test, params)?.iter().sum::<f64>() / reference.channels() as f64)
}

pub fn ssim_per_channel(reference: &Image, test: &Image, params: &MetricParams) -> Result<Vec<f64>> {
    check_same_shape(reference, test)?;
    let win = params.ssim_window;
    if reference.width() < win || reference.height() < win {
        return Err(Error::TooSmall(format!(
            "SSIM needs at least {win}x{win}, got {}x{}",
            reference.width(),
            reference.height()
        )));
    }
    let kernel = gaussian_kernel_1d(params.ssim_sigma, win / 2);
    Ok(reference
        .planes()
        .iter()
        .zip(test.planes())
        .map(|(a, b)| ssim_plane(a, b, reference.width(), reference.height(), &kernel, params))
        .collect())
}

/// Separable "valid" filtering: output is `(w - k + 1) x (h - k + 1)`.
fn filter_valid(src: &[f64], w: usize, h: usize, kernel: &[f64]) -> Vec<f64> {
    let k = kernel.len();
    let ow = w - k + 1;
    let oh = h - k + 1;
    let mut tmp = vec![0.0; ow * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..ow {
            tmp[y * ow + x] = kernel.iter().zip(&row[x..x + k]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = kernel.iter().enumerate().map(|(i, kv)| kv * tmp[(y + i) * ow + x]).sum();
        }
    }
    out
}

fn ssim_plane(a: &[f64], b: &[f64], w: usize, h: usize, kernel: &[f64], params: &MetricParams) -> f64 {
    let l = params.dynamic_range;
    let c1 = (params.ssim_k1 * l).powi(2);
    let c2 = (params.ssim_k2 * l).powi(2);
    let x: Vec<f64> = a.iter().map(|v| l * v).collect();
    let y: Vec<f64> = b.iter().map(|v| l * v).collect();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p * q).collect();
    let mu_x = filter_valid(&x, w, h, kernel);
    let mu_y = filter_valid(&y, w, h, kernel);
    let e_xx = filter_valid(&xx, w, h, kernel);
    let e_yy = filter_valid(&yy, w, h, kernel);
    let e_xy = filter_valid(&xy, w, h, kernel);
    let n = mu_x.len();
    let mut total = 0.0;
    for i in 0..n {
        let (mx, my) = (mu_x[i], mu_y[i]);
        let var_x = e_xx[i] - mx * mx;
        let var_y = e_yy[i] - my * my;
        let cov = e_xy[i] - mx * my;
        let num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
        let den = (mx * mx + my * my + c1) * (var_x + var_y + c2);
        total += num / den;
    }
    total / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_image(w: usize, h: usize, seed: u64) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Image::gray(w, h, (0..w * h).map(|_| rng.random::<f64>()).collect()).unwrap()
    }

    #[test]
    fn identity_is_exactly_one() {
        let img = random_image(20, 17, 1);
        assert_eq!(ssim(&img, &img, &MetricParams::default()).unwrap(), 1.0);
    }

    #[test]
    fn black_versus_white_closed_form() {
        let a = Image::filled(16, 16, 1, 0.0).unwrap();
        let b = Image::filled(16, 16, 1, 1.0).unwrap();
        let c1 = (0.01f64 * 255.0).powi(2);
        let expected = c1 / (255.0f64.powi(2) + c1);
        let got = ssim(&a, &b, &MetricParams::default()).unwrap();
        assert!((got - expected).abs() < 1e-8);
        assert!((got - 9.999e-5).abs() < 1e-8);
    }

    #[test]
    fn symmetric_in_arguments() {
        let p = MetricParams::default();
        for seed in 0..4 {
            let (a, b) = (random_image(24, 24, seed), random_image(24, 24, seed + 100));
            assert!((ssim(&a, &b, &p).unwrap() - ssim(&b, &a, &p).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn too_small_rejected() {
        let img = Image::filled(10, 30, 1, 0.5).unwrap();
        assert!(matches!(ssim(&img, &img, &MetricParams::default()), Err(Error::TooSmall(_))));
    }

    #[test]
    fn color_is_channel_mean() {
        let (a, b) = (random_image(16, 16, 1), random_image(16, 16, 2));
        let p = MetricParams::default();
        let rgb_a = Image::from_planes(16, 16, vec![a.plane(0).to_vec(), a.plane(0).to_vec(), b.plane(0).to_vec()]).unwrap();
        let rgb_b = Image::from_planes(16, 16, vec![b.plane(0).to_vec(), a.plane(0).to_vec(), b.plane(0).to_vec()]).unwrap();
        let s = ssim(&a, &b, &p).unwrap();
        assert!((ssim(&rgb_a, &rgb_b, &p).unwrap() - (s + 2.0) / 3.0).abs() < 1e-12);
    }
}
