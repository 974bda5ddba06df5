//! Complex-wavelet SSIM over a frequency-domain log-Gabor filter bank.
//!
//! Scale `s` is centred on wavelength `MIN_WAVELENGTH * 2^s` pixels with a
//! radial bandwidth ratio of `RADIAL_SIGMA_RATIO`; orientation `o` points at
//! `o * pi / orientations` with an angular Gaussian of std
//! `(pi / orientations) / 1.2`. The angular window is one-sided, so the
//! filtered responses are (very nearly) analytic and complex-valued.
//! Nyquist rows and columns of even-sized grids are zeroed so the bank is
//! mirror-symmetric on the grid and scores survive image flips.
//!
//! For each subband, every `window x window` block of coefficients scores
//! `(2 |sum x y*| + K) / (sum |x|^2 + sum |y|^2 + K)`. Scores are averaged
//! over blocks, then orientations, then scales.

use rustfft::num_complex::Complex64;
use rustfft::FftDirection;

use super::fft::{bin_frequency, fft2, real_to_complex};
use super::{check_same_shape, MetricParams};
use crate::error::{Error, Result};
use crate::raster::{to_gray, Image};

pub const MIN_WAVELENGTH: f64 = 4.0;
pub const RADIAL_SIGMA_RATIO: f64 = 0.55;
const ANGULAR_SPREAD: f64 = 1.2;

/// Smallest image side accepted for `scales` scales.
pub fn min_side(scales: usize) -> usize {
    (2.0 * MIN_WAVELENGTH * 2f64.powi(scales as i32 - 1)).ceil() as usize
}

pub fn cw_ssim(reference: &Image, test: &Image, params: &MetricParams) -> Result<f64> {
    check_same_shape(reference, test)?;
    let (w, h) = (reference.width(), reference.height());
    let need = min_side(params.cwssim_scales).max(params.cwssim_window);
    if w.min(h) < need {
        return Err(Error::TooSmall(format!("CW-SSIM needs at least {need}x{need}, got {w}x{h}")));
    }
    if params.cwssim_scales == 0 || params.cwssim_orientations == 0 {
        return Err(Error::InvalidParameter("CW-SSIM needs at least one scale and orientation".into()));
    }
    let mut fx = real_to_complex(to_gray(reference).plane(0));
    let mut fy = real_to_complex(to_gray(test).plane(0));
    fft2(&mut fx, w, h, FftDirection::Forward);
    fft2(&mut fy, w, h, FftDirection::Forward);

    let mut scale_scores = Vec::with_capacity(params.cwssim_scales);
    for s in 0..params.cwssim_scales {
        let mut orient_total = 0.0;
        for o in 0..params.cwssim_orientations {
            let filter = log_gabor(w, h, s, o, params.cwssim_orientations);
            let cx = subband(&fx, &filter, w, h);
            let cy = subband(&fy, &filter, w, h);
            orient_total += windowed_index(&cx, &cy, w, h, params.cwssim_window, params.cwssim_k);
        }
        scale_scores.push(orient_total / params.cwssim_orientations as f64);
    }
    Ok(scale_scores.iter().sum::<f64>() / scale_scores.len() as f64)
}

/// Frequency response of one log-Gabor filter on the DFT grid.
fn log_gabor(w: usize, h: usize, scale: usize, orientation: usize, orientations: usize) -> Vec<f64> {
    let f0 = 1.0 / (MIN_WAVELENGTH * 2f64.powi(scale as i32));
    let log_ratio = RADIAL_SIGMA_RATIO.ln();
    let angle_step = std::f64::consts::PI / orientations as f64;
    let theta0 = orientation as f64 * angle_step;
    let sigma_theta = angle_step / ANGULAR_SPREAD;
    let mut g = Vec::with_capacity(w * h);
    for ky in 0..h {
        let fy = bin_frequency(ky, h);
        for kx in 0..w {
            let fx = bin_frequency(kx, w);
            let radius = fx.hypot(fy);
            let nyquist = (w.is_multiple_of(2) && kx == w / 2) || (h.is_multiple_of(2) && ky == h / 2);
            if radius == 0.0 || nyquist {
                g.push(0.0);
                continue;
            }
            let radial = (-(radius / f0).ln().powi(2) / (2.0 * log_ratio * log_ratio)).exp();
            let theta = fy.atan2(fx);
            let mut d = theta - theta0;
            d = (d + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI) - std::f64::consts::PI;
            let angular = (-d * d / (2.0 * sigma_theta * sigma_theta)).exp();
            g.push(radial * angular);
        }
    }
    g
}

fn subband(spectrum: &[Complex64], filter: &[f64], w: usize, h: usize) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = spectrum.iter().zip(filter).map(|(c, g)| c * g).collect();
    fft2(&mut buf, w, h, FftDirection::Inverse);
    let norm = 1.0 / (w * h) as f64;
    buf.iter_mut().for_each(|c| *c *= norm);
    buf
}

/// Sums of a row-major plane over every `k x k` block fully inside it.
fn box_sums(src: &[f64], w: usize, h: usize, k: usize) -> Vec<f64> {
    let ow = w - k + 1;
    let oh = h - k + 1;
    let mut tmp = vec![0.0; ow * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..ow {
            tmp[y * ow + x] = row[x..x + k].iter().sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = (0..k).map(|i| tmp[(y + i) * ow + x]).sum();
        }
    }
    out
}

fn windowed_index(cx: &[Complex64], cy: &[Complex64], w: usize, h: usize, k: usize, stabilizer: f64) -> f64 {
    // x * conj(y), written out so that x == y gives bitwise-identical sums
    let cross_re: Vec<f64> = cx.iter().zip(cy).map(|(a, b)| a.re * b.re + a.im * b.im).collect();
    let cross_im: Vec<f64> = cx.iter().zip(cy).map(|(a, b)| a.im * b.re - a.re * b.im).collect();
    let ex: Vec<f64> = cx.iter().map(|a| a.re * a.re + a.im * a.im).collect();
    let ey: Vec<f64> = cy.iter().map(|b| b.re * b.re + b.im * b.im).collect();
    let (sr, si) = (box_sums(&cross_re, w, h, k), box_sums(&cross_im, w, h, k));
    let (sx, sy) = (box_sums(&ex, w, h, k), box_sums(&ey, w, h, k));
    let n = sr.len();
    let total: f64 = (0..n)
        .map(|i| (2.0 * sr[i].hypot(si[i]) + stabilizer) / (sx[i] + sy[i] + stabilizer))
        .sum();
    total / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iqa::ssim;

    fn texture(w: usize, h: usize) -> Image {
        use std::f64::consts::PI;
        Image::from_fn(w, h, |x, y| {
            let (x, y) = (x as f64, y as f64);
            0.5 + 0.15 * (2.0 * PI * x / 6.4).sin()
                + 0.12 * (2.0 * PI * (x + y) / 9.0).cos()
                + 0.1 * (2.0 * PI * y / 5.333).sin()
        })
        .unwrap()
    }

    #[test]
    fn identity_is_one() {
        let img = texture(64, 48);
        let s = cw_ssim(&img, &img, &MetricParams::default()).unwrap();
        assert!((s - 1.0).abs() < 1e-9, "{s}");
    }

    #[test]
    fn blank_test_scores_near_zero() {
        let img = texture(64, 64);
        let blank = Image::filled(64, 64, 1, 0.0).unwrap();
        let s = cw_ssim(&img, &blank, &MetricParams::default()).unwrap();
        assert!(s > 0.0 && s < 0.05, "{s}");
    }

    #[test]
    fn robust_to_small_translation() {
        let img = texture(64, 64);
        // circular one-pixel shift
        let shifted = Image::from_fn(64, 64, |x, y| img.get(0, (x + 63) % 64, y)).unwrap();
        let p = MetricParams::default();
        let cw_drop = 1.0 - cw_ssim(&img, &shifted, &p).unwrap();
        let ssim_drop = 1.0 - ssim(&img, &shifted, &p).unwrap();
        assert!(cw_drop < 0.05, "cw-ssim drop {cw_drop}");
        assert!(ssim_drop > 0.15, "ssim drop {ssim_drop}");
    }

    #[test]
    fn filter_bank_has_no_dc_and_is_one_sided() {
        let g = log_gabor(32, 32, 0, 0, 4);
        assert_eq!(g[0], 0.0);
        // +f along x versus -f along x
        let pos = g[8];
        let neg = g[32 - 8];
        assert!(pos > 0.5 && neg < 1e-4);
    }

    #[test]
    fn too_small_rejected() {
        let img = Image::filled(31, 64, 1, 0.5).unwrap();
        assert!(matches!(cw_ssim(&img, &img, &MetricParams::default()), Err(Error::TooSmall(_))));
        assert_eq!(min_side(3), 32);
    }
}
