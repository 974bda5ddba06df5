//! Spectral-band quality score in the spirit of SUM of Modified Error Ratios.
//!
//! Per channel, the DFT magnitude spectra of reference and test are split into
//! `summer_bands` concentric rings of equal radial width up to the Nyquist
//! radius 0.5 cycles/pixel (corner frequencies beyond it join the outermost
//! ring). Ring `b` yields the error ratio
//! `r_b = sum |M_ref - M_test| / (sum M_ref + eps)` and the channel scores
//! `scale * sum_b w_b exp(-r_b)`. Channels are averaged.
//!
//! This is not bit-compatible with the published SUMMER metric and is
//! reported as `summer_like` everywhere. It is not symmetric in its arguments.

use rustfft::FftDirection;

use super::fft::{bin_frequency, fft2, real_to_complex};
use super::{check_same_shape, MetricParams};
use crate::error::{Error, Result};
use crate::raster::Image;

pub fn summer_like(reference: &Image, test: &Image, params: &MetricParams) -> Result<f64> {
    let per_channel = summer_like_per_channel(reference, test, params)?;
    Ok(per_channel.iter().sum::<f64>() / per_channel.len() as f64)
}

pub fn summer_like_per_channel(reference: &Image, test: &Image, params: &MetricParams) -> Result<Vec<f64>> {
    check_same_shape(reference, test)?;
    if params.summer_weights.len() != params.summer_bands || params.summer_bands == 0 {
        return Err(Error::InvalidParameter(format!(
            "{} band weights for {} bands",
            params.summer_weights.len(),
            params.summer_bands
        )));
    }
    let (w, h) = (reference.width(), reference.height());
    let bands = band_map(w, h, params.summer_bands);
    Ok(reference
        .planes()
        .iter()
        .zip(test.planes())
        .map(|(a, b)| {
            let ma = magnitude_spectrum(a, w, h);
            let mb = magnitude_spectrum(b, w, h);
            let mut err = vec![0.0; params.summer_bands];
            let mut energy = vec![0.0; params.summer_bands];
            for i in 0..ma.len() {
                err[bands[i]] += (ma[i] - mb[i]).abs();
                energy[bands[i]] += ma[i];
            }
            let weighted: f64 = params
                .summer_weights
                .iter()
                .zip(err.iter().zip(&energy))
                .map(|(wb, (e, m))| wb * (-(e / (m + params.summer_eps))).exp())
                .sum();
            params.summer_scale * weighted
        })
        .collect())
}

fn magnitude_spectrum(plane: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut buf = real_to_complex(plane);
    fft2(&mut buf, w, h, FftDirection::Forward);
    buf.iter().map(|c| c.norm()).collect()
}

/// Ring index of every DFT bin.
fn band_map(w: usize, h: usize, bands: usize) -> Vec<usize> {
    let width = 0.5 / bands as f64;
    let mut map = Vec::with_capacity(w * h);
    for ky in 0..h {
        let fy = bin_frequency(ky, h);
        for kx in 0..w {
            let r = bin_frequency(kx, w).hypot(fy);
            map.push(((r / width) as usize).min(bands - 1));
        }
    }
    map
}
