//! Non-local means.
//!
//! `z_i = sum_j w_ij y_j / sum_j w_ij` over the search window around `i`
//! (clipped to the image, `j = i` included), with
//! `w_ij = exp(-d2(i, j) / h^2)` and `d2` the Gaussian-weighted squared
//! distance between the patches around `i` and `j`. Patches that cross the
//! border read half-sample reflected pixels. `h = h_factor * sigma_est / 255`.
//!
//! The fast path walks offsets instead of pixels: for each offset it builds
//! the squared-difference plane and blurs it with the separable patch kernel,
//! which yields `d2` for every pixel at once. Offsets are visited in mirror
//! groups `(±dx, ±dy)` whose contributions are summed pairwise before being
//! accumulated, and every 1-D kernel sum adds mirrored taps first, so the
//! output is exactly equivariant under horizontal and vertical flips.

use rayon::prelude::*;

use super::gauss::gaussian_kernel_1d;
use crate::error::{Error, Result};
use crate::noise::estimate_sigma;
use crate::raster::Image;
use crate::wavelet::reflect;

/// Rows handled by one parallel work item.
const STRIP_ROWS: usize = 8;

/// Noise estimates (0–255 scale) below this are treated as noise-free.
pub const SIGMA_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NlmParams {
    /// Patch half-width (3 gives 7x7 patches).
    pub patch_radius: usize,
    /// Search window half-width (10 gives a 21x21 window).
    pub search_radius: usize,
    /// `h = h_factor * sigma_est`.
    pub h_factor: f64,
    /// Noise std on the 0–255 scale; estimated from the input when `None`.
    pub sigma_est: Option<f64>,
    /// Std of the patch kernel in pixels; `patch_radius / 2` when `None`.
    pub kernel_sigma: Option<f64>,
}

impl Default for NlmParams {
    fn default() -> Self {
        Self {
            patch_radius: 3,
            search_radius: 10,
            h_factor: 0.8,
            sigma_est: None,
            kernel_sigma: None,
        }
    }
}

impl NlmParams {
    pub fn with_h_factor(mut self, h_factor: f64) -> Self {
        self.h_factor = h_factor;
        self
    }

    pub fn with_sigma(mut self, sigma255: f64) -> Self {
        self.sigma_est = Some(sigma255);
        self
    }

    /// Checks the parameters alone, independent of any image.
    pub fn validate(&self) -> Result<()> {
        if self.patch_radius < 1 {
            return Err(Error::InvalidParameter("patch_radius must be >= 1".into()));
        }
        if self.search_radius < self.patch_radius {
            return Err(Error::InvalidParameter(format!(
                "search_radius {} is smaller than patch_radius {}",
                self.search_radius, self.patch_radius
            )));
        }
        if !(self.h_factor > 0.0) || !self.h_factor.is_finite() {
            return Err(Error::InvalidParameter(format!("h_factor must be positive, got {}", self.h_factor)));
        }
        if let Some(s) = self.sigma_est {
            if !(s >= 0.0) || !s.is_finite() {
                return Err(Error::InvalidParameter(format!("sigma_est must be >= 0, got {s}")));
            }
        }
        if let Some(k) = self.kernel_sigma {
            if !(k > 0.0) {
                return Err(Error::InvalidParameter(format!("kernel_sigma must be positive, got {k}")));
            }
        }
        Ok(())
    }

    fn validate_for(&self, img: &Image) -> Result<()> {
        self.validate()?;
        let side = 2 * self.patch_radius + 1;
        if img.width() < side || img.height() < side {
            return Err(Error::TooSmall(format!(
                "{}x{} image is smaller than a {side}x{side} patch",
                img.width(),
                img.height()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlmStatus {
    Ok,
    /// `h` came out as zero (noise-free estimate); the input was returned.
    DegenerateH,
}

#[derive(Debug, Clone)]
pub struct NlmOutput {
    pub image: Image,
    /// Noise std (0–255 scale) that `h` was derived from.
    pub sigma_est: f64,
    /// Decay parameter in the normalized domain.
    pub h: f64,
    pub status: NlmStatus,
}

struct Resolved {
    patch_radius: usize,
    search_radius: usize,
    inv_h2: f64,
    /// One side of the separable patch kernel, normalized to unit sum.
    kernel: Vec<f64>,
}

fn resolve(img: &Image, params: &NlmParams) -> Result<(f64, f64, Resolved)> {
    params.validate_for(img)?;
    let sigma = match params.sigma_est {
        Some(s) => s,
        None => estimate_sigma(img)?,
    };
    let h = if sigma < SIGMA_FLOOR { 0.0 } else { params.h_factor * sigma / 255.0 };
    let kernel_sigma = params.kernel_sigma.unwrap_or(params.patch_radius as f64 / 2.0);
    Ok((
        sigma,
        h,
        Resolved {
            patch_radius: params.patch_radius,
            search_radius: params.search_radius,
            inv_h2: 1.0 / (h * h),
            kernel: gaussian_kernel_1d(kernel_sigma, params.patch_radius),
        },
    ))
}

/// Accelerated non-local means; each channel is filtered independently with
/// a shared `h` (channel noise estimates are averaged).
pub fn nlm_denoise(img: &Image, params: &NlmParams) -> Result<NlmOutput> {
    let (sigma_est, h, cfg) = resolve(img, params)?;
    if h == 0.0 {
        return Ok(NlmOutput {
            image: img.clone(),
            sigma_est,
            h,
            status: NlmStatus::DegenerateH,
        });
    }
    let (w, ht) = (img.width(), img.height());
    let image = img.map_planes(|plane| nlm_plane(plane, w, ht, &cfg));
    Ok(NlmOutput {
        image,
        sigma_est,
        h,
        status: NlmStatus::Ok,
    })
}

/// Border-padded copy of a plane.
struct Padded {
    data: Vec<f64>,
    width: usize,
    pad: usize,
}

impl Padded {
    fn new(src: &[f64], w: usize, h: usize, pad: usize) -> Self {
        let pw = w + 2 * pad;
        let ph = h + 2 * pad;
        let mut data = Vec::with_capacity(pw * ph);
        for py in 0..ph {
            let sy = reflect(py as isize - pad as isize, h);
            for px in 0..pw {
                data.push(src[sy * w + reflect(px as isize - pad as isize, w)]);
            }
        }
        Self { data, width: pw, pad }
    }

    /// Sample at image coordinates, which may lie up to `pad` outside.
    #[inline]
    fn at(&self, x: isize, y: isize) -> f64 {
        let px = (x + self.pad as isize) as usize;
        let py = (y + self.pad as isize) as usize;
        self.data[py * self.width + px]
    }
}

/// Symmetric 1-D kernel sum: `k0 v0 + sum_m k_m (v_-m + v_+m)`.
#[inline]
fn mirrored_sum(kernel: &[f64], r: usize, get: impl Fn(isize) -> f64) -> f64 {
    let mut acc = kernel[r] * get(0);
    for m in 1..=r {
        acc += kernel[r + m] * (get(-(m as isize)) + get(m as isize));
    }
    acc
}

fn nlm_plane(src: &[f64], w: usize, h: usize, cfg: &Resolved) -> Vec<f64> {
    let padded = Padded::new(src, w, h, cfg.patch_radius + cfg.search_radius);
    let strips: Vec<usize> = (0..h).step_by(STRIP_ROWS).collect();
    let parts: Vec<Vec<f64>> = strips
        .par_iter()
        .map(|&y0| nlm_strip(src, &padded, w, h, y0, (y0 + STRIP_ROWS).min(h), cfg))
        .collect();
    parts.concat()
}

/// Weight and weighted-value planes for one offset over a strip.
struct OffsetTerms {
    weight: Vec<f64>,
    value: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
fn offset_terms(
    src: &[f64],
    padded: &Padded,
    w: usize,
    h: usize,
    y0: usize,
    y1: usize,
    (dx, dy): (isize, isize),
    cfg: &Resolved,
    diff: &mut Vec<f64>,
    vert: &mut Vec<f64>,
    out: &mut OffsetTerms,
) {
    let r = cfg.patch_radius;
    let ri = r as isize;
    let sh = y1 - y0;
    let dw = w + 2 * r;
    let dh = sh + 2 * r;

    diff.clear();
    for row in 0..dh {
        let y = (y0 + row) as isize - ri;
        for col in 0..dw {
            let x = col as isize - ri;
            let d = padded.at(x, y) - padded.at(x + dx, y + dy);
            diff.push(d * d);
        }
    }
    vert.clear();
    for row in 0..sh {
        for col in 0..dw {
            vert.push(mirrored_sum(&cfg.kernel, r, |m| diff[((row + r) as isize + m) as usize * dw + col]));
        }
    }
    out.weight.clear();
    out.value.clear();
    for row in 0..sh {
        let y = (y0 + row) as isize;
        let ny = y + dy;
        for x in 0..w {
            let nx = x as isize + dx;
            if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                out.weight.push(0.0);
                out.value.push(0.0);
                continue;
            }
            let d2 = mirrored_sum(&cfg.kernel, r, |m| vert[row * dw + ((x + r) as isize + m) as usize]);
            let wt = (-d2 * cfg.inv_h2).exp();
            out.weight.push(wt);
            out.value.push(wt * src[ny as usize * w + nx as usize]);
        }
    }
}

fn nlm_strip(src: &[f64], padded: &Padded, w: usize, h: usize, y0: usize, y1: usize, cfg: &Resolved) -> Vec<f64> {
    let n = (y1 - y0) * w;
    let mut num = vec![0.0; n];
    let mut den = vec![0.0; n];
    let (mut diff, mut vert) = (Vec::new(), Vec::new());
    let mut terms: Vec<OffsetTerms> = (0..4)
        .map(|_| OffsetTerms {
            weight: Vec::with_capacity(n),
            value: Vec::with_capacity(n),
        })
        .collect();
    let s = cfg.search_radius as isize;
    for ay in 0..=s {
        for ax in 0..=s {
            let group: &[(isize, isize)] = match (ax, ay) {
                (0, 0) => &[(0, 0)],
                (0, _) => &[(0, ay), (0, -ay)],
                (_, 0) => &[(ax, 0), (-ax, 0)],
                _ => &[(ax, ay), (-ax, ay), (ax, -ay), (-ax, -ay)],
            };
            for (off, t) in group.iter().zip(terms.iter_mut()) {
                offset_terms(src, padded, w, h, y0, y1, *off, cfg, &mut diff, &mut vert, t);
            }
            match group.len() {
                1 => {
                    for i in 0..n {
                        den[i] += terms[0].weight[i];
                        num[i] += terms[0].value[i];
                    }
                }
                2 => {
                    for i in 0..n {
                        den[i] += terms[0].weight[i] + terms[1].weight[i];
                        num[i] += terms[0].value[i] + terms[1].value[i];
                    }
                }
                _ => {
                    for i in 0..n {
                        den[i] += (terms[0].weight[i] + terms[1].weight[i]) + (terms[2].weight[i] + terms[3].weight[i]);
                        num[i] += (terms[0].value[i] + terms[1].value[i]) + (terms[2].value[i] + terms[3].value[i]);
                    }
                }
            }
        }
    }
    num.iter().zip(&den).map(|(a, b)| a / b).collect()
}

/// Literal per-pixel evaluation of the weighted average with the full 2-D
/// patch kernel. O(N * W^2 * P^2); kept as the reference for the fast path.
pub fn nlm_denoise_reference(img: &Image, params: &NlmParams) -> Result<NlmOutput> {
    let (sigma_est, h, cfg) = resolve(img, params)?;
    if h == 0.0 {
        return Ok(NlmOutput {
            image: img.clone(),
            sigma_est,
            h,
            status: NlmStatus::DegenerateH,
        });
    }
    let (w, ht) = (img.width(), img.height());
    let r = cfg.patch_radius as isize;
    let s = cfg.search_radius as isize;
    let k = &cfg.kernel;
    let h2 = h * h;
    let image = img.map_planes(|y| {
        let sample = |x: isize, yy: isize| y[reflect(yy, ht) * w + reflect(x, w)];
        let mut z = Vec::with_capacity(w * ht);
        for iy in 0..ht as isize {
            for ix in 0..w as isize {
                let (mut num, mut den) = (0.0, 0.0);
                for jy in (iy - s).max(0)..=(iy + s).min(ht as isize - 1) {
                    for jx in (ix - s).max(0)..=(ix + s).min(w as isize - 1) {
                        let mut d2 = 0.0;
                        for my in -r..=r {
                            for mx in -r..=r {
                                let km = k[(my + r) as usize] * k[(mx + r) as usize];
                                let diff = sample(ix + mx, iy + my) - sample(jx + mx, jy + my);
                                d2 += km * diff * diff;
                            }
                        }
                        let wij = (-d2 / h2).exp();
                        num += wij * sample(jx, jy);
                        den += wij;
                    }
                }
                z.push(num / den);
            }
        }
        z
    });
    Ok(NlmOutput {
        image,
        sigma_est,
        h,
        status: NlmStatus::Ok,
    })
}
