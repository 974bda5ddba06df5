//! Separable multilevel 2-D fast wavelet transform.
//!
//! One analysis step convolves with the analysis filter and keeps the odd
//! samples of the full convolution, `c[k] = sum_j f[j] * x[2k + 1 - j]`, where
//! `x` is extended past its ends according to [`Extension`].
//!
//! * `Symmetric`: half-sample symmetric extension (`.. x1 x0 | x0 x1 ..`).
//!   A length-`n` signal yields `(n + L - 1) / 2` coefficients per band, which
//!   keeps reconstruction exact for odd and even lengths alike.
//! * `Periodic`: the signal is padded to even length by repeating its last
//!   sample and wrapped; yields `ceil(n / 2)` coefficients per band. The
//!   transform is orthonormal for even lengths, so it is used for energy
//!   checks.
//!
//! Subband naming: the first letter is the filter along x (rows), the second
//! along y (columns). `lh` is lowpass in x and highpass in y.

use super::filter::WaveletFilterBank;
use crate::error::{Error, Result};

/// Boundary handling of the analysis step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Extension {
    #[default]
    Symmetric,
    Periodic,
}

/// Smallest signal length a decomposition level accepts.
pub const MIN_LEVEL_INPUT: usize = 4;

/// Row-major real plane used for subbands.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height, "plane length mismatch");
        Self { width, height, data }
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::new(width, height, vec![0.0; width * height])
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self::new(self.width, self.height, self.data.iter().map(|v| a * v).collect())
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn l1(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }
}

/// Detail subbands of one decomposition level.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailLevel {
    pub lh: Plane,
    pub hl: Plane,
    pub hh: Plane,
}

impl DetailLevel {
    pub fn bands(&self) -> [&Plane; 3] {
        [&self.lh, &self.hl, &self.hh]
    }

    pub fn bands_mut(&mut self) -> [&mut Plane; 3] {
        [&mut self.lh, &mut self.hl, &mut self.hh]
    }
}

/// Multilevel decomposition. `details[0]` is the finest level; `shapes[l]`
/// is the `(width, height)` of the plane that level `l` decomposed.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletPyramid {
    pub approx: Plane,
    pub details: Vec<DetailLevel>,
    pub shapes: Vec<(usize, usize)>,
    pub extension: Extension,
}

impl WaveletPyramid {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn original_shape(&self) -> (usize, usize) {
        self.shapes[0]
    }

    /// Multiplies every coefficient by `a`.
    pub fn scaled(&self, a: f64) -> Self {
        Self {
            approx: self.approx.scaled(a),
            details: self
                .details
                .iter()
                .map(|d| DetailLevel {
                    lh: d.lh.scaled(a),
                    hl: d.hl.scaled(a),
                    hh: d.hh.scaled(a),
                })
                .collect(),
            shapes: self.shapes.clone(),
            extension: self.extension,
        }
    }

    pub fn energy(&self) -> f64 {
        self.approx.energy()
            + self
                .details
                .iter()
                .flat_map(|d| d.bands())
                .map(Plane::energy)
                .sum::<f64>()
    }
}

/// Number of coefficients per band for a length-`n` signal.
pub fn coeff_len(n: usize, filter_len: usize, ext: Extension) -> usize {
    match ext {
        Extension::Symmetric => (n + filter_len - 1) / 2,
        Extension::Periodic => n.div_ceil(2),
    }
}

/// Deepest level count for which every level input is at least
/// [`MIN_LEVEL_INPUT`] samples along both axes.
pub fn max_levels(width: usize, height: usize, filter_len: usize, ext: Extension) -> usize {
    let (mut w, mut h, mut levels) = (width, height, 0);
    while w.min(h) >= MIN_LEVEL_INPUT {
        levels += 1;
        w = coeff_len(w, filter_len, ext);
        h = coeff_len(h, filter_len, ext);
    }
    levels
}

/// Half-sample symmetric index into `[0, n)`.
#[inline]
pub(crate) fn reflect(t: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = t.rem_euclid(period) as usize;
    if m < n {
        m
    } else {
        2 * n - 1 - m
    }
}

/// One analysis step of a 1-D signal into (lowpass, highpass) coefficients.
pub fn analyze_1d(x: &[f64], bank: &WaveletFilterBank, ext: Extension) -> (Vec<f64>, Vec<f64>) {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    let mut scratch = Vec::new();
    analyze_into(x, bank, ext, &mut scratch, &mut lo, &mut hi);
    (lo, hi)
}

fn analyze_into(
    x: &[f64],
    bank: &WaveletFilterBank,
    ext: Extension,
    scratch: &mut Vec<f64>,
    lo: &mut Vec<f64>,
    hi: &mut Vec<f64>,
) {
    let n = x.len();
    let taps = bank.len();
    let nc = coeff_len(n, taps, ext);
    // Extended signal covering indices [-(taps - 2), 2 * nc - 1].
    let left = taps - 2;
    let span = 2 * nc + left;
    scratch.clear();
    match ext {
        Extension::Symmetric => {
            scratch.extend((0..span).map(|i| x[reflect(i as isize - left as isize, n)]));
        }
        Extension::Periodic => {
            let ne = 2 * nc;
            let padded = |t: usize| if t < n { x[t] } else { x[n - 1] };
            scratch.extend((0..span).map(|i| padded((i as isize - left as isize).rem_euclid(ne as isize) as usize)));
        }
    }
    lo.clear();
    hi.clear();
    let (h, g) = (&bank.lowpass_analysis, &bank.highpass_analysis);
    for k in 0..nc {
        // x[2k + 1 - j] lives at scratch[2k + 1 - j + left]
        let base = 2 * k + 1 + left;
        let (mut a, mut d) = (0.0, 0.0);
        for j in 0..taps {
            let v = scratch[base - j];
            a += h[j] * v;
            d += g[j] * v;
        }
        lo.push(a);
        hi.push(d);
    }
}

/// Inverse of [`analyze_1d`] restoring a signal of length `n`.
pub fn synthesize_1d(lo: &[f64], hi: &[f64], n: usize, bank: &WaveletFilterBank, ext: Extension) -> Vec<f64> {
    let mut out = Vec::new();
    synthesize_into(lo, hi, n, bank, ext, &mut out);
    out
}

fn synthesize_into(lo: &[f64], hi: &[f64], n: usize, bank: &WaveletFilterBank, ext: Extension, out: &mut Vec<f64>) {
    let nc = lo.len();
    let taps = bank.len();
    let (hs, gs) = (&bank.lowpass_synthesis, &bank.highpass_synthesis);
    out.clear();
    match ext {
        Extension::Symmetric => {
            // x[i] = sum over 2k + 1 - j = i of h[j] a[k] + g[j] d[k]
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..taps {
                    let t = i + j;
                    if t == 0 || (t - 1) % 2 != 0 {
                        continue;
                    }
                    let k = (t - 1) / 2;
                    if k < nc {
                        acc += hs[taps - 1 - j] * lo[k] + gs[taps - 1 - j] * hi[k];
                    }
                }
                out.push(acc);
            }
        }
        Extension::Periodic => {
            let ne = 2 * nc;
            out.resize(ne, 0.0);
            for k in 0..nc {
                for j in 0..taps {
                    let i = (2 * k as isize + 1 - j as isize).rem_euclid(ne as isize) as usize;
                    out[i] += hs[taps - 1 - j] * lo[k] + gs[taps - 1 - j] * hi[k];
                }
            }
            out.truncate(n);
        }
    }
}

/// Transforms every row, returning (lowpass, highpass) planes of width `cw`.
fn analyze_rows(p: &Plane, bank: &WaveletFilterBank, ext: Extension) -> (Plane, Plane) {
    let cw = coeff_len(p.width, bank.len(), ext);
    let mut lo = Vec::with_capacity(cw * p.height);
    let mut hi = Vec::with_capacity(cw * p.height);
    let (mut scratch, mut l, mut h) = (Vec::new(), Vec::new(), Vec::new());
    for row in p.data.chunks_exact(p.width) {
        analyze_into(row, bank, ext, &mut scratch, &mut l, &mut h);
        lo.extend_from_slice(&l);
        hi.extend_from_slice(&h);
    }
    (Plane::new(cw, p.height, lo), Plane::new(cw, p.height, hi))
}

fn analyze_cols(p: &Plane, bank: &WaveletFilterBank, ext: Extension) -> (Plane, Plane) {
    let ch = coeff_len(p.height, bank.len(), ext);
    let mut lo = Plane::zeros(p.width, ch);
    let mut hi = Plane::zeros(p.width, ch);
    let (mut col, mut scratch, mut l, mut h) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for x in 0..p.width {
        col.clear();
        col.extend((0..p.height).map(|y| p.data[y * p.width + x]));
        analyze_into(&col, bank, ext, &mut scratch, &mut l, &mut h);
        for y in 0..ch {
            lo.data[y * p.width + x] = l[y];
            hi.data[y * p.width + x] = h[y];
        }
    }
    (lo, hi)
}

fn synthesize_rows(lo: &Plane, hi: &Plane, width: usize, bank: &WaveletFilterBank, ext: Extension) -> Plane {
    let mut data = Vec::with_capacity(width * lo.height);
    let mut row = Vec::new();
    for (l, h) in lo.data.chunks_exact(lo.width).zip(hi.data.chunks_exact(hi.width)) {
        synthesize_into(l, h, width, bank, ext, &mut row);
        data.extend_from_slice(&row);
    }
    Plane::new(width, lo.height, data)
}

fn synthesize_cols(lo: &Plane, hi: &Plane, height: usize, bank: &WaveletFilterBank, ext: Extension) -> Plane {
    let w = lo.width;
    let mut out = Plane::zeros(w, height);
    let (mut l, mut h, mut col) = (Vec::new(), Vec::new(), Vec::new());
    for x in 0..w {
        l.clear();
        h.clear();
        l.extend((0..lo.height).map(|y| lo.data[y * w + x]));
        h.extend((0..hi.height).map(|y| hi.data[y * w + x]));
        synthesize_into(&l, &h, height, bank, ext, &mut col);
        for (y, v) in col.iter().enumerate() {
            out.data[y * w + x] = *v;
        }
    }
    out
}

/// Multilevel 2-D analysis of a single plane.
pub fn dwt2(plane: &Plane, bank: &WaveletFilterBank, levels: usize, ext: Extension) -> Result<WaveletPyramid> {
    let max = max_levels(plane.width, plane.height, bank.len(), ext);
    if levels == 0 || levels > max {
        return Err(Error::InfeasibleLevels {
            levels,
            width: plane.width,
            height: plane.height,
        });
    }
    let mut current = plane.clone();
    let mut details = Vec::with_capacity(levels);
    let mut shapes = Vec::with_capacity(levels);
    for _ in 0..levels {
        shapes.push((current.width, current.height));
        let (row_lo, row_hi) = analyze_rows(&current, bank, ext);
        let (ll, lh) = analyze_cols(&row_lo, bank, ext);
        let (hl, hh) = analyze_cols(&row_hi, bank, ext);
        details.push(DetailLevel { lh, hl, hh });
        current = ll;
    }
    Ok(WaveletPyramid {
        approx: current,
        details,
        shapes,
        extension: ext,
    })
}

/// Multilevel 2-D synthesis; restores the plane at `pyr.shapes[0]`.
pub fn idwt2(pyr: &WaveletPyramid, bank: &WaveletFilterBank) -> Result<Plane> {
    validate(pyr, bank)?;
    let ext = pyr.extension;
    let mut current = pyr.approx.clone();
    for (detail, &(w, h)) in pyr.details.iter().zip(&pyr.shapes).rev() {
        let row_lo = synthesize_cols(&current, &detail.lh, h, bank, ext);
        let row_hi = synthesize_cols(&detail.hl, &detail.hh, h, bank, ext);
        current = synthesize_rows(&row_lo, &row_hi, w, bank, ext);
    }
    Ok(current)
}

fn validate(pyr: &WaveletPyramid, bank: &WaveletFilterBank) -> Result<()> {
    if pyr.details.is_empty() || pyr.details.len() != pyr.shapes.len() {
        return Err(Error::MalformedPyramid(format!(
            "{} detail levels but {} recorded shapes",
            pyr.details.len(),
            pyr.shapes.len()
        )));
    }
    let taps = bank.len();
    for (level, (detail, &(w, h))) in pyr.details.iter().zip(&pyr.shapes).enumerate() {
        let expect = (coeff_len(w, taps, pyr.extension), coeff_len(h, taps, pyr.extension));
        let coarser = if level + 1 < pyr.details.len() {
            let (nw, nh) = pyr.shapes[level + 1];
            (nw, nh)
        } else {
            (pyr.approx.width, pyr.approx.height)
        };
        let bands_ok = detail
            .bands()
            .iter()
            .all(|b| (b.width, b.height) == expect && b.data.len() == b.width * b.height);
        if !bands_ok || coarser != expect {
            return Err(Error::MalformedPyramid(format!(
                "level {} subbands do not match parent shape {w}x{h}",
                level + 1
            )));
        }
    }
    Ok(())
}
