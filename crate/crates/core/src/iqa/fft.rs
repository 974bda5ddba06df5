use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// In-place unnormalized 2-D DFT of a row-major `w x h` buffer.
pub(crate) fn fft2(data: &mut [Complex64], w: usize, h: usize, direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft(w, direction);
    for row in data.chunks_exact_mut(w) {
        row_fft.process(row);
    }
    let col_fft = planner.plan_fft(h, direction);
    let mut col = vec![Complex64::new(0.0, 0.0); h];
    for x in 0..w {
        for y in 0..h {
            col[y] = data[y * w + x];
        }
        col_fft.process(&mut col);
        for y in 0..h {
            data[y * w + x] = col[y];
        }
    }
}

/// Signed frequency in cycles per sample for DFT bin `k` of an `n`-point grid.
#[inline]
pub(crate) fn bin_frequency(k: usize, n: usize) -> f64 {
    if 2 * k < n {
        k as f64 / n as f64
    } else {
        (k as f64 - n as f64) / n as f64
    }
}

pub(crate) fn real_to_complex(plane: &[f64]) -> Vec<Complex64> {
    plane.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_inverse_round_trip() {
        let (w, h) = (6, 5);
        let orig: Vec<f64> = (0..w * h).map(|i| ((i * 13) % 7) as f64).collect();
        let mut buf = real_to_complex(&orig);
        fft2(&mut buf, w, h, FftDirection::Forward);
        assert!((buf[0].re - orig.iter().sum::<f64>()).abs() < 1e-12);
        fft2(&mut buf, w, h, FftDirection::Inverse);
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a.re / (w * h) as f64 - b).abs() < 1e-12);
            assert!(a.im.abs() < 1e-10);
        }
    }

    #[test]
    fn bin_frequencies_are_signed() {
        let f: Vec<f64> = (0..4).map(|k| bin_frequency(k, 4)).collect();
        assert_eq!(f, vec![0.0, 0.25, -0.5, -0.25]);
        let f: Vec<f64> = (0..5).map(|k| bin_frequency(k, 5)).collect();
        assert_eq!(f, vec![0.0, 0.2, 0.4, -0.4, -0.2]);
    }
}
