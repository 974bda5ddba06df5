/// Two-channel orthogonal filter bank.
///
/// Analysis filters are applied as convolutions followed by keeping odd
/// output samples; synthesis filters are their time reverses.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFilterBank {
    pub lowpass_analysis: Vec<f64>,
    pub highpass_analysis: Vec<f64>,
    pub lowpass_synthesis: Vec<f64>,
    pub highpass_synthesis: Vec<f64>,
}

impl WaveletFilterBank {
    /// Builds the full bank from an orthogonal analysis lowpass filter using
    /// the quadrature-mirror relation `g[k] = (-1)^k h[L-1-k]`.
    pub fn from_lowpass(lowpass: Vec<f64>) -> Self {
        let len = lowpass.len();
        let highpass: Vec<f64> = (0..len)
            .map(|k| if k % 2 == 0 { lowpass[len - 1 - k] } else { -lowpass[len - 1 - k] })
            .collect();
        Self {
            lowpass_synthesis: lowpass.iter().rev().copied().collect(),
            highpass_synthesis: highpass.iter().rev().copied().collect(),
            lowpass_analysis: lowpass,
            highpass_analysis: highpass,
        }
    }

    /// Daubechies wavelet with two vanishing moments (4 taps).
    pub fn db2() -> Self {
        let s3 = 3f64.sqrt();
        let norm = 4.0 * std::f64::consts::SQRT_2;
        Self::from_lowpass(vec![
            (1.0 + s3) / norm,
            (3.0 + s3) / norm,
            (3.0 - s3) / norm,
            (1.0 - s3) / norm,
        ])
    }

    pub fn len(&self) -> usize {
        self.lowpass_analysis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lowpass_analysis.is_empty()
    }
}

impl Default for WaveletFilterBank {
    fn default() -> Self {
        Self::db2()
    }
}
