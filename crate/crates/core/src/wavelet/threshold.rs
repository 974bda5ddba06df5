use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the per-subband shrinkage threshold is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdPolicy {
    /// `sigma^2 / sigma_x` per detail subband.
    #[default]
    Bayes,
    /// `sigma * sqrt(2 ln N)` with `N` the image sample count.
    Universal,
}

impl ThresholdPolicy {
    pub fn name(self) -> &'static str {
        match self {
            ThresholdPolicy::Bayes => "bayes",
            ThresholdPolicy::Universal => "universal",
        }
    }
}

impl std::str::FromStr for ThresholdPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bayes" => Ok(ThresholdPolicy::Bayes),
            "universal" => Ok(ThresholdPolicy::Universal),
            other => Err(Error::InvalidParameter(format!("unknown threshold policy {other:?}"))),
        }
    }
}

impl std::fmt::Display for ThresholdPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Soft shrinkage `sign(w) * (|w| - lambda)` for `|w| >= lambda`, else 0.
pub fn soft_threshold(coeffs: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("threshold must be >= 0, got {lambda}")));
    }
    Ok(coeffs.iter().map(|&w| shrink(w, lambda)).collect())
}

#[inline]
pub(crate) fn shrink(w: f64, lambda: f64) -> f64 {
    if w.abs() >= lambda {
        w.signum() * (w.abs() - lambda)
    } else {
        0.0
    }
}

/// Threshold for one detail subband. `sigma` is the noise std in normalized
/// units; `image_len` is the sample count used by the universal rule.
pub fn select_threshold(detail: &[f64], sigma: f64, policy: ThresholdPolicy, image_len: usize) -> Result<f64> {
    if detail.is_empty() {
        return Err(Error::InvalidParameter("empty coefficient plane".into()));
    }
    if !(sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!("noise sigma must be >= 0, got {sigma}")));
    }
    match policy {
        ThresholdPolicy::Bayes => {
            let mean_sq = detail.iter().map(|w| w * w).sum::<f64>() / detail.len() as f64;
            let signal_std = (mean_sq - sigma * sigma).max(0.0).sqrt();
            if signal_std == 0.0 {
                Ok(detail.iter().fold(0.0, |m: f64, w| m.max(w.abs())))
            } else {
                Ok(sigma * sigma / signal_std)
            }
        }
        ThresholdPolicy::Universal => Ok(sigma * (2.0 * (image_len as f64).ln()).sqrt()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(soft_threshold(&[5.0, -5.0, 1.9, 2.0], 2.0).unwrap(), vec![3.0, -3.0, 0.0, 0.0]);
        let x = [0.3, -1.5, 0.0];
        assert_eq!(soft_threshold(&x, 0.0).unwrap(), x.to_vec());
        assert!(soft_threshold(&x, -0.1).is_err());
    }

    #[test]
    fn bayes_noiseless_limit_is_zero() {
        assert_eq!(select_threshold(&[0.5, -0.2, 0.1], 0.0, ThresholdPolicy::Bayes, 9).unwrap(), 0.0);
    }

    #[test]
    fn bayes_pure_noise_band_is_annihilated() {
        // mean(w^2) = 0.25 = sigma^2
        let band = [0.5, -0.5, 0.5, -0.5];
        let lambda = select_threshold(&band, 0.5, ThresholdPolicy::Bayes, 16).unwrap();
        assert_eq!(lambda, 0.5);
        assert!(soft_threshold(&band, lambda).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bayes_formula() {
        let band = [1.0, -1.0, 1.0, -1.0];
        // sigma_x = sqrt(1 - 0.36) = 0.8, lambda = 0.36 / 0.8
        let lambda = select_threshold(&band, 0.6, ThresholdPolicy::Bayes, 4).unwrap();
        assert!((lambda - 0.45).abs() < 1e-15);
    }

    #[test]
    fn universal_closed_form() {
        let sigma = 25.0 / 255.0;
        let lambda = select_threshold(&[1.0], sigma, ThresholdPolicy::Universal, 65536).unwrap();
        let expected = sigma * (2.0 * 65536f64.ln()).sqrt();
        assert!((lambda - expected).abs() < 1e-15);
        assert!((lambda - 0.4617).abs() < 5e-5);
    }

    #[test]
    fn invalid_inputs() {
        assert!(select_threshold(&[], 0.1, ThresholdPolicy::Bayes, 1).is_err());
        assert!(select_threshold(&[1.0], -0.1, ThresholdPolicy::Bayes, 1).is_err());
        assert!("hard".parse::<ThresholdPolicy>().is_err());
        assert_eq!("universal".parse::<ThresholdPolicy>().unwrap(), ThresholdPolicy::Universal);
    }

    proptest! {
        #[test]
        fn soft_threshold_is_a_contraction(w in -10.0..10.0f64, lambda in 0.0..5.0f64) {
            let s = shrink(w, lambda);
            prop_assert!(s.abs() <= w.abs());
            prop_assert!(s == 0.0 || s.signum() == w.signum());
        }
    }
}
