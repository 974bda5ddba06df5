//! Full-reference image quality metrics.

mod cwssim;
mod fft;
mod psnr;
mod ssim;
mod summer;

use std::str::FromStr;
use std::time::Instant;

use serde::{Serialize, Serializer};

pub use cwssim::{cw_ssim, min_side as cwssim_min_side};
pub use psnr::psnr;
pub use ssim::{ssim, ssim_per_channel};
pub use summer::{summer_like, summer_like_per_channel};

use crate::error::{Error, Result};
use crate::raster::Image;

/// PSNR substituted for identical images when averaging over a corpus.
pub const PSNR_CAP_DB: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricParams {
    pub ssim_k1: f64,
    pub ssim_k2: f64,
    /// Peak value `L`; samples are rescaled by it before PSNR and SSIM.
    pub dynamic_range: f64,
    /// Side of the square SSIM window.
    pub ssim_window: usize,
    pub ssim_sigma: f64,
    pub cwssim_k: f64,
    pub cwssim_scales: usize,
    pub cwssim_orientations: usize,
    pub cwssim_window: usize,
    pub summer_bands: usize,
    pub summer_weights: Vec<f64>,
    pub summer_scale: f64,
    pub summer_eps: f64,
}

impl Default for MetricParams {
    fn default() -> Self {
        Self {
            ssim_k1: 0.01,
            ssim_k2: 0.03,
            dynamic_range: 255.0,
            ssim_window: 11,
            ssim_sigma: 1.5,
            cwssim_k: 1e-4,
            cwssim_scales: 3,
            cwssim_orientations: 4,
            cwssim_window: 7,
            summer_bands: 4,
            summer_weights: vec![0.1, 0.2, 0.3, 0.4],
            summer_scale: 4.0,
            summer_eps: 1e-12,
        }
    }
}

pub(crate) fn check_same_shape(a: &Image, b: &Image) -> Result<()> {
    if a.same_shape(b) {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "{}x{}x{} versus {}x{}x{}",
            a.width(),
            a.height(),
            a.channels(),
            b.width(),
            b.height(),
            b.channels()
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Psnr,
    Ssim,
    CwSsim,
    SummerLike,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Psnr, Metric::Ssim, Metric::CwSsim, Metric::SummerLike];

    /// Column name used in reports.
    pub fn name(self) -> &'static str {
        match self {
            Metric::Psnr => "psnr_db",
            Metric::Ssim => "ssim",
            Metric::CwSsim => "cw_ssim",
            Metric::SummerLike => "summer_like",
        }
    }

    pub fn evaluate(self, reference: &Image, test: &Image, params: &MetricParams) -> Result<f64> {
        match self {
            Metric::Psnr => psnr(reference, test, params),
            Metric::Ssim => ssim(reference, test, params),
            Metric::CwSsim => cw_ssim(reference, test, params),
            Metric::SummerLike => summer_like(reference, test, params),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "psnr" | "psnr_db" => Ok(Metric::Psnr),
            "ssim" => Ok(Metric::Ssim),
            "cwssim" | "cw_ssim" => Ok(Metric::CwSsim),
            "summer_like" | "summer" => Ok(Metric::SummerLike),
            other => Err(Error::InvalidParameter(format!("unknown metric {other:?}"))),
        }
    }
}

/// Parses a comma-separated metric list, keeping canonical order.
pub fn parse_metric_list(s: &str) -> Result<Vec<Metric>> {
    let mut out: Vec<Metric> = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(Metric::from_str)
        .collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(Error::InvalidParameter("empty metric list".into()));
    }
    Ok(out)
}

fn serialize_psnr<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) if x.is_infinite() => s.serialize_str("inf"),
        Some(x) => s.serialize_f64(*x),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RuntimeMs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psnr_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ssim: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cw_ssim: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summer_like: Option<f64>,
}

/// Per-channel scores of a color comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelScores {
    pub channel: usize,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "serialize_psnr")]
    pub psnr_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ssim: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summer_like: Option<f64>,
}

/// Scores of every enabled metric. Infinite PSNR serializes as `"inf"`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MetricReport {
    #[serde(serialize_with = "serialize_psnr")]
    pub psnr_db: Option<f64>,
    pub ssim: Option<f64>,
    pub cw_ssim: Option<f64>,
    pub summer_like: Option<f64>,
    pub runtime_ms: RuntimeMs,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub channels: Vec<ChannelScores>,
}

impl MetricReport {
    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Psnr => self.psnr_db,
            Metric::Ssim => self.ssim,
            Metric::CwSsim => self.cw_ssim,
            Metric::SummerLike => self.summer_like,
        }
    }
}

/// Evaluates `metrics` on one image pair. CW-SSIM runs on luma; color inputs
/// also get per-channel PSNR, SSIM and summer_like scores.
pub fn compute_metrics(reference: &Image, test: &Image, metrics: &[Metric], params: &MetricParams) -> Result<MetricReport> {
    check_same_shape(reference, test)?;
    let mut report = MetricReport::default();
    for &m in metrics {
        let start = Instant::now();
        let value = m.evaluate(reference, test, params)?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        match m {
            Metric::Psnr => (report.psnr_db, report.runtime_ms.psnr_db) = (Some(value), Some(ms)),
            Metric::Ssim => (report.ssim, report.runtime_ms.ssim) = (Some(value), Some(ms)),
            Metric::CwSsim => (report.cw_ssim, report.runtime_ms.cw_ssim) = (Some(value), Some(ms)),
            Metric::SummerLike => (report.summer_like, report.runtime_ms.summer_like) = (Some(value), Some(ms)),
        }
    }
    if reference.channels() > 1 {
        let ssim_c = metrics
            .contains(&Metric::Ssim)
            .then(|| ssim_per_channel(reference, test, params))
            .transpose()?;
        let summer_c = metrics
            .contains(&Metric::SummerLike)
            .then(|| summer_like_per_channel(reference, test, params))
            .transpose()?;
        for c in 0..reference.channels() {
            let psnr_c = if metrics.contains(&Metric::Psnr) {
                let r = Image::gray(reference.width(), reference.height(), reference.plane(c).to_vec())?;
                let t = Image::gray(test.width(), test.height(), test.plane(c).to_vec())?;
                Some(psnr(&r, &t, params)?)
            } else {
                None
            };
            report.channels.push(ChannelScores {
                channel: c,
                psnr_db: psnr_c,
                ssim: ssim_c.as_ref().map(|v| v[c]),
                summer_like: summer_c.as_ref().map(|v| v[c]),
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_list_parsing() {
        let m = parse_metric_list("summer_like,psnr,cwssim,ssim,psnr").unwrap();
        assert_eq!(m, Metric::ALL.to_vec());
        assert!(parse_metric_list("psnr,unique").is_err());
        assert!(parse_metric_list("").is_err());
    }

    #[test]
    fn default_params_are_consistent() {
        let p = MetricParams::default();
        assert!((p.summer_weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.summer_weights.iter().all(|&w| w > 0.0));
        assert!(p.ssim_k1 > 0.0 && p.ssim_k2 > 0.0 && p.cwssim_k > 0.0);
    }

    #[test]
    fn report_json_marks_infinite_psnr() {
        let img = Image::from_fn(40, 40, |x, y| ((x + 2 * y) % 9) as f64 / 9.0).unwrap();
        let r = compute_metrics(&img, &img, &Metric::ALL, &MetricParams::default()).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["psnr_db"], "inf");
        assert_eq!(json["ssim"], 1.0);
        assert!(json["runtime_ms"]["cw_ssim"].is_number());
    }

    #[test]
    fn color_report_has_channel_scores() {
        let g = Image::from_fn(40, 40, |x, y| ((x * y) % 11) as f64 / 11.0).unwrap();
        let rgb = Image::from_planes(40, 40, vec![g.plane(0).to_vec(); 3]).unwrap();
        let noisy = rgb.map(|v| (v + 0.05).min(1.0));
        let r = compute_metrics(&rgb, &noisy, &[Metric::Psnr, Metric::Ssim], &MetricParams::default()).unwrap();
        assert_eq!(r.channels.len(), 3);
        assert!(r.channels.iter().all(|c| c.summer_like.is_none() && c.psnr_db.is_some()));
    }
}
