//! Line-oriented benchmark configuration.
//!
//! ```text
//! # comment
//! seed = 42
//! level = 15, 35, 50
//! metrics = psnr, ssim, cwssim, summer_like
//! corpus = set12 fixtures/set12 clean-add-noise
//! corpus = cure fixtures/cure paired-ref-dist
//! method = nlm h_factor=0.8 patch_radius=3 search_radius=10
//! method = wavelet threshold=bayes levels=4
//! method = gauss sigma=1
//! method = identity
//! output = results
//! timing = false
//! ```
//!
//! `corpus`, `method` and `level` may repeat. Relative paths resolve against
//! the config file's directory.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::iqa::{parse_metric_list, Metric, MetricParams};
use crate::spatial::{GaussParams, NlmParams};
use crate::wavelet::{ThresholdPolicy, WaveletParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusMode {
    /// Clean images; noise is synthesized per level.
    CleanAddNoise,
    /// Matching files under `ref/` and `dist/`.
    PairedRefDist,
}

impl CorpusMode {
    pub fn name(self) -> &'static str {
        match self {
            Self::CleanAddNoise => "clean-add-noise",
            Self::PairedRefDist => "paired-ref-dist",
        }
    }
}

impl FromStr for CorpusMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clean-add-noise" => Ok(Self::CleanAddNoise),
            "paired-ref-dist" => Ok(Self::PairedRefDist),
            other => Err(Error::InvalidParameter(format!("unknown corpus mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    pub name: String,
    pub dir: PathBuf,
    pub mode: CorpusMode,
}

/// A denoiser and its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodSpec {
    /// No-op, for calibrating the harness.
    Identity,
    Gauss(GaussParams),
    Nlm(NlmParams),
    Wavelet(WaveletParams),
}

impl MethodSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::Gauss(_) => "gauss",
            Self::Nlm(_) => "nlm",
            Self::Wavelet(_) => "wavelet",
        }
    }

    pub fn h_factor(&self) -> Option<f64> {
        match self {
            Self::Nlm(p) => Some(p.h_factor),
            _ => None,
        }
    }

    pub fn threshold_policy(&self) -> Option<ThresholdPolicy> {
        match self {
            Self::Wavelet(p) => Some(p.threshold_policy),
            _ => None,
        }
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => write!(f, "identity"),
            Self::Gauss(p) => write!(f, "gauss sigma={}", p.sigma_spatial),
            Self::Nlm(p) => write!(
                f,
                "nlm h_factor={} patch_radius={} search_radius={}",
                p.h_factor, p.patch_radius, p.search_radius
            ),
            Self::Wavelet(p) => {
                write!(f, "wavelet threshold={}", p.threshold_policy)?;
                if let Some(l) = p.levels {
                    write!(f, " levels={l}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub corpora: Vec<CorpusSpec>,
    /// sigma255 per level; 0 adds no noise.
    pub noise_levels: Vec<f64>,
    pub methods: Vec<MethodSpec>,
    pub metrics: Vec<Metric>,
    pub seed: u64,
    pub output: Option<PathBuf>,
    /// Fill the `runtime_ms` column. Off by default so CSVs are reproducible byte for byte.
    pub timing: bool,
    pub metric_params: MetricParams,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            corpora: Vec::new(),
            noise_levels: Vec::new(),
            methods: Vec::new(),
            metrics: vec![Metric::Psnr, Metric::Ssim],
            seed: 0,
            output: None,
            timing: false,
            metric_params: MetricParams::default(),
        }
    }
}

impl BenchConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Parses config text, resolving relative paths against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Config { line: idx + 1, message };
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            match key {
                "seed" => cfg.seed = value.parse().map_err(|_| err(format!("bad seed `{value}`")))?,
                "level" | "levels" => {
                    for v in value.split(',').map(str::trim) {
                        let level: f64 = v.parse().map_err(|_| err(format!("bad level `{v}`")))?;
                        if !(level >= 0.0 && level.is_finite()) {
                            return Err(err(format!("level must be finite and >= 0, got {v}")));
                        }
                        cfg.noise_levels.push(level);
                    }
                }
                "metrics" => cfg.metrics = parse_metric_list(value).map_err(|e| err(e.to_string()))?,
                "corpus" => cfg.corpora.push(parse_corpus(value, base).map_err(err)?),
                "method" => cfg.methods.push(parse_method(value).map_err(err)?),
                "output" => cfg.output = Some(resolve(base, value)),
                "timing" => cfg.timing = value.parse().map_err(|_| err(format!("bad boolean `{value}`")))?,
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.corpora.is_empty() {
            return invalid("config lists no corpus");
        }
        if self.methods.is_empty() {
            return invalid("config lists no method");
        }
        if self.metrics.is_empty() {
            return invalid("config enables no metric");
        }
        let needs_levels = self.corpora.iter().any(|c| c.mode == CorpusMode::CleanAddNoise);
        if needs_levels && self.noise_levels.is_empty() {
            return invalid("clean-add-noise corpus needs at least one level");
        }
        for (i, c) in self.corpora.iter().enumerate() {
            if self.corpora[..i].iter().any(|o| o.name == c.name) {
                return invalid(&format!("duplicate corpus name `{}`", c.name));
            }
        }
        for m in &self.methods {
            if let MethodSpec::Nlm(p) = m {
                p.validate()?;
            }
        }
        Ok(())
    }
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn parse_corpus(value: &str, base: &Path) -> std::result::Result<CorpusSpec, String> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    let (name, dir, mode) = match parts.as_slice() {
        [name, dir] => (name, dir, CorpusMode::CleanAddNoise),
        [name, dir, mode] => (name, dir, mode.parse().map_err(|e: Error| e.to_string())?),
        _ => return Err(format!("expected `corpus = <name> <dir> [mode]`, got `{value}`")),
    };
    if name.contains(',') {
        return Err(format!("corpus name `{name}` must not contain commas"));
    }
    Ok(CorpusSpec { name: name.to_string(), dir: resolve(base, dir), mode })
}

fn parse_method(value: &str) -> std::result::Result<MethodSpec, String> {
    let mut parts = value.split_whitespace();
    let kind = parts.next().ok_or("empty method")?;
    let mut opts = Vec::new();
    for p in parts {
        let (k, v) = p.split_once('=').ok_or_else(|| format!("expected `key=value`, got `{p}`"))?;
        opts.push((k, v));
    }
    fn num<T: FromStr>(k: &str, v: &str) -> std::result::Result<T, String> {
        v.parse().map_err(|_| format!("bad value `{v}` for `{k}`"))
    }
    let unknown = |k: &str| Err(format!("unknown option `{k}` for method `{kind}`"));
    match kind {
        "identity" => match opts.first() {
            None => Ok(MethodSpec::Identity),
            Some((k, _)) => unknown(k),
        },
        "gauss" => {
            let mut p = GaussParams::default();
            for (k, v) in opts {
                match k {
                    "sigma" | "sigma_spatial" => p.sigma_spatial = num(k, v)?,
                    "radius" => p.radius = Some(num(k, v)?),
                    _ => return unknown(k),
                }
            }
            if !(p.sigma_spatial > 0.0) {
                return Err("gauss sigma must be > 0".into());
            }
            Ok(MethodSpec::Gauss(p))
        }
        "nlm" => {
            let mut p = NlmParams::default();
            for (k, v) in opts {
                match k {
                    "h_factor" => p.h_factor = num(k, v)?,
                    "patch_radius" => p.patch_radius = num(k, v)?,
                    "search_radius" => p.search_radius = num(k, v)?,
                    "sigma" | "sigma_est" => p.sigma_est = Some(num(k, v)?),
                    "kernel_sigma" => p.kernel_sigma = Some(num(k, v)?),
                    _ => return unknown(k),
                }
            }
            Ok(MethodSpec::Nlm(p))
        }
        "wavelet" => {
            let mut p = WaveletParams::default();
            for (k, v) in opts {
                match k {
                    "threshold" => p.threshold_policy = v.parse().map_err(|e: Error| e.to_string())?,
                    "levels" => p.levels = Some(num(k, v)?),
                    "sigma" | "sigma_est" => p.sigma_est = Some(num(k, v)?),
                    _ => return unknown(k),
                }
            }
            Ok(MethodSpec::Wavelet(p))
        }
        other => Err(format!("unknown method `{other}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# sample
seed = 7
level = 15, 35
level = 50
metrics = psnr, ssim
corpus = set12 data/set12
corpus = cure /abs/cure paired-ref-dist   # trailing comment
method = nlm h_factor=0.6 patch_radius=2
method = wavelet threshold=universal levels=3
method = identity
timing = true
";

    #[test]
    fn parses_sample() {
        let cfg = BenchConfig::parse(SAMPLE, Path::new("/base")).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.noise_levels, vec![15.0, 35.0, 50.0]);
        assert_eq!(cfg.metrics, vec![Metric::Psnr, Metric::Ssim]);
        assert_eq!(cfg.corpora[0].dir, PathBuf::from("/base/data/set12"));
        assert_eq!(cfg.corpora[0].mode, CorpusMode::CleanAddNoise);
        assert_eq!(cfg.corpora[1].dir, PathBuf::from("/abs/cure"));
        assert_eq!(cfg.corpora[1].mode, CorpusMode::PairedRefDist);
        assert_eq!(cfg.methods[0].h_factor(), Some(0.6));
        assert!(matches!(&cfg.methods[0], MethodSpec::Nlm(p) if p.patch_radius == 2));
        assert_eq!(cfg.methods[1].threshold_policy(), Some(ThresholdPolicy::Universal));
        assert_eq!(cfg.methods[2], MethodSpec::Identity);
        assert!(cfg.timing);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "seed = 1\ncorpus = a b\nmethod = nlm bogus=1\n";
        match BenchConfig::parse(bad, Path::new(".")) {
            Err(Error::Config { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        for text in ["frobnicate = 1", "level = -3", "corpus = a", "method = median", "seed = x"] {
            assert!(matches!(BenchConfig::parse(text, Path::new(".")), Err(Error::Config { line: 1, .. })), "{text}");
        }
    }

    #[test]
    fn validation() {
        let no_levels = "corpus = a b\nmethod = identity\n";
        assert!(matches!(BenchConfig::parse(no_levels, Path::new(".")), Err(Error::InvalidParameter(_))));
        let paired = "corpus = a b paired-ref-dist\nmethod = identity\n";
        assert!(BenchConfig::parse(paired, Path::new(".")).is_ok());
        let dup = "level = 1\ncorpus = a b\ncorpus = a c\nmethod = identity\n";
        assert!(BenchConfig::parse(dup, Path::new(".")).is_err());
    }
}
