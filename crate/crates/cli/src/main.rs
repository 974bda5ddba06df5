#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use denoisekit::bench::run_bench_with_jobs;
use denoisekit::iqa::parse_metric_list;
use denoisekit::{
    add_gaussian_noise, compute_metrics, emit_tables, fixtures, gaussian_smooth, load_image, nlm_denoise, save_image,
    BenchConfig, GaussParams, MetricParams, NlmParams, NlmStatus, NoiseSpec, TableFormat, ThresholdPolicy, wavelet_denoise,
    WaveletParams,
};

#[derive(Parser)]
#[command(name = "denoisekit", version, about = "Image denoising, quality metrics and corpus benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Gauss,
    Nlm,
    Wavelet,
}

#[derive(Clone, Copy, ValueEnum)]
enum Threshold {
    Bayes,
    Universal,
}

#[derive(Subcommand)]
enum Command {
    /// Add white Gaussian noise to an image.
    Noisegen {
        /// Noise std on the 0-255 scale.
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        seed: u64,
        /// Skip clamping to [0, 1] (8-bit output still saturates).
        #[arg(long)]
        no_clamp: bool,
        input: PathBuf,
        output: PathBuf,
    },
    /// Denoise an image.
    Denoise {
        #[arg(long, value_enum)]
        method: Method,
        /// NLM: h = h_factor * sigma.
        #[arg(long)]
        h_factor: Option<f64>,
        /// Noise std on the 0-255 scale; estimated when omitted.
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        patch_radius: Option<usize>,
        #[arg(long)]
        search_radius: Option<usize>,
        #[arg(long, value_enum)]
        threshold: Option<Threshold>,
        /// Wavelet decomposition depth.
        #[arg(long)]
        levels: Option<usize>,
        /// Gaussian kernel std in pixels.
        #[arg(long, default_value_t = 1.0)]
        spatial_sigma: f64,
        input: PathBuf,
        output: PathBuf,
    },
    /// Score a test image against a reference.
    Iqa {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// Comma-separated subset of psnr, ssim, cwssim, summer_like.
        #[arg(long, default_value = "psnr,ssim,cwssim,summer_like")]
        metrics: String,
        #[arg(long)]
        json: bool,
    },
    /// Run a benchmark config and write CSV, markdown and plot data.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; output does not depend on it.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Write the synthetic grayscale fixture corpus as PGM files.
    Fixtures {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 12)]
        count: usize,
        #[arg(long, default_value_t = 256)]
        size: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Noisegen { sigma, seed, no_clamp, input, output } => {
            if !(sigma > 0.0) || !sigma.is_finite() {
                bail!("--sigma must be positive, got {sigma}");
            }
            let img = load_image(&input)?;
            let mut spec = NoiseSpec::new(sigma, seed);
            if no_clamp {
                spec = spec.unclamped();
            }
            save_image(&add_gaussian_noise(&img, &spec), &output)?;
        }
        Command::Denoise {
            method,
            h_factor,
            sigma,
            patch_radius,
            search_radius,
            threshold,
            levels,
            spatial_sigma,
            input,
            output,
        } => {
            let img = load_image(&input)?;
            let out = match method {
                Method::Gauss => {
                    if !(spatial_sigma > 0.0) {
                        bail!("--spatial-sigma must be positive");
                    }
                    gaussian_smooth(&img, &GaussParams::new(spatial_sigma))?
                }
                Method::Nlm => {
                    let d = NlmParams::default();
                    let params = NlmParams {
                        patch_radius: patch_radius.unwrap_or(d.patch_radius),
                        search_radius: search_radius.unwrap_or(d.search_radius),
                        h_factor: h_factor.unwrap_or(d.h_factor),
                        sigma_est: sigma,
                        kernel_sigma: None,
                    };
                    let res = nlm_denoise(&img, &params)?;
                    eprintln!("sigma_est={:.4} h={:.6}", res.sigma_est, res.h);
                    if res.status == NlmStatus::DegenerateH {
                        eprintln!("warning: noise estimate is zero; output equals input");
                    }
                    res.image
                }
                Method::Wavelet => {
                    let params = WaveletParams {
                        levels,
                        threshold_policy: match threshold.unwrap_or(Threshold::Bayes) {
                            Threshold::Bayes => ThresholdPolicy::Bayes,
                            Threshold::Universal => ThresholdPolicy::Universal,
                        },
                        sigma_est: sigma,
                    };
                    wavelet_denoise(&img, &params)?
                }
            };
            save_image(&out, &output)?;
        }
        Command::Iqa { reference, test, metrics, json } => {
            let metrics = parse_metric_list(&metrics)?;
            let r = load_image(&reference)?;
            let t = load_image(&test)?;
            let report = compute_metrics(&r, &t, &metrics, &MetricParams::default())?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                for m in metrics {
                    let v = report.get(m).expect("requested metric");
                    println!("{}: {}", m.name(), if v.is_infinite() { "inf".to_string() } else { format!("{v:.6}") });
                }
            }
        }
        Command::Bench { config, out, jobs } => {
            let mut cfg = BenchConfig::load(&config).with_context(|| format!("reading {}", config.display()))?;
            cfg.output = Some(out.clone());
            let res = run_bench_with_jobs(&cfg, jobs)?;
            for f in [TableFormat::Markdown, TableFormat::PlotData] {
                emit_tables(&res, f, &out)?;
            }
            for s in &res.skipped {
                eprintln!("skipped {} ({}): {}", s.path.display(), s.corpus, s.reason);
            }
            eprintln!(
                "{} rows, {} skipped; results in {}",
                res.rows.len(),
                res.skipped.len(),
                out.display()
            );
        }
        Command::Fixtures { out, count, size, seed } => {
            if size < 8 {
                bail!("--size must be at least 8");
            }
            for p in fixtures::write_corpus(&out, count, size, seed)? {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}
