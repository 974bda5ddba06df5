//! Writers for benchmark results.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{AggregateRow, BenchResult, ImageRow};
use crate::error::{Error, Result};
use crate::iqa::{Metric, PSNR_CAP_DB};

/// Header of the per-image and baseline CSVs.
pub const CSV_HEADER: &str =
    "corpus,image,method,h_factor,threshold_policy,noise_sigma,psnr_db,ssim,cw_ssim,summer_like,runtime_ms";

/// Header of the aggregate CSV.
pub const AGGREGATE_HEADER: &str = "corpus,method,h_factor,threshold_policy,noise_sigma,metric,mean,std,count";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    /// `per_image.csv`, `baseline.csv`, `aggregate.csv`, `skipped.txt`, `meta.txt`.
    Csv,
    /// `tables.md`: one metric-by-corpus matrix per method and level.
    Markdown,
    /// `trend.dat`: `level mean_psnr mean_ssim` blocks per corpus and method.
    PlotData,
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn method_columns(res: &BenchResult, method: Option<usize>) -> (String, String) {
    let m = method.map(|i| &res.methods[i]);
    (
        opt(m.and_then(|m| m.h_factor())),
        m.and_then(|m| m.threshold_policy()).map(|p| p.to_string()).unwrap_or_default(),
    )
}

fn image_csv(res: &BenchResult, rows: &[ImageRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let (h, policy) = method_columns(res, r.method);
        let runtime = if res.timing { format!("{:.3}", r.denoise_ms) } else { String::new() };
        let scores: Vec<String> = r.scores.iter().map(|&v| opt(v)).collect();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.corpus,
            r.image,
            res.method_name(r.method),
            h,
            policy,
            opt(r.noise_sigma),
            scores.join(","),
            runtime
        );
    }
    s
}

fn aggregate_csv(res: &BenchResult, rows: &[AggregateRow]) -> String {
    let mut s = String::from(AGGREGATE_HEADER);
    s.push('\n');
    for a in rows {
        let (h, policy) = method_columns(res, a.method);
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            a.corpus,
            res.method_name(a.method),
            h,
            policy,
            opt(a.noise_sigma),
            a.metric.name(),
            a.mean,
            a.std,
            a.count
        );
    }
    s
}

/// Writes the CSV family and the skip report into `dir`.
pub fn write_csv_outputs(res: &BenchResult, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = vec![
        write_file(dir, "per_image.csv", &image_csv(res, &res.rows))?,
        write_file(dir, "baseline.csv", &image_csv(res, &res.baseline))?,
    ];
    paths.push(write_file(dir, "aggregate.csv", &aggregate_csv(res, &res.aggregates))?);
    paths.push(write_file(dir, "baseline_aggregate.csv", &aggregate_csv(res, &res.baseline_aggregates))?);

    let mut skipped = String::new();
    for s in &res.skipped {
        let _ = writeln!(skipped, "{}\t{}\t{}", s.corpus, s.path.display(), s.reason);
    }
    paths.push(write_file(dir, "skipped.txt", &skipped)?);

    let mut meta = String::new();
    let _ = writeln!(meta, "psnr_cap_db = {PSNR_CAP_DB}");
    let _ = writeln!(meta, "aggregation = arithmetic mean of per-image scores; std is the sample std");
    for (i, m) in res.methods.iter().enumerate() {
        let _ = writeln!(meta, "method.{i} = {m}");
    }
    for c in &res.corpora {
        let _ = writeln!(meta, "corpus.{} = {} {}", c.name, c.dir.display(), c.mode.name());
    }
    paths.push(write_file(dir, "meta.txt", &meta)?);

    if res.timing {
        let mut t = String::from("corpus,image,method,noise_sigma,denoise_ms,metrics_ms\n");
        for r in res.baseline.iter().chain(&res.rows) {
            let _ = writeln!(
                t,
                "{},{},{},{},{:.3},{:.3}",
                r.corpus,
                r.image,
                res.method_name(r.method),
                opt(r.noise_sigma),
                r.denoise_ms,
                r.metrics_ms
            );
        }
        paths.push(write_file(dir, "timings.csv", &t)?);
    }
    Ok(paths)
}

/// Distinct levels in first-seen order, paired (`None`) last.
fn levels(res: &BenchResult) -> Vec<Option<f64>> {
    let mut out: Vec<Option<f64>> = Vec::new();
    for a in res.aggregates.iter().chain(&res.baseline_aggregates) {
        if a.noise_sigma.is_some() && !out.contains(&a.noise_sigma) {
            out.push(a.noise_sigma);
        }
    }
    out.sort_by(|a, b| a.unwrap_or(0.0).total_cmp(&b.unwrap_or(0.0)));
    if res.aggregates.iter().any(|a| a.noise_sigma.is_none()) {
        out.push(None);
    }
    out
}

fn markdown(res: &BenchResult) -> String {
    let mut s = String::from("# Benchmark results\n\nMean per-image scores");
    let _ = writeln!(s, " (PSNR capped at {PSNR_CAP_DB} dB).");
    let methods: Vec<Option<usize>> = std::iter::once(None).chain((0..res.methods.len()).map(Some)).collect();
    for &method in &methods {
        let _ = writeln!(s, "\n## {}", res.method_label(method));
        for level in levels(res) {
            let corpora: Vec<&str> = res
                .corpora
                .iter()
                .map(|c| c.name.as_str())
                .filter(|c| res.metrics.iter().any(|&m| res.aggregate(c, method, level, m).is_some()))
                .collect();
            if corpora.is_empty() {
                continue;
            }
            match level {
                Some(l) => {
                    let _ = writeln!(s, "\n### noise sigma {l}\n");
                }
                None => s.push_str("\n### paired\n\n"),
            }
            let _ = writeln!(s, "| Metric | {} |", corpora.join(" | "));
            let _ = writeln!(s, "|---|{}", "---:|".repeat(corpora.len()));
            for &m in &res.metrics {
                let cells: Vec<String> = corpora
                    .iter()
                    .map(|c| res.aggregate(c, method, level, m).map_or("-".into(), |a| format!("{:.4}", a.mean)))
                    .collect();
                let _ = writeln!(s, "| {} | {} |", m.name(), cells.join(" | "));
            }
        }
    }
    s
}

fn plotdata(res: &BenchResult) -> String {
    let mut s = String::from("# level mean_psnr_db mean_ssim\n");
    let methods: Vec<Option<usize>> = std::iter::once(None).chain((0..res.methods.len()).map(Some)).collect();
    for c in &res.corpora {
        for &method in &methods {
            let points: Vec<f64> = levels(res)
                .into_iter()
                .flatten()
                .filter(|&l| res.metrics.iter().any(|&m| res.aggregate(&c.name, method, Some(l), m).is_some()))
                .collect();
            if points.is_empty() {
                continue;
            }
            let _ = writeln!(s, "\n# corpus={} method={}", c.name, res.method_label(method));
            for l in points {
                let mean = |m: Metric| {
                    res.aggregate(&c.name, method, Some(l), m)
                        .map_or("nan".to_string(), |a| a.mean.to_string())
                };
                let _ = writeln!(s, "{l} {} {}", mean(Metric::Psnr), mean(Metric::Ssim));
            }
        }
    }
    s
}

/// Writes `res` in `format` into `dir` and returns the created files.
pub fn emit_tables(res: &BenchResult, format: TableFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    if res.rows.is_empty() {
        return Err(Error::InvalidParameter("benchmark result has no rows".into()));
    }
    match format {
        TableFormat::Csv => write_csv_outputs(res, dir),
        TableFormat::Markdown => Ok(vec![write_file(dir, "tables.md", &markdown(res))?]),
        TableFormat::PlotData => Ok(vec![write_file(dir, "trend.dat", &plotdata(res))?]),
    }
}
