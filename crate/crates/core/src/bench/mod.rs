//! Corpus benchmark: synthesize or load noisy inputs, run every configured
//! denoiser, score each output against its reference, and aggregate.

mod config;
mod emit;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

pub use config::{BenchConfig, CorpusMode, CorpusSpec, MethodSpec};
pub use emit::{emit_tables, write_csv_outputs, TableFormat, CSV_HEADER};

use crate::error::{Error, Result};
use crate::iqa::{compute_metrics, Metric, PSNR_CAP_DB};
use crate::noise::{add_gaussian_noise, NoiseSpec};
use crate::raster::{load_image, Image};
use crate::spatial::{gaussian_smooth, nlm_denoise};
use crate::wavelet::wavelet_denoise;

/// File extensions picked up from corpus directories.
pub const IMAGE_EXTENSIONS: [&str; 4] = ["pgm", "ppm", "pnm", "pbm"];

impl MethodSpec {
    /// Runs the denoiser on one image.
    pub fn apply(&self, img: &Image) -> Result<Image> {
        match self {
            Self::Identity => Ok(img.clone()),
            Self::Gauss(p) => gaussian_smooth(img, p),
            Self::Nlm(p) => nlm_denoise(img, p).map(|o| o.image),
            Self::Wavelet(p) => wavelet_denoise(img, p),
        }
    }
}

/// Seed for one (corpus, image, level) cell: FNV-1a 64 over the base seed
/// (little endian), corpus name, a zero byte, file name, a zero byte, and the
/// level's IEEE-754 bits (little endian), followed by the splitmix64 finalizer.
pub fn child_seed(base: u64, corpus: &str, file: &str, level: f64) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut feed = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(PRIME);
        }
    };
    feed(&base.to_le_bytes());
    feed(corpus.as_bytes());
    feed(&[0]);
    feed(file.as_bytes());
    feed(&[0]);
    feed(&level.to_bits().to_le_bytes());
    let mut z = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Scores of one (corpus, method, level, image) cell. PSNR is capped at
/// [`PSNR_CAP_DB`].
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRow {
    pub corpus: String,
    pub image: String,
    /// Index into [`BenchResult::methods`]; `None` for the noisy baseline.
    pub method: Option<usize>,
    /// `None` in paired mode.
    pub noise_sigma: Option<f64>,
    pub scores: [Option<f64>; 4],
    /// Denoiser wall time.
    pub denoise_ms: f64,
    /// Wall time of all metric evaluations.
    pub metrics_ms: f64,
}

impl ImageRow {
    pub fn score(&self, metric: Metric) -> Option<f64> {
        self.scores[metric_slot(metric)]
    }
}

/// Mean, sample standard deviation and count of one metric over a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub corpus: String,
    pub method: Option<usize>,
    pub noise_sigma: Option<f64>,
    pub metric: Metric,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedFile {
    pub corpus: String,
    pub path: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct BenchResult {
    pub corpora: Vec<CorpusSpec>,
    pub methods: Vec<MethodSpec>,
    pub metrics: Vec<Metric>,
    pub timing: bool,
    /// Denoised rows sorted by (corpus, method, level, image).
    pub rows: Vec<ImageRow>,
    /// Unprocessed noisy input scored against the reference.
    pub baseline: Vec<ImageRow>,
    pub aggregates: Vec<AggregateRow>,
    pub baseline_aggregates: Vec<AggregateRow>,
    pub skipped: Vec<SkippedFile>,
}

impl BenchResult {
    pub fn method_label(&self, method: Option<usize>) -> String {
        match method {
            Some(i) => self.methods[i].to_string(),
            None => "noisy".to_string(),
        }
    }

    pub fn method_name(&self, method: Option<usize>) -> &'static str {
        method.map_or("noisy", |i| self.methods[i].name())
    }

    /// Aggregate for one cell, looking in the baseline when `method` is `None`.
    pub fn aggregate(&self, corpus: &str, method: Option<usize>, level: Option<f64>, metric: Metric) -> Option<&AggregateRow> {
        let pool = if method.is_some() { &self.aggregates } else { &self.baseline_aggregates };
        pool.iter()
            .find(|a| a.corpus == corpus && a.method == method && a.noise_sigma == level && a.metric == metric)
    }
}

fn metric_slot(m: Metric) -> usize {
    match m {
        Metric::Psnr => 0,
        Metric::Ssim => 1,
        Metric::CwSsim => 2,
        Metric::SummerLike => 3,
    }
}

struct Item {
    corpus: usize,
    name: String,
    reference: Image,
    /// Given input in paired mode.
    distorted: Option<Image>,
}

fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
        })
        .collect();
    files.sort();
    Ok(files)
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn load_corpus(idx: usize, spec: &CorpusSpec, items: &mut Vec<Item>, skipped: &mut Vec<SkippedFile>) -> Result<()> {
    let mut skip = |path: PathBuf, reason: String| {
        skipped.push(SkippedFile { corpus: spec.name.clone(), path, reason });
    };
    match spec.mode {
        CorpusMode::CleanAddNoise => {
            for path in list_images(&spec.dir)? {
                match load_image(&path) {
                    Ok(img) => items.push(Item { corpus: idx, name: file_name(&path), reference: img, distorted: None }),
                    Err(e) => skip(path, e.to_string()),
                }
            }
        }
        CorpusMode::PairedRefDist => {
            let ref_dir = spec.dir.join("ref");
            let dist_dir = spec.dir.join("dist");
            let dist_files = list_images(&dist_dir)?;
            for path in list_images(&ref_dir)? {
                let name = file_name(&path);
                let dist_path = dist_dir.join(&name);
                if !dist_files.contains(&dist_path) {
                    skip(path, "no matching file under dist/".into());
                    continue;
                }
                let pair = load_image(&path).and_then(|r| load_image(&dist_path).map(|d| (r, d)));
                match pair {
                    Ok((r, d)) if !r.same_shape(&d) => skip(dist_path, "shape differs from reference".into()),
                    Ok((r, d)) => items.push(Item { corpus: idx, name, reference: r, distorted: Some(d) }),
                    Err(e) => skip(path, e.to_string()),
                }
            }
            for d in dist_files {
                if !ref_dir.join(file_name(&d)).is_file() {
                    skip(d, "no matching file under ref/".into());
                }
            }
        }
    }
    Ok(())
}

fn score(reference: &Image, test: &Image, metrics: &[Metric], cfg: &BenchConfig) -> Result<([Option<f64>; 4], f64)> {
    let start = Instant::now();
    let report = compute_metrics(reference, test, metrics, &cfg.metric_params)?;
    let mut scores = [None; 4];
    for &m in metrics {
        let v = report.get(m).map(|v| if m == Metric::Psnr { v.min(PSNR_CAP_DB) } else { v });
        scores[metric_slot(m)] = v;
    }
    Ok((scores, start.elapsed().as_secs_f64() * 1e3))
}

/// Rows of one (image, level) cell: the baseline first, then each method.
fn run_cell(cfg: &BenchConfig, item: &Item, level: Option<f64>) -> std::result::Result<Vec<ImageRow>, String> {
    let corpus = &cfg.corpora[item.corpus].name;
    let input = match (&item.distorted, level) {
        (Some(d), _) => d.clone(),
        (None, Some(l)) if l > 0.0 => {
            add_gaussian_noise(&item.reference, &NoiseSpec::new(l, child_seed(cfg.seed, corpus, &item.name, l)))
        }
        (None, _) => item.reference.clone(),
    };
    let row = |method, scores, denoise_ms, metrics_ms| ImageRow {
        corpus: corpus.clone(),
        image: item.name.clone(),
        method,
        noise_sigma: level,
        scores,
        denoise_ms,
        metrics_ms,
    };
    let mut rows = Vec::with_capacity(cfg.methods.len() + 1);
    let (scores, ms) = score(&item.reference, &input, &cfg.metrics, cfg).map_err(|e| e.to_string())?;
    rows.push(row(None, scores, 0.0, ms));
    for (mi, method) in cfg.methods.iter().enumerate() {
        let start = Instant::now();
        let out = method.apply(&input).map_err(|e| format!("{method}: {e}"))?;
        let denoise_ms = start.elapsed().as_secs_f64() * 1e3;
        let (scores, ms) = score(&item.reference, &out, &cfg.metrics, cfg).map_err(|e| format!("{method}: {e}"))?;
        rows.push(row(Some(mi), scores, denoise_ms, ms));
    }
    Ok(rows)
}

fn row_order(a: &ImageRow, b: &ImageRow) -> Ordering {
    let level = |r: &ImageRow| r.noise_sigma.unwrap_or(-1.0);
    (a.method.map_or(0, |m| m + 1))
        .cmp(&b.method.map_or(0, |m| m + 1))
        .then(level(a).total_cmp(&level(b)))
        .then_with(|| a.image.cmp(&b.image))
}

/// Arithmetic mean and sample standard deviation (0 for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Groups rows by (corpus, method, level) in order and summarizes each metric.
pub fn aggregate_rows(rows: &[ImageRow], metrics: &[Metric]) -> Vec<AggregateRow> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < rows.len() {
        let head = &rows[start];
        let same = |r: &ImageRow| r.corpus == head.corpus && r.method == head.method && r.noise_sigma == head.noise_sigma;
        let end = start + rows[start..].iter().take_while(|r| same(r)).count();
        for &m in metrics {
            let values: Vec<f64> = rows[start..end].iter().filter_map(|r| r.score(m)).collect();
            if values.is_empty() {
                continue;
            }
            let (mean, std) = mean_std(&values);
            out.push(AggregateRow {
                corpus: head.corpus.clone(),
                method: head.method,
                noise_sigma: head.noise_sigma,
                metric: m,
                mean,
                std,
                count: values.len(),
            });
        }
        start = end;
    }
    out
}

/// Runs the benchmark on the current rayon pool. Writes the CSV outputs when
/// `cfg.output` is set.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchResult> {
    cfg.validate()?;
    let mut items = Vec::new();
    let mut skipped = Vec::new();
    for (i, spec) in cfg.corpora.iter().enumerate() {
        load_corpus(i, spec, &mut items, &mut skipped)?;
    }

    let mut cells: Vec<(&Item, Option<f64>)> = Vec::new();
    for item in &items {
        match cfg.corpora[item.corpus].mode {
            CorpusMode::CleanAddNoise => cells.extend(cfg.noise_levels.iter().map(|&l| (item, Some(l)))),
            CorpusMode::PairedRefDist => cells.push((item, None)),
        }
    }
    let outcomes: Vec<_> = cells.par_iter().map(|&(item, level)| run_cell(cfg, item, level)).collect();

    let mut by_corpus: BTreeMap<usize, Vec<ImageRow>> = BTreeMap::new();
    for ((item, _), outcome) in cells.iter().zip(outcomes) {
        match outcome {
            Ok(rows) => by_corpus.entry(item.corpus).or_default().extend(rows),
            Err(reason) => skipped.push(SkippedFile {
                corpus: cfg.corpora[item.corpus].name.clone(),
                path: cfg.corpora[item.corpus].dir.join(&item.name),
                reason,
            }),
        }
    }
    // A failure at one level drops the image everywhere so counts stay equal.
    let failed: Vec<(String, String)> = skipped
        .iter()
        .map(|s| (s.corpus.clone(), file_name(&s.path)))
        .collect();
    let mut rows = Vec::new();
    let mut baseline = Vec::new();
    for (_, mut group) in by_corpus {
        group.retain(|r| !failed.contains(&(r.corpus.clone(), r.image.clone())));
        group.sort_by(row_order);
        for r in group {
            if r.method.is_some() {
                rows.push(r);
            } else {
                baseline.push(r);
            }
        }
    }
    skipped.sort_by(|a, b| (&a.corpus, &a.path, &a.reason).cmp(&(&b.corpus, &b.path, &b.reason)));
    skipped.dedup();

    let result = BenchResult {
        corpora: cfg.corpora.clone(),
        methods: cfg.methods.clone(),
        metrics: cfg.metrics.clone(),
        timing: cfg.timing,
        aggregates: aggregate_rows(&rows, &cfg.metrics),
        baseline_aggregates: aggregate_rows(&baseline, &cfg.metrics),
        rows,
        baseline,
        skipped,
    };
    if let Some(dir) = &cfg.output {
        write_csv_outputs(&result, dir)?;
    }
    Ok(result)
}

/// [`run_bench`] on a dedicated pool of `jobs` workers.
pub fn run_bench_with_jobs(cfg: &BenchConfig, jobs: usize) -> Result<BenchResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start {jobs} workers: {e}")))?;
    pool.install(|| run_bench(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::write_corpus;
    use crate::spatial::NlmParams;
    use crate::wavelet::WaveletParams;

    fn grid_config(dir: &Path, out: Option<PathBuf>) -> BenchConfig {
        BenchConfig {
            corpora: vec![CorpusSpec { name: "tiny".into(), dir: dir.to_path_buf(), mode: CorpusMode::CleanAddNoise }],
            noise_levels: vec![15.0, 35.0, 50.0],
            methods: vec![MethodSpec::Nlm(NlmParams::default()), MethodSpec::Wavelet(WaveletParams::default())],
            metrics: vec![Metric::Psnr, Metric::Ssim],
            seed: 11,
            output: out,
            ..BenchConfig::default()
        }
    }

    #[test]
    fn child_seed_is_stable_and_sensitive() {
        let s = child_seed(1, "set12", "a.pgm", 15.0);
        assert_eq!(s, child_seed(1, "set12", "a.pgm", 15.0));
        for other in [
            child_seed(2, "set12", "a.pgm", 15.0),
            child_seed(1, "set1", "2a.pgm", 15.0),
            child_seed(1, "set12", "b.pgm", 15.0),
            child_seed(1, "set12", "a.pgm", 35.0),
        ] {
            assert_ne!(s, other);
        }
    }

    #[test]
    fn mean_std_definition() {
        assert_eq!(mean_std(&[30.0, 32.0]), (31.0, 2f64.sqrt()));
        assert_eq!(mean_std(&[5.0]), (5.0, 0.0));
    }

    #[test]
    fn grid_cardinality_and_aggregates() {
        let tmp = tempfile::tempdir().unwrap();
        write_corpus(tmp.path(), 12, 24, 5).unwrap();
        let res = run_bench(&grid_config(tmp.path(), None)).unwrap();
        assert_eq!(res.rows.len(), 72);
        assert_eq!(res.baseline.len(), 36);
        assert_eq!(res.aggregates.len(), 12);
        assert!(res.skipped.is_empty());
        for a in &res.aggregates {
            assert_eq!(a.count, 12);
            let values: Vec<f64> = res
                .rows
                .iter()
                .filter(|r| r.method == a.method && r.noise_sigma == a.noise_sigma)
                .map(|r| r.score(a.metric).unwrap())
                .collect();
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            assert!((mean - a.mean).abs() < 1e-12);
        }
        let mut sorted = res.rows.clone();
        sorted.sort_by(row_order);
        assert_eq!(sorted, res.rows);
    }

    #[test]
    fn identity_at_zero_noise_is_perfect() {
        let tmp = tempfile::tempdir().unwrap();
        write_corpus(tmp.path(), 3, 16, 2).unwrap();
        let mut cfg = grid_config(tmp.path(), None);
        cfg.noise_levels = vec![0.0];
        cfg.methods = vec![MethodSpec::Identity];
        let res = run_bench(&cfg).unwrap();
        for r in &res.rows {
            assert_eq!(r.score(Metric::Psnr), Some(PSNR_CAP_DB));
            assert!((r.score(Metric::Ssim).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_is_independent_of_worker_count() {
        let tmp = tempfile::tempdir().unwrap();
        write_corpus(&tmp.path().join("c"), 4, 20, 9).unwrap();
        let read = |jobs: usize| {
            let out = tmp.path().join(format!("out{jobs}"));
            run_bench_with_jobs(&grid_config(&tmp.path().join("c"), Some(out.clone())), jobs).unwrap();
            ["per_image.csv", "aggregate.csv", "baseline.csv"].map(|f| std::fs::read(out.join(f)).unwrap())
        };
        assert_eq!(read(1), read(4));
    }

    #[test]
    fn paired_mode_and_skips() {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path();
        write_corpus(&root.join("ref"), 3, 16, 1).unwrap();
        write_corpus(&root.join("dist"), 2, 16, 8).unwrap();
        std::fs::write(root.join("ref/zz_broken.pgm"), b"P5\n4 4\n255\n").unwrap();
        std::fs::write(root.join("dist/zz_broken.pgm"), b"garbage").unwrap();
        std::fs::write(root.join("dist/only_dist.pgm"), b"P5\n1 1\n255\n\0").unwrap();
        let cfg = BenchConfig {
            corpora: vec![CorpusSpec { name: "cure".into(), dir: root.to_path_buf(), mode: CorpusMode::PairedRefDist }],
            methods: vec![MethodSpec::Identity, MethodSpec::Gauss(Default::default())],
            ..BenchConfig::default()
        };
        let res = run_bench(&cfg).unwrap();
        assert_eq!(res.rows.len(), 4);
        assert!(res.rows.iter().all(|r| r.noise_sigma.is_none()));
        let skipped: Vec<String> = res.skipped.iter().map(|s| file_name(&s.path)).collect();
        assert_eq!(skipped, vec!["only_dist.pgm", "02_clouds.pgm", "zz_broken.pgm"]);
        assert_eq!(res.rows[0].scores, res.baseline[0].scores);
    }

    #[test]
    fn emitted_tables_follow_config_order() {
        let tmp = tempfile::tempdir().unwrap();
        write_corpus(&tmp.path().join("a"), 2, 16, 1).unwrap();
        write_corpus(&tmp.path().join("b"), 2, 16, 2).unwrap();
        let mut cfg = grid_config(&tmp.path().join("b"), None);
        cfg.corpora[0].name = "zeta".into();
        cfg.corpora.push(CorpusSpec { name: "alpha".into(), dir: tmp.path().join("a"), mode: CorpusMode::CleanAddNoise });
        cfg.methods.reverse();
        let res = run_bench(&cfg).unwrap();
        let out = tmp.path().join("out");
        let md = std::fs::read_to_string(&emit_tables(&res, TableFormat::Markdown, &out).unwrap()[0]).unwrap();
        assert!(md.contains("| Metric | zeta | alpha |"));
        assert!(md.find("## wavelet").unwrap() < md.find("## nlm").unwrap());
        let dat = std::fs::read_to_string(&emit_tables(&res, TableFormat::PlotData, &out).unwrap()[0]).unwrap();
        for block in dat.split("\n\n").skip(1) {
            let data: Vec<&str> = block.lines().filter(|l| !l.starts_with('#') && !l.is_empty()).collect();
            assert_eq!(data.len(), 3, "{block}");
            assert!(data.iter().all(|l| l.split_whitespace().count() == 3));
        }
        let csv = std::fs::read_to_string(emit_tables(&res, TableFormat::Csv, &out).unwrap()[0].clone()).unwrap();
        assert_eq!(csv.lines().next(), Some(CSV_HEADER));
        assert_eq!(csv.lines().count(), 1 + 2 * 2 * 2 * 3);
    }
}
