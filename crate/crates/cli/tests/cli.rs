use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_denoisekit")).args(args).output().expect("spawn cli")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn corpus(dir: &Path, count: usize, size: usize) -> Vec<PathBuf> {
    let listing = ok(&["fixtures", "--out", s(dir), "--count", &count.to_string(), "--size", &size.to_string()]);
    listing.lines().map(PathBuf::from).collect()
}

fn iqa_json(reference: &Path, test: &Path) -> serde_json::Value {
    serde_json::from_str(&ok(&["iqa", "--ref", s(reference), "--test", s(test), "--metrics", "psnr,ssim,cwssim,summer_like", "--json"]))
        .unwrap()
}

#[test]
fn noisegen_is_seed_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let clean = &corpus(tmp.path(), 1, 32)[0];
    let out = |name: &str, seed: &str| {
        let p = tmp.path().join(name);
        ok(&["noisegen", "--sigma", "25", "--seed", seed, s(clean), s(&p)]);
        std::fs::read(p).unwrap()
    };
    assert_eq!(out("a.pgm", "5"), out("b.pgm", "5"));
    assert_ne!(out("a.pgm", "5"), out("c.pgm", "6"));
    let p = tmp.path().join("d.pgm");
    ok(&["noisegen", "--sigma", "25", "--seed", "5", "--no-clamp", s(clean), s(&p)]);
    assert!(!run(&["noisegen", "--sigma", "0", "--seed", "1", s(clean), s(&p)]).status.success());
}

#[test]
fn iqa_identity_and_json_shape() {
    let tmp = tempfile::tempdir().unwrap();
    let clean = &corpus(tmp.path(), 1, 40)[0];
    let v = iqa_json(clean, clean);
    assert_eq!(v["psnr_db"], "inf");
    assert!((v["ssim"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["cw_ssim"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["summer_like"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    let text = ok(&["iqa", "--ref", s(clean), "--test", s(clean), "--metrics", "psnr,ssim"]);
    assert_eq!(text.lines().collect::<Vec<_>>(), vec!["psnr_db: inf", "ssim: 1.000000"]);
}

#[test]
fn iqa_rejects_bad_input() {
    let tmp = tempfile::tempdir().unwrap();
    let a = &corpus(&tmp.path().join("a"), 1, 32)[0];
    let b = &corpus(&tmp.path().join("b"), 1, 40)[0];
    assert!(!run(&["iqa", "--ref", s(a), "--test", s(b)]).status.success());
    assert!(!run(&["iqa", "--ref", s(a), "--test", s(a), "--metrics", "psnr,unique"]).status.success());
    assert!(!run(&["iqa", "--ref", s(a), "--test", "/nonexistent.pgm"]).status.success());
}

#[test]
fn every_method_denoises() {
    let tmp = tempfile::tempdir().unwrap();
    let clean = &corpus(tmp.path(), 1, 64)[0];
    let noisy = tmp.path().join("noisy.pgm");
    ok(&["noisegen", "--sigma", "25", "--seed", "3", s(clean), s(&noisy)]);
    let base = iqa_json(clean, &noisy)["psnr_db"].as_f64().unwrap();
    let variants: [&[&str]; 5] = [
        &["--method", "gauss"],
        &["--method", "nlm"],
        &["--method", "nlm", "--h-factor", "0.6", "--sigma", "25", "--patch-radius", "2", "--search-radius", "7"],
        &["--method", "wavelet"],
        &["--method", "wavelet", "--threshold", "universal", "--levels", "2"],
    ];
    for (i, v) in variants.iter().enumerate() {
        let out = tmp.path().join(format!("d{i}.pgm"));
        let mut args = vec!["denoise"];
        args.extend_from_slice(v);
        args.extend([s(&noisy), s(&out)]);
        ok(&args);
        let p = iqa_json(clean, &out)["psnr_db"].as_f64().unwrap();
        assert!(p > base, "{v:?}: {p} <= {base}");
    }
    let out = tmp.path().join("x.pgm");
    assert!(!run(&["denoise", "--method", "median", s(&noisy), s(&out)]).status.success());
    assert!(!run(&["denoise", "--method", "nlm", "--patch-radius", "0", s(&noisy), s(&out)]).status.success());
}

#[test]
fn bench_outputs_are_identical_across_job_counts() {
    let tmp = tempfile::tempdir().unwrap();
    corpus(&tmp.path().join("imgs"), 3, 32);
    let cfg = tmp.path().join("run.conf");
    std::fs::write(
        &cfg,
        "seed = 9\nlevel = 15, 50\nmetrics = psnr, ssim, cwssim, summer_like\ncorpus = tiny imgs\n\
         method = nlm h_factor=0.8\nmethod = wavelet threshold=bayes\nmethod = identity\n",
    )
    .unwrap();
    let go = |jobs: &str| {
        let out = tmp.path().join(format!("out{jobs}"));
        ok(&["bench", "--config", s(&cfg), "--out", s(&out), "--jobs", jobs]);
        out
    };
    let (a, b) = (go("1"), go("8"));
    for f in ["per_image.csv", "aggregate.csv", "baseline.csv", "tables.md", "trend.dat"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let csv = std::fs::read_to_string(a.join("per_image.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("corpus,image,method,h_factor,threshold_policy,noise_sigma,psnr_db,ssim,cw_ssim,summer_like,runtime_ms")
    );
    assert_eq!(lines.count(), 3 * 3 * 2);
    assert!(!run(&["bench", "--config", "/nonexistent.conf", "--out", s(&a)]).status.success());
}
