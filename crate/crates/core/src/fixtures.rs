//! Deterministic synthetic grayscale scenes standing in for a small natural
//! image test set: piecewise-smooth regions with antialiased edges, shading,
//! and 1/f texture. Every scene is quantized to 8 bits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::raster::{save_image, Image};

/// Scene families, cycled by index.
pub const SCENE_NAMES: [&str; 12] = [
    "discs", "house", "clouds", "silhouette", "blocks", "stripes", "blobs", "landscape", "star", "tiles",
    "rings", "collage",
];

type Shape = Box<dyn Fn(f64, f64) -> bool>;

struct Layer {
    inside: Shape,
    base: f64,
    slope: (f64, f64),
}

struct Scene {
    background: Box<dyn Fn(f64, f64) -> f64>,
    layers: Vec<Layer>,
    texture: f64,
}

/// Random sinusoid field with log-uniform frequencies and equal energy per
/// octave (a 1/f amplitude spectrum), roughly in [-1, 1].
fn fractal_field(rng: &mut ChaCha8Rng, size: f64, components: usize) -> impl Fn(f64, f64) -> f64 {
    let waves: Vec<(f64, f64, f64)> = (0..components)
        .map(|_| {
            let f = (rng.random_range((2.0f64).ln()..(size / 3.0).ln())).exp() / size;
            let theta = rng.random_range(0.0..PI);
            let phase = rng.random_range(0.0..2.0 * PI);
            (f * theta.cos(), f * theta.sin(), phase)
        })
        .collect();
    let norm = (components as f64).sqrt() * 2.0;
    move |x, y| {
        waves
            .iter()
            .map(|&(fx, fy, ph)| (2.0 * PI * (fx * x + fy * y) + ph).sin())
            .sum::<f64>()
            / norm
    }
}

fn disc(cx: f64, cy: f64, r: f64) -> Shape {
    Box::new(move |x, y| (x - cx).powi(2) + (y - cy).powi(2) <= r * r)
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Shape {
    Box::new(move |x, y| x >= x0 && x <= x1 && y >= y0 && y <= y1)
}

fn polygon(pts: Vec<(f64, f64)>) -> Shape {
    Box::new(move |x, y| {
        let mut inside = false;
        let n = pts.len();
        for i in 0..n {
            let (xi, yi) = pts[i];
            let (xj, yj) = pts[(i + n - 1) % n];
            if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
                inside = !inside;
            }
        }
        inside
    })
}

fn layer(inside: Shape, base: f64, slope: (f64, f64)) -> Layer {
    Layer { inside, base, slope }
}

fn build_scene(kind: usize, rng: &mut ChaCha8Rng, s: f64) -> Scene {
    let mut gray = |lo: f64, hi: f64| rng.random_range(lo..hi);
    let bg_a = gray(0.25, 0.75);
    let bg_gx = gray(-0.3, 0.3) / s;
    let bg_gy = gray(-0.3, 0.3) / s;
    let mut layers = Vec::new();
    let mut texture = 0.12;
    match kind {
        0 => {
            for _ in 0..7 {
                let (cx, cy, r) = (rng.random_range(0.1..0.9) * s, rng.random_range(0.1..0.9) * s, rng.random_range(0.06..0.22) * s);
                layers.push(layer(disc(cx, cy, r), rng.random_range(0.05..0.95), (0.0, 0.0)));
            }
        }
        1 => {
            let (x0, x1, y0) = (0.2 * s, 0.8 * s, 0.45 * s);
            layers.push(layer(rect(x0, y0, x1, 0.95 * s), 0.7, (0.4 / s, 0.0)));
            layers.push(layer(polygon(vec![(0.12 * s, y0), (0.5 * s, 0.12 * s), (0.88 * s, y0)]), 0.2, (0.0, 0.3 / s)));
            for i in 0..3 {
                for j in 0..2 {
                    let wx = 0.27 * s + i as f64 * 0.18 * s;
                    let wy = 0.52 * s + j as f64 * 0.2 * s;
                    layers.push(layer(rect(wx, wy, wx + 0.1 * s, wy + 0.12 * s), 0.1, (0.0, 0.0)));
                }
            }
            layers.push(layer(rect(0.45 * s, 0.75 * s, 0.55 * s, 0.95 * s), 0.35, (0.0, 0.0)));
        }
        2 => texture = 0.4,
        3 => {
            let pts: Vec<(f64, f64)> = (0..14)
                .map(|i| {
                    let a = i as f64 / 14.0 * 2.0 * PI;
                    let r = rng.random_range(0.18..0.34) * s;
                    (0.5 * s + r * a.cos(), 0.45 * s + 1.3 * r * a.sin())
                })
                .collect();
            layers.push(layer(polygon(pts), 0.08, (0.1 / s, 0.0)));
            layers.push(layer(rect(0.0, 0.82 * s, s, s), 0.55, (0.0, 0.3 / s)));
            layers.push(layer(rect(0.62 * s, 0.3 * s, 0.66 * s, 0.9 * s), 0.15, (0.0, 0.0)));
        }
        4 => {
            for _ in 0..12 {
                let (x, y) = (rng.random_range(0.0..0.85) * s, rng.random_range(0.0..0.85) * s);
                let (w, h) = (rng.random_range(0.05..0.3) * s, rng.random_range(0.05..0.3) * s);
                layers.push(layer(rect(x, y, x + w, y + h), rng.random_range(0.05..0.95), (0.0, 0.0)));
            }
        }
        5 => {
            let period = rng.random_range(6.0..12.0);
            let angle = rng.random_range(0.0..PI);
            let (c, sn) = (angle.cos(), angle.sin());
            layers.push(layer(
                Box::new(move |x, y| ((x * c + y * sn) / period).rem_euclid(1.0) < 0.5),
                0.8,
                (0.0, 0.0),
            ));
            layers.push(layer(disc(0.5 * s, 0.5 * s, 0.25 * s), 0.4, (0.3 / s, 0.2 / s)));
            texture = 0.06;
        }
        6 => {
            for _ in 0..6 {
                let (cx, cy) = (rng.random_range(0.15..0.85) * s, rng.random_range(0.15..0.85) * s);
                let (rx, ry) = (rng.random_range(0.08..0.2) * s, rng.random_range(0.08..0.2) * s);
                let v = rng.random_range(0.1..0.9);
                layers.push(layer(
                    Box::new(move |x, y| ((x - cx) / rx).powi(2) + ((y - cy) / ry).powi(2) <= 1.0),
                    v,
                    (rng.random_range(-0.6..0.6) / s, rng.random_range(-0.6..0.6) / s),
                ));
            }
        }
        7 => {
            let ridge = fractal_field(rng, s, 12);
            layers.push(layer(
                Box::new(move |x, y| y > 0.55 * s + 0.15 * s * ridge(x, 0.0)),
                0.3,
                (0.0, 0.4 / s),
            ));
            layers.push(layer(disc(0.78 * s, 0.2 * s, 0.07 * s), 0.95, (0.0, 0.0)));
        }
        8 => {
            let arms = rng.random_range(5..8);
            let pts: Vec<(f64, f64)> = (0..2 * arms)
                .map(|i| {
                    let a = i as f64 / (2 * arms) as f64 * 2.0 * PI;
                    let r = if i % 2 == 0 { 0.42 } else { 0.18 } * s;
                    (0.5 * s + r * a.cos(), 0.5 * s + r * a.sin())
                })
                .collect();
            layers.push(layer(polygon(pts), 0.85, (-0.4 / s, 0.3 / s)));
        }
        9 => {
            let n = rng.random_range(4..8) as f64;
            let cell = s / n;
            let levels: Vec<f64> = (0..64).map(|_| rng.random_range(0.1..0.9)).collect();
            return Scene {
                background: Box::new(move |x, y| {
                    let (i, j) = ((x / cell) as usize, (y / cell) as usize);
                    levels[(i * 8 + j) % 64]
                }),
                layers,
                texture: 0.09,
            };
        }
        10 => {
            let (cx, cy) = (rng.random_range(0.3..0.7) * s, rng.random_range(0.3..0.7) * s);
            let width = rng.random_range(8.0..16.0);
            layers.push(layer(
                Box::new(move |x, y| ((x - cx).hypot(y - cy) / width).rem_euclid(2.0) < 1.0),
                0.75,
                (0.0, 0.0),
            ));
            texture = 0.06;
        }
        _ => {
            texture = 0.3;
            for _ in 0..4 {
                let (cx, cy, r) = (rng.random_range(0.2..0.8) * s, rng.random_range(0.2..0.8) * s, rng.random_range(0.08..0.18) * s);
                layers.push(layer(disc(cx, cy, r), rng.random_range(0.05..0.95), (0.0, 0.0)));
            }
            let (x, y) = (rng.random_range(0.05..0.5) * s, rng.random_range(0.05..0.5) * s);
            layers.push(layer(rect(x, y, x + 0.35 * s, y + 0.2 * s), 0.9, (0.0, 0.0)));
        }
    }
    Scene {
        background: Box::new(move |x, y| bg_a + bg_gx * (x - s / 2.0) + bg_gy * (y - s / 2.0)),
        layers,
        texture,
    }
}

/// Renders scene `index` at `size x size` with 4x4 supersampling.
pub fn synthetic_scene(index: usize, size: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let s = size as f64;
    let scene = build_scene(index % SCENE_NAMES.len(), &mut rng, s);
    let tex = fractal_field(&mut rng, s, 48);
    const SUB: usize = 4;
    Image::from_fn(size, size, |px, py| {
        let mut acc = 0.0;
        for sy in 0..SUB {
            for sx in 0..SUB {
                let x = px as f64 + (sx as f64 + 0.5) / SUB as f64;
                let y = py as f64 + (sy as f64 + 0.5) / SUB as f64;
                let mut v = (scene.background)(x, y);
                for l in &scene.layers {
                    if (l.inside)(x, y) {
                        v = l.base + l.slope.0 * (x - s / 2.0) + l.slope.1 * (y - s / 2.0);
                    }
                }
                acc += v;
            }
        }
        let v = acc / (SUB * SUB) as f64 + scene.texture * tex(px as f64, py as f64);
        v.clamp(0.0, 1.0)
    })
    .expect("positive size")
    .quantized()
}

/// `count` named scenes (`00_discs`, `01_house`, ...).
pub fn synthetic_corpus(count: usize, size: usize, seed: u64) -> Vec<(String, Image)> {
    (0..count)
        .map(|i| {
            (
                format!("{:02}_{}", i, SCENE_NAMES[i % SCENE_NAMES.len()]),
                synthetic_scene(i, size, seed),
            )
        })
        .collect()
}

/// Writes [`synthetic_corpus`] into `dir` as binary PGMs.
pub fn write_corpus(dir: &Path, count: usize, size: usize, seed: u64) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    synthetic_corpus(count, size, seed)
        .into_iter()
        .map(|(name, img)| {
            let path = dir.join(format!("{name}.pgm"));
            save_image(&img, &path)?;
            Ok(path)
        })
        .collect()
}
