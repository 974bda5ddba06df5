//! Channel-planar rasters of normalized intensities and binary PGM/PPM I/O.
//!
//! Samples live in `[0, 1]`; the 0–255 scale only appears when reading or
//! writing files (and in PSNR's peak term). Files are binary Netpbm with
//! `maxval = 255`: `P5` for gray, `P6` for interleaved RGB.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// BT.601 luma weights for R, G, B.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    planes: Vec<Vec<f64>>,
}

impl Image {
    /// Builds an image from per-channel row-major planes.
    pub fn from_planes(width: usize, height: usize, planes: Vec<Vec<f64>>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if planes.len() != 1 && planes.len() != 3 {
            return Err(Error::InvalidImage(format!(
                "channel count must be 1 or 3, got {}",
                planes.len()
            )));
        }
        if let Some(p) = planes.iter().find(|p| p.len() != width * height) {
            return Err(Error::InvalidImage(format!(
                "plane length {} does not match {width}x{height}",
                p.len()
            )));
        }
        Ok(Self {
            width,
            height,
            planes,
        })
    }

    pub fn gray(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        Self::from_planes(width, height, vec![data])
    }

    /// Constant image with `channels` planes filled with `value`.
    pub fn filled(width: usize, height: usize, channels: usize, value: f64) -> Result<Self> {
        Self::from_planes(width, height, vec![vec![value; width * height]; channels])
    }

    /// Gray image from a closure evaluated at `(x, y)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::gray(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.planes.len()
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn plane(&self, c: usize) -> &[f64] {
        &self.planes[c]
    }

    pub fn planes(&self) -> &[Vec<f64>] {
        &self.planes
    }

    pub fn into_planes(self) -> Vec<Vec<f64>> {
        self.planes
    }

    pub fn get(&self, c: usize, x: usize, y: usize) -> f64 {
        self.planes[c][y * self.width + x]
    }

    pub fn same_shape(&self, other: &Image) -> bool {
        self.width == other.width && self.height == other.height && self.channels() == other.channels()
    }

    /// Applies `f` to every plane, keeping the geometry.
    pub fn map_planes(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Image {
        let planes = self.planes.iter().map(|p| f(p)).collect();
        Image {
            width: self.width,
            height: self.height,
            planes,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Image {
        self.map_planes(|p| p.iter().map(|&s| f(s)).collect())
    }

    pub fn clamped(&self) -> Image {
        self.map(|s| s.clamp(0.0, 1.0))
    }

    /// Rounds every sample to the nearest 8-bit level, as `save_image` would.
    pub fn quantized(&self) -> Image {
        self.map(|s| f64::from(quantize(s)) / 255.0)
    }

    pub fn flip_horizontal(&self) -> Image {
        let w = self.width;
        self.map_planes(|p| {
            p.chunks_exact(w)
                .flat_map(|row| row.iter().rev().copied())
                .collect()
        })
    }

    pub fn flip_vertical(&self) -> Image {
        let w = self.width;
        self.map_planes(|p| p.chunks_exact(w).rev().flatten().copied().collect())
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.planes
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)))
    }
}

/// `round(255 * clamp(s, 0, 1))`, halves rounding up.
pub fn quantize(s: f64) -> u8 {
    (255.0 * s.clamp(0.0, 1.0)).round() as u8
}

/// BT.601 luma; identity for gray input.
pub fn to_gray(img: &Image) -> Image {
    if img.channels() == 1 {
        return img.clone();
    }
    let [wr, wg, wb] = LUMA_WEIGHTS;
    let (r, g, b) = (img.plane(0), img.plane(1), img.plane(2));
    let data = (0..img.len()).map(|i| wr * r[i] + wg * g[i] + wb * b[i]).collect();
    Image {
        width: img.width,
        height: img.height,
        planes: vec![data],
    }
}

/// Reads a binary PGM (`P5`) or PPM (`P6`) file with `maxval = 255`.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pnm(&bytes)
}

/// Writes `img` as `P5` (gray) or `P6` (RGB).
pub fn save_image(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_pnm(img);
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&bytes).map_err(|e| Error::io(path, e))
}

pub fn encode_pnm(img: &Image) -> Vec<u8> {
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let header = format!("{magic}\n{} {}\n255\n", img.width, img.height);
    let mut out = Vec::with_capacity(header.len() + img.len() * img.channels());
    out.extend_from_slice(header.as_bytes());
    for i in 0..img.len() {
        for p in &img.planes {
            out.push(quantize(p[i]));
        }
    }
    out
}

pub fn decode_pnm(bytes: &[u8]) -> Result<Image> {
    let mut cursor = HeaderCursor { bytes, pos: 0 };
    let magic = cursor.token()?;
    let channels = match magic.as_str() {
        "P5" => 1,
        "P6" => 3,
        _ => return Err(Error::UnsupportedMagic(magic)),
    };
    let width = cursor.number("width")?;
    let height = cursor.number("height")?;
    let maxval = cursor.number("maxval")?;
    if maxval != 255 {
        return Err(Error::UnsupportedMaxval(maxval));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(cursor.pos) {
        Some(b) if b.is_ascii_whitespace() => cursor.pos += 1,
        _ => return Err(Error::MalformedHeader("missing whitespace after maxval".into())),
    }
    let (width, height) = (width as usize, height as usize);
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!("zero dimension {width}x{height}")));
    }
    let expected = width * height * channels;
    let payload = &bytes[cursor.pos..];
    if payload.len() < expected {
        return Err(Error::TruncatedPayload {
            expected,
            found: payload.len(),
        });
    }
    let mut planes = vec![Vec::with_capacity(width * height); channels];
    for px in payload[..expected].chunks_exact(channels) {
        for (plane, &v) in planes.iter_mut().zip(px) {
            plane.push(f64::from(v) / 255.0);
        }
    }
    Image::from_planes(width, height, planes)
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<String> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| !b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::MalformedHeader("unexpected end of header".into()));
        }
        Ok(String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned())
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        let tok = self.token()?;
        tok.parse()
            .map_err(|_| Error::MalformedHeader(format!("{what} is not a number: {tok:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gray_endpoints() {
        let img = decode_pnm(b"P5\n2 1\n255\n\x00\xff").unwrap();
        assert_eq!(img.channels(), 1);
        assert_eq!(img.plane(0), &[0.0, 1.0]);
    }

    #[test]
    fn pure_red_pixel() {
        let img = decode_pnm(b"P6\n1 1\n255\n\xff\x00\x00").unwrap();
        assert_eq!(img.channels(), 3);
        assert_eq!(img.plane(0), &[1.0]);
        assert_eq!(img.plane(1), &[0.0]);
        assert_eq!(img.plane(2), &[0.0]);
    }

    #[test]
    fn header_comments_are_skipped() {
        let img = decode_pnm(b"P5\n# made by hand\n1 1\n255\n\x80").unwrap();
        assert_eq!(img.plane(0), &[128.0 / 255.0]);
    }

    #[test]
    fn load_errors_are_distinct() {
        assert!(matches!(decode_pnm(b"P2\n1 1\n255\n0"), Err(Error::UnsupportedMagic(m)) if m == "P2"));
        assert!(matches!(
            decode_pnm(b"P5\n2 2\n255\n\x00\x01"),
            Err(Error::TruncatedPayload { expected: 4, found: 2 })
        ));
        assert!(matches!(decode_pnm(b"P5\n1 1\n65535\n\x00\x00"), Err(Error::UnsupportedMaxval(65535))));
        assert!(matches!(decode_pnm(b"P5\n1"), Err(Error::MalformedHeader(_))));
    }

    #[test]
    fn save_rounds_half_up_and_clamps() {
        let img = Image::gray(3, 1, vec![0.5, 1.2, -0.3]).unwrap();
        let bytes = encode_pnm(&img);
        assert_eq!(&bytes[bytes.len() - 3..], &[128, 255, 0]);
    }

    #[test]
    fn save_is_byte_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let img = Image::from_fn(5, 4, |x, y| ((x * 7 + y * 3) % 11) as f64 / 10.0).unwrap();
        let (a, b) = (dir.path().join("a.pgm"), dir.path().join("b.pgm"));
        save_image(&img, &a).unwrap();
        save_image(&img, &b).unwrap();
        assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
    }

    #[test]
    fn unwritable_path_is_reported() {
        let img = Image::filled(1, 1, 1, 0.0).unwrap();
        let err = save_image(&img, "/nonexistent-dir/x.pgm").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn luma_conversion() {
        let white = Image::filled(1, 1, 3, 1.0).unwrap();
        assert!((to_gray(&white).plane(0)[0] - 1.0).abs() < 1e-15);
        let red = Image::from_planes(1, 1, vec![vec![1.0], vec![0.0], vec![0.0]]).unwrap();
        assert_eq!(to_gray(&red).plane(0), &[0.299]);
        let g = Image::gray(2, 1, vec![0.25, 0.75]).unwrap();
        assert_eq!(to_gray(&g), g);
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(Image::gray(0, 3, vec![]).is_err());
        assert!(Image::gray(2, 2, vec![0.0; 3]).is_err());
        assert!(Image::from_planes(1, 1, vec![vec![0.0]; 2]).is_err());
    }

    proptest! {
        #[test]
        fn save_load_roundtrip(seed in any::<u64>(), rgb in any::<bool>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let channels = if rgb { 3 } else { 1 };
            let planes = (0..channels)
                .map(|_| (0..64).map(|_| f64::from(rng.random::<u8>()) / 255.0).collect())
                .collect();
            let img = Image::from_planes(8, 8, planes).unwrap();
            let back = decode_pnm(&encode_pnm(&img)).unwrap();
            prop_assert_eq!(back, img);
        }

        #[test]
        fn luma_stays_in_unit_range(r in 0.0..=1.0f64, g in 0.0..=1.0f64, b in 0.0..=1.0f64) {
            let img = Image::from_planes(1, 1, vec![vec![r], vec![g], vec![b]]).unwrap();
            let y = to_gray(&img).plane(0)[0];
            prop_assert!((0.0..=1.0 + 1e-15).contains(&y));
        }
    }
}
