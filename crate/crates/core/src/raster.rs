//! Black-on-white rasterization of sketches.
//!
//! Strokes are drawn as round-capped, round-joined capsules on a binary grid
//! `supersample` times finer than the output, then box-filtered down. Canvas
//! coordinate `c` maps to `c · size` in output pixels and pixel centers sit
//! at integer coordinates, so a canvas line at `y = k / size` lands exactly
//! on row `k`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use image::codecs::png::PngEncoder;
use image::{ExtendedColorType, ImageEncoder};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sketch::{Point, Sketch};

/// Pixels darker than this count as foreground.
pub const DEFAULT_THRESHOLD: u8 = 128;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderSpec {
    pub size: u32,
    /// Stroke width in output pixels.
    pub stroke_width: f64,
    pub supersample: u32,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            size: 512,
            stroke_width: 3.0,
            supersample: 2,
        }
    }
}

impl RenderSpec {
    pub fn validate(&self) -> Result<()> {
        if self.size < 16 {
            return Err(Error::Config(format!("render size {} must be >= 16", self.size)));
        }
        if !(self.stroke_width >= 1.0) || !self.stroke_width.is_finite() {
            return Err(Error::Config(format!(
                "stroke width {} must be >= 1",
                self.stroke_width
            )));
        }
        if self.supersample < 1 {
            return Err(Error::Config("supersample must be >= 1".into()));
        }
        Ok(())
    }
}

/// Row-major 8-bit grayscale image; 0 is ink, 255 is paper.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl RasterImage {
    pub fn filled(width: u32, height: u32, value: u8) -> Self {
        RasterImage {
            width,
            height,
            pixels: vec![value; width as usize * height as usize],
        }
    }

    pub fn from_pixels(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != width as usize * height as usize {
            return Err(Error::Format(format!(
                "{} pixels do not fill {width}x{height}",
                pixels.len()
            )));
        }
        Ok(RasterImage {
            width,
            height,
            pixels,
        })
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, v: u8) {
        self.pixels[y as usize * self.width as usize + x as usize] = v;
    }

    pub fn encode_png(&self, out: impl Write) -> std::result::Result<(), image::ImageError> {
        PngEncoder::new(out).write_image(&self.pixels, self.width, self.height, ExtendedColorType::L8)
    }

    pub fn save_png(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.encode_png(&mut w).map_err(|e| Error::Image {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Load any PNG, converting to 8-bit grayscale.
    pub fn load_png(path: &Path) -> Result<Self> {
        let img = image::open(path).map_err(|e| match e {
            image::ImageError::IoError(io) => Error::io(path, io),
            other => Error::Image {
                path: path.to_path_buf(),
                message: other.to_string(),
            },
        })?;
        let gray = img.to_luma8();
        let (w, h) = gray.dimensions();
        Ok(RasterImage {
            width: w,
            height: h,
            pixels: gray.into_raw(),
        })
    }
}

struct Coverage {
    n: usize,
    cells: Vec<bool>,
}

impl Coverage {
    fn capsule(&mut self, a: (f64, f64), b: (f64, f64), half: f64) {
        let n = self.n as f64;
        let lo = |u: f64, v: f64| ((u.min(v) - half).ceil().max(0.0)) as usize;
        let hi = |u: f64, v: f64| (u.max(v) + half).floor().min(n - 1.0);
        let (x1, y1) = (hi(a.0, b.0), hi(a.1, b.1));
        if x1 < 0.0 || y1 < 0.0 {
            return;
        }
        let (x0, y0) = (lo(a.0, b.0), lo(a.1, b.1));
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let len2 = dx * dx + dy * dy;
        let r2 = half * half;
        // a pixel within `half` of the segment lies within `half` (in both
        // axes) of a segment point whose y is within `half` of the row; the
        // extra pixel of slack absorbs rounding, the exact test below decides
        let slack = half + 1.0;
        for y in y0..=y1 as usize {
            let py = y as f64;
            let (t0, t1) = if dy == 0.0 {
                (0.0, 1.0)
            } else {
                let (u, v) = ((py - slack - a.1) / dy, (py + slack - a.1) / dy);
                (u.min(v).max(0.0), u.max(v).min(1.0))
            };
            if t0 > t1 {
                continue;
            }
            let (ua, ub) = (a.0 + t0 * dx, a.0 + t1 * dx);
            let xs = ((ua.min(ub) - slack).ceil().max(x0 as f64)) as usize;
            let xe = (ua.max(ub) + slack).floor().min(x1);
            if xe < xs as f64 {
                continue;
            }
            let row = y * self.n;
            for x in xs..=xe as usize {
                // offsets relative to `a` keep the test exactly translation invariant
                let (qx, qy) = (x as f64 - a.0, py - a.1);
                let t = if len2 > 0.0 {
                    ((qx * dx + qy * dy) / len2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let (ex, ey) = (qx - t * dx, qy - t * dy);
                if ex * ex + ey * ey <= r2 {
                    self.cells[row + x] = true;
                }
            }
        }
    }
}

pub fn render(sketch: &Sketch, spec: &RenderSpec) -> RasterImage {
    let ss = spec.supersample.max(1) as usize;
    let size = spec.size as usize;
    let n = size * ss;
    let mut cov = Coverage {
        n,
        cells: vec![false; n * n],
    };
    let half = 0.5 * spec.stroke_width * ss as f64;
    let to_grid = |p: &Point| (p.x * n as f64, p.y * n as f64);
    for stroke in &sketch.strokes {
        match stroke.points.as_slice() {
            [] => {}
            [p] => cov.capsule(to_grid(p), to_grid(p), half),
            pts => {
                for w in pts.windows(2) {
                    cov.capsule(to_grid(&w[0]), to_grid(&w[1]), half);
                }
            }
        }
    }

    let area = ss * ss;
    let mut pixels = vec![255u8; size * size];
    for oy in 0..size {
        for ox in 0..size {
            let mut hits = 0usize;
            for sy in 0..ss {
                let row = (oy * ss + sy) * n + ox * ss;
                hits += cov.cells[row..row + ss].iter().filter(|&&c| c).count();
            }
            if hits > 0 {
                let ink = (255 * hits + area / 2) / area;
                pixels[oy * size + ox] = (255 - ink) as u8;
            }
        }
    }
    RasterImage {
        width: spec.size,
        height: spec.size,
        pixels,
    }
}

/// Coordinates `(x, y)` of pixels strictly darker than `threshold`, row-major.
pub fn foreground_points(img: &RasterImage, threshold: u8) -> Vec<(u32, u32)> {
    img.pixels
        .iter()
        .enumerate()
        .filter(|(_, &v)| v < threshold)
        .map(|(i, _)| ((i % img.width as usize) as u32, (i / img.width as usize) as u32))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketch::Stroke;

    fn spec(size: u32, width: f64, ss: u32) -> RenderSpec {
        RenderSpec {
            size,
            stroke_width: width,
            supersample: ss,
        }
    }

    fn sketch(strokes: Vec<Vec<(f64, f64)>>) -> Sketch {
        Sketch::new(
            strokes
                .into_iter()
                .map(|s| Stroke::new(s.into_iter().map(|(x, y)| Point::new(x, y)).collect()))
                .collect(),
            "t",
            "0",
        )
    }

    #[test]
    fn empty_sketch_is_white() {
        let img = render(&sketch(vec![]), &RenderSpec::default());
        assert!(img.pixels.iter().all(|&v| v == 255));
        assert_eq!(img.pixels.len(), 512 * 512);
    }

    #[test]
    fn horizontal_line_hits_row_four() {
        let img = render(&sketch(vec![vec![(0.0, 0.5), (1.0, 0.5)]]), &spec(8, 1.0, 1));
        for y in 0..8 {
            for x in 0..8 {
                let expected = if y == 4 { 0 } else { 255 };
                assert_eq!(img.get(x, y), expected, "({x},{y})");
            }
        }
    }

    #[test]
    fn render_is_deterministic() {
        let s = sketch(vec![vec![(0.1, 0.2), (0.7, 0.9), (0.3, 0.3)], vec![(0.5, 0.5)]]);
        assert_eq!(render(&s, &RenderSpec::default()), render(&s, &RenderSpec::default()));
    }

    #[test]
    fn single_point_draws_a_dot() {
        let img = render(&sketch(vec![vec![(0.5, 0.5)]]), &spec(16, 3.0, 1));
        let fg = foreground_points(&img, DEFAULT_THRESHOLD);
        assert!(fg.contains(&(8, 8)));
        assert!(fg.len() >= 5);
    }

    #[test]
    fn supersampling_produces_gray_edges() {
        let img = render(&sketch(vec![vec![(0.1, 0.3), (0.9, 0.61)]]), &spec(64, 2.0, 4));
        assert!(img.pixels.iter().any(|&v| v > 0 && v < 255));
    }

    #[test]
    fn foreground_cases() {
        let mut img = RasterImage::filled(8, 8, 255);
        assert!(foreground_points(&img, 128).is_empty());
        img.set(3, 4, 0);
        assert_eq!(foreground_points(&img, 128), vec![(3, 4)]);
    }

    #[test]
    fn spec_validation() {
        assert!(spec(8, 1.0, 1).validate().is_err());
        assert!(spec(16, 0.5, 1).validate().is_err());
        assert!(spec(16, 1.0, 0).validate().is_err());
        assert!(RenderSpec::default().validate().is_ok());
    }

    #[test]
    fn png_roundtrip() {
        let img = render(&sketch(vec![vec![(0.1, 0.2), (0.7, 0.9)]]), &spec(32, 2.0, 2));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.png");
        img.save_png(&path).unwrap();
        assert_eq!(RasterImage::load_png(&path).unwrap(), img);
    }
}
