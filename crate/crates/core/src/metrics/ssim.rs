//! Mean SSIM over all valid Gaussian-weighted windows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::RasterImage;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SsimParams {
    pub window: usize,
    pub sigma: f64,
    pub k1: f64,
    pub k2: f64,
    pub dynamic_range: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        SsimParams {
            window: 11,
            sigma: 1.5,
            k1: 0.01,
            k2: 0.03,
            dynamic_range: 255.0,
        }
    }
}

impl SsimParams {
    pub fn validate(&self) -> Result<()> {
        if self.window % 2 == 0 || self.window == 0 {
            return Err(Error::Config(format!("ssim window {} must be odd", self.window)));
        }
        if !(self.sigma > 0.0 && self.k1 > 0.0 && self.k2 > 0.0 && self.dynamic_range > 0.0) {
            return Err(Error::Config("ssim sigma and constants must be positive".into()));
        }
        Ok(())
    }

    pub fn c1(&self) -> f64 {
        (self.k1 * self.dynamic_range).powi(2)
    }

    pub fn c2(&self) -> f64 {
        (self.k2 * self.dynamic_range).powi(2)
    }

    fn kernel(&self) -> Vec<f64> {
        let r = (self.window / 2) as f64;
        let raw: Vec<f64> = (0..self.window)
            .map(|i| {
                let d = i as f64 - r;
                (-d * d / (2.0 * self.sigma * self.sigma)).exp()
            })
            .collect();
        let sum: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / sum).collect()
    }
}

/// Separable "valid" correlation: output is `(w - k + 1) × (h - k + 1)`.
fn filter_valid(src: &[f64], w: usize, h: usize, kernel: &[f64]) -> Vec<f64> {
    let k = kernel.len();
    let (ow, oh) = (w - k + 1, h - k + 1);
    let mut horiz = vec![0.0; ow * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..ow {
            horiz[y * ow + x] = kernel.iter().zip(&row[x..x + k]).map(|(a, b)| a * b).sum();
        }
    }
    // row-wise accumulation keeps the vertical pass cache friendly
    let mut out = vec![0.0; ow * oh];
    for (y, dst) in out.chunks_exact_mut(ow).enumerate() {
        for (i, &kv) in kernel.iter().enumerate() {
            let src = &horiz[(y + i) * ow..(y + i + 1) * ow];
            for (d, &s) in dst.iter_mut().zip(src) {
                *d += kv * s;
            }
        }
    }
    out
}

pub fn ssim(a: &RasterImage, b: &RasterImage, p: &SsimParams) -> Result<f64> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::Shape(a.width, a.height, b.width, b.height));
    }
    p.validate()?;
    let (w, h) = (a.width as usize, a.height as usize);
    if w < p.window || h < p.window {
        return Err(Error::Config(format!(
            "{w}x{h} image is smaller than the {} px SSIM window",
            p.window
        )));
    }
    let kernel = p.kernel();
    let fa: Vec<f64> = a.pixels.iter().map(|&v| f64::from(v)).collect();
    let fb: Vec<f64> = b.pixels.iter().map(|&v| f64::from(v)).collect();
    let prod = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(u, v)| u * v).collect::<Vec<_>>();

    let mu_a = filter_valid(&fa, w, h, &kernel);
    let mu_b = filter_valid(&fb, w, h, &kernel);
    let aa = filter_valid(&prod(&fa, &fa), w, h, &kernel);
    let bb = filter_valid(&prod(&fb, &fb), w, h, &kernel);
    let ab = filter_valid(&prod(&fa, &fb), w, h, &kernel);

    let (c1, c2) = (p.c1(), p.c2());
    let total: f64 = (0..mu_a.len())
        .map(|i| {
            let (ma, mb) = (mu_a[i], mu_b[i]);
            let va = aa[i] - ma * ma;
            let vb = bb[i] - mb * mb;
            let cov = ab[i] - ma * mb;
            ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2))
        })
        .sum();
    Ok(total / mu_a.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_images() {
        let p = SsimParams::default();
        let g = RasterImage::filled(16, 16, 128);
        assert_eq!(ssim(&g, &g, &p).unwrap(), 1.0);
        let black = RasterImage::filled(16, 16, 0);
        let white = RasterImage::filled(16, 16, 255);
        let expected = p.c1() / (255.0 * 255.0 + p.c1());
        assert!((ssim(&black, &white, &p).unwrap() - expected).abs() < 1e-9);
        assert!((expected - 1.0e-4).abs() < 1e-7);
    }

    #[test]
    fn rejects_mismatch_and_tiny_images() {
        let p = SsimParams::default();
        let a = RasterImage::filled(16, 16, 0);
        let b = RasterImage::filled(16, 17, 0);
        assert!(matches!(ssim(&a, &b, &p), Err(Error::Shape(..))));
        let t = RasterImage::filled(8, 8, 0);
        assert!(ssim(&t, &t, &p).is_err());
    }

    #[test]
    fn kernel_sums_to_one() {
        let k = SsimParams::default().kernel();
        assert_eq!(k.len(), 11);
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((k[0] - k[10]).abs() < 1e-18);
    }
}
