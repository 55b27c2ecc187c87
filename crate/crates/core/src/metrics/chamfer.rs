//! Chamfer distance between foreground pixel sets.
//!
//! `CD = ½ (mean_{a∈A} min_{b∈B} |a−b| + mean_{b∈B} min_{a∈A} |a−b|)`, in pixels.
//! The fast path looks nearest distances up in an exact squared Euclidean
//! distance transform (Felzenszwalb–Huttenlocher lower envelope).

use crate::error::{Error, Result};
use crate::raster::{foreground_points, RasterImage};

const FAR: f64 = 1e20;

/// 1-D squared distance transform of sampled function `f` into `d`.
fn edt_1d(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let qf = q as f64;
        let mut s;
        loop {
            let p = v[k] as f64;
            s = ((f[q] + qf * qf) - (f[v[k]] + p * p)) / (2.0 * qf - 2.0 * p);
            // z[0] is -inf, so this never underflows k
            if s <= z[k] {
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, out) in d.iter_mut().enumerate() {
        let qf = q as f64;
        while z[k + 1] < qf {
            k += 1;
        }
        let p = v[k] as f64;
        *out = (qf - p) * (qf - p) + f[v[k]];
    }
}

/// Squared Euclidean distance from every pixel to the nearest seed.
pub fn squared_distance_transform(width: usize, height: usize, seeds: &[(u32, u32)]) -> Vec<f64> {
    let mut grid = vec![FAR; width * height];
    for &(x, y) in seeds {
        grid[y as usize * width + x as usize] = 0.0;
    }
    let n = width.max(height);
    let (mut f, mut d) = (vec![0.0; n], vec![0.0; n]);
    let (mut v, mut z) = (vec![0usize; n], vec![0.0; n + 1]);

    let mut seeded = vec![false; width];
    for &(x, _) in seeds {
        seeded[x as usize] = true;
    }
    for x in (0..width).filter(|&x| seeded[x]) {
        // seedless columns stay FAR; every row still meets a seeded column
        for y in 0..height {
            f[y] = grid[y * width + x];
        }
        edt_1d(&f[..height], &mut d[..height], &mut v, &mut z);
        for y in 0..height {
            grid[y * width + x] = d[y];
        }
    }
    for y in 0..height {
        let row = &mut grid[y * width..(y + 1) * width];
        f[..width].copy_from_slice(row);
        edt_1d(&f[..width], &mut d[..width], &mut v, &mut z);
        row.copy_from_slice(&d[..width]);
    }
    grid
}

fn directed_mean(from: &[(u32, u32)], dt: &[f64], width: usize) -> f64 {
    let sum: f64 = from
        .iter()
        .map(|&(x, y)| dt[y as usize * width + x as usize].sqrt())
        .sum();
    sum / from.len() as f64
}

fn foregrounds(a: &RasterImage, b: &RasterImage, threshold: u8) -> Result<(Vec<(u32, u32)>, Vec<(u32, u32)>)> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::Shape(a.width, a.height, b.width, b.height));
    }
    let fa = foreground_points(a, threshold);
    if fa.is_empty() {
        return Err(Error::EmptyForeground("first"));
    }
    let fb = foreground_points(b, threshold);
    if fb.is_empty() {
        return Err(Error::EmptyForeground("second"));
    }
    Ok((fa, fb))
}

/// Chamfer distance of two point sets on a `width × height` grid.
pub fn chamfer_points(a: &[(u32, u32)], b: &[(u32, u32)], width: u32, height: u32) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptyForeground("first"));
    }
    if b.is_empty() {
        return Err(Error::EmptyForeground("second"));
    }
    let (w, h) = (width as usize, height as usize);
    let dt_b = squared_distance_transform(w, h, b);
    let dt_a = squared_distance_transform(w, h, a);
    Ok(0.5 * (directed_mean(a, &dt_b, w) + directed_mean(b, &dt_a, w)))
}

pub fn chamfer(a: &RasterImage, b: &RasterImage, threshold: u8) -> Result<f64> {
    let (fa, fb) = foregrounds(a, b, threshold)?;
    chamfer_points(&fa, &fb, a.width, a.height)
}

/// Exhaustive O(|A|·|B|) nearest-neighbour scan.
pub fn chamfer_points_bruteforce(a: &[(u32, u32)], b: &[(u32, u32)]) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptyForeground("first"));
    }
    if b.is_empty() {
        return Err(Error::EmptyForeground("second"));
    }
    let nearest = |p: (u32, u32), set: &[(u32, u32)]| {
        set.iter()
            .map(|&q| {
                let dx = f64::from(p.0) - f64::from(q.0);
                let dy = f64::from(p.1) - f64::from(q.1);
                dx * dx + dy * dy
            })
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    };
    let ab: f64 = a.iter().map(|&p| nearest(p, b)).sum::<f64>() / a.len() as f64;
    let ba: f64 = b.iter().map(|&p| nearest(p, a)).sum::<f64>() / b.len() as f64;
    Ok(0.5 * (ab + ba))
}

pub fn chamfer_bruteforce(a: &RasterImage, b: &RasterImage, threshold: u8) -> Result<f64> {
    let (fa, fb) = foregrounds(a, b, threshold)?;
    chamfer_points_bruteforce(&fa, &fb)
}
