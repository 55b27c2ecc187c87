//! Seeded fixtures shared by the acceptance suite: sketch-like corpora,
//! planted clusters and an adjusted Rand index.

use std::collections::HashMap;
use std::f64::consts::TAU;

use airsketch::sketch::normalize;
use airsketch::{seed, CanvasSpec, Point, Sketch, Stroke};
use rand::Rng;

pub const CATEGORIES: [&str; 6] = ["sun", "house", "face", "fish", "star", "snail"];

fn ellipse(rng: &mut seed::Rng, c: Point, r: f64) -> Stroke {
    let (rx, ry) = (r, r * rng.random_range(0.6..1.4));
    let n = rng.random_range(12..32);
    let start = rng.random_range(0.0..TAU);
    Stroke::new(
        (0..=n)
            .map(|i| {
                let a = start + TAU * i as f64 / n as f64;
                Point::new(c.x + rx * a.cos(), c.y + ry * a.sin())
            })
            .collect(),
    )
}

fn polygon(rng: &mut seed::Rng, c: Point, r: f64) -> Stroke {
    let n = rng.random_range(3..7);
    let rot = rng.random_range(0.0..TAU);
    Stroke::new(
        (0..=n)
            .map(|i| {
                let a = rot + TAU * i as f64 / n as f64;
                Point::new(c.x + r * a.cos(), c.y + r * a.sin())
            })
            .collect(),
    )
}

fn zigzag(rng: &mut seed::Rng, c: Point, r: f64) -> Stroke {
    let n = rng.random_range(2..7);
    Stroke::new(
        (0..=n)
            .map(|i| {
                let x = c.x - r + 2.0 * r * i as f64 / n as f64;
                let y = c.y + if i % 2 == 0 { -0.4 * r } else { 0.4 * r };
                Point::new(x, y)
            })
            .collect(),
    )
}

fn line(rng: &mut seed::Rng, c: Point, r: f64) -> Stroke {
    let a = rng.random_range(0.0..TAU);
    let (dx, dy) = (r * a.cos(), r * a.sin());
    Stroke::new(vec![Point::new(c.x - dx, c.y - dy), Point::new(c.x + dx, c.y + dy)])
}

/// A doodle of 1–5 primitives (ellipses, polygons, zigzags, lines), in the
/// style of hand-drawn sketches, normalized to the default canvas.
pub fn doodle(rng: &mut seed::Rng, id: usize) -> Sketch {
    let n = rng.random_range(1..=5);
    let strokes = (0..n)
        .map(|_| {
            let c = Point::new(rng.random_range(0.2..0.8), rng.random_range(0.2..0.8));
            let r = rng.random_range(0.05..0.3);
            match rng.random_range(0..4) {
                0 => ellipse(rng, c, r),
                1 => polygon(rng, c, r),
                2 => zigzag(rng, c, r),
                _ => line(rng, c, r),
            }
        })
        .collect();
    let category = CATEGORIES[id % CATEGORIES.len()];
    normalize(&Sketch::new(strokes, category, format!("doodle{id}")), &CanvasSpec::default())
}

pub fn doodles(seed: u64, n: usize) -> Vec<Sketch> {
    let mut rng = seed::stream(seed, "doodles");
    (0..n).map(|i| doodle(&mut rng, i)).collect()
}

/// Adjusted Rand index between two labelings.
pub fn ari(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let c2 = |x: f64| x * (x - 1.0) / 2.0;
    let mut table: HashMap<(usize, usize), f64> = HashMap::new();
    let mut ra: HashMap<usize, f64> = HashMap::new();
    let mut rb: HashMap<usize, f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1.0;
        *ra.entry(x).or_default() += 1.0;
        *rb.entry(y).or_default() += 1.0;
    }
    let index: f64 = table.values().map(|&v| c2(v)).sum();
    let sa: f64 = ra.values().map(|&v| c2(v)).sum();
    let sb: f64 = rb.values().map(|&v| c2(v)).sum();
    let expected = sa * sb / c2(a.len() as f64);
    let max = 0.5 * (sa + sb);
    if max == expected {
        return 1.0;
    }
    (index - expected) / (max - expected)
}

/// `k` well-separated blobs in `dim` dimensions with random centers;
/// returns points and true labels.
pub fn planted_clusters(seed: u64, k: usize, per: usize, dim: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rng = seed::stream(seed, "planted");
    let mut centers: Vec<Vec<f64>> = Vec::new();
    while centers.len() < k {
        let c: Vec<f64> = (0..dim).map(|_| rng.random_range(-100.0..100.0)).collect();
        let far = centers
            .iter()
            .all(|o| o.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() > 40.0);
        if far {
            centers.push(c);
        }
    }
    let mut pts = Vec::with_capacity(k * per);
    let mut labels = Vec::with_capacity(k * per);
    for (label, c) in centers.iter().enumerate() {
        for _ in 0..per {
            pts.push(c.iter().map(|&m| m + rng.random_range(-1.0..1.0)).collect());
            labels.push(label);
        }
    }
    (pts, labels)
}
