#![allow(dead_code)]

use std::collections::HashMap;

use airsketch::sketch::normalize;
use airsketch::{seed, CanvasSpec, Point, Sketch, Stroke};
use rand::Rng;

/// Random polyline sketch, normalized to the default canvas.
pub fn random_sketch(rng: &mut seed::Rng, max_strokes: usize, max_points: usize) -> Sketch {
    let n = rng.random_range(1..=max_strokes);
    let strokes = (0..n)
        .map(|_| {
            let m = rng.random_range(2..=max_points);
            Stroke::new(
                (0..m)
                    .map(|_| Point::new(rng.random::<f64>(), rng.random::<f64>()))
                    .collect(),
            )
        })
        .collect();
    normalize(&Sketch::new(strokes, "thing", "r"), &CanvasSpec::default())
}

/// Adjusted Rand index between two labelings.
pub fn ari(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
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
    let expected = sa * sb / c2(n);
    let max = 0.5 * (sa + sb);
    if max == expected {
        return 1.0;
    }
    (index - expected) / (max - expected)
}

/// `k` tight blobs on a wide lattice in `dim` dimensions; returns points and
/// true labels.
pub fn planted_clusters(seed: u64, k: usize, per: usize, dim: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rng = seed::rng(seed);
    let mut pts = Vec::new();
    let mut labels = Vec::new();
    for c in 0..k {
        let center: Vec<f64> = (0..dim).map(|d| if d == 0 { 100.0 * c as f64 } else { 50.0 * ((c * (d + 3)) % 7) as f64 }).collect();
        for _ in 0..per {
            pts.push(center.iter().map(|&m| m + rng.random_range(-1.0..1.0)).collect());
            labels.push(c);
        }
    }
    (pts, labels)
}
