//! Implementations checked against independent reference computations.

mod common;

use rand::Rng;

use airsketch::augment::erase::{apply_erase, ErasePlan};
use airsketch::augment::local::{apply_spike, jitter_stroke, SpikePlan};
use airsketch::augment::structural::{apply_misplace, sample_misplace};
use airsketch::augment::{self, AugmentConfig, Probabilities, StructParams};
use airsketch::dataset::{holdout_kmeans, kmeans, CategoryStats};
use airsketch::metrics::{chamfer, chamfer_bruteforce, chamfer_points, ssim, SsimParams};
use airsketch::raster::{render, RasterImage, RenderSpec};
use airsketch::sketch::{resample_arclength, DEFAULT_SPACING};
use airsketch::tracking::{synthesize_recording, to_sketch, PenHeuristic};
use airsketch::{seed, CanvasSpec, Point, Sketch, Stroke};

use common::{ari, planted_clusters, random_sketch};

fn random_image(rng: &mut seed::Rng, w: u32, h: u32, density: f64) -> RasterImage {
    let px = (0..w * h)
        .map(|_| if rng.random::<f64>() < density { 0 } else { 255 })
        .collect();
    RasterImage::from_pixels(w, h, px).unwrap()
}

#[test]
fn chamfer_matches_bruteforce_on_random_images() {
    let mut rng = seed::rng(11);
    for i in 0..100 {
        let w = rng.random_range(1..=48);
        let h = rng.random_range(1..=48);
        let density = [0.01, 0.05, 0.2][i % 3];
        let mut a = random_image(&mut rng, w, h, density);
        let b = random_image(&mut rng, w, h, density);
        a.set(0, 0, 0);
        let mut b = b;
        b.set(w - 1, h - 1, 0);
        let fast = chamfer(&a, &b, 128).unwrap();
        let slow = chamfer_bruteforce(&a, &b, 128).unwrap();
        assert!((fast - slow).abs() < 1e-9, "{w}x{h}: {fast} vs {slow}");
    }
}

#[test]
fn chamfer_of_shifted_point_sets() {
    // every point of B is one pixel right of a point of A and vice versa,
    // except the extreme columns
    let a: Vec<(u32, u32)> = (0..10).map(|x| (x, 3)).collect();
    let b: Vec<(u32, u32)> = (1..11).map(|x| (x, 3)).collect();
    // A→B: x=0 is 1 away, others 0; B→A: x=10 is 1 away
    let expected = 0.5 * (0.1 + 0.1);
    assert!((chamfer_points(&a, &b, 12, 5).unwrap() - expected).abs() < 1e-12);
}

/// Per-pixel Gaussian-window SSIM without separability or running sums.
fn ssim_naive(a: &RasterImage, b: &RasterImage, p: &SsimParams) -> f64 {
    let r = p.window / 2;
    let mut g = vec![vec![0.0; p.window]; p.window];
    let mut total = 0.0;
    for (i, row) in g.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let (di, dj) = (i as f64 - r as f64, j as f64 - r as f64);
            *v = (-(di * di + dj * dj) / (2.0 * p.sigma * p.sigma)).exp();
            total += *v;
        }
    }
    let (c1, c2) = (p.c1(), p.c2());
    let mut sum = 0.0;
    let mut count = 0.0;
    for y in 0..=(a.height as usize - p.window) {
        for x in 0..=(a.width as usize - p.window) {
            let (mut ma, mut mb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for i in 0..p.window {
                for j in 0..p.window {
                    let w = g[i][j] / total;
                    let va = a.get((x + j) as u32, (y + i) as u32) as f64;
                    let vb = b.get((x + j) as u32, (y + i) as u32) as f64;
                    ma += w * va;
                    mb += w * vb;
                    saa += w * va * va;
                    sbb += w * vb * vb;
                    sab += w * va * vb;
                }
            }
            let (va, vb, cov) = (saa - ma * ma, sbb - mb * mb, sab - ma * mb);
            sum += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            count += 1.0;
        }
    }
    sum / count
}

#[test]
fn ssim_matches_naive_window() {
    let mut rng = seed::rng(5);
    let p = SsimParams::default();
    for _ in 0..20 {
        let (w, h) = (rng.random_range(11..30), rng.random_range(11..30));
        let a = RasterImage::from_pixels(w, h, (0..w * h).map(|_| rng.random()).collect()).unwrap();
        let b = RasterImage::from_pixels(w, h, (0..w * h).map(|_| rng.random()).collect()).unwrap();
        let fast = ssim(&a, &b, &p).unwrap();
        let slow = ssim_naive(&a, &b, &p);
        assert!((fast - slow).abs() < 1e-9, "{fast} vs {slow}");
    }
}

#[test]
fn jitter_displacement_statistics() {
    let sigma = 0.003;
    let stroke = Stroke::new((0..100_000).map(|i| Point::new(0.5, 0.2 + 0.6 * i as f64 / 100_000.0)).collect());
    let mut rng = seed::rng(99);
    let out = jitter_stroke(&stroke, sigma, 1.0, &mut rng);
    let d: Vec<f64> = stroke
        .points
        .iter()
        .zip(&out.points)
        .flat_map(|(a, b)| [b.x - a.x, b.y - a.y])
        .collect();
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    let std = (d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / d.len() as f64).sqrt();
    assert!(mean.abs() < 1e-4, "mean {mean}");
    assert!((std / sigma - 1.0).abs() < 0.05, "std {std}");

    let half = jitter_stroke(&stroke, sigma, 0.3, &mut rng);
    let moved = stroke.points.iter().zip(&half.points).filter(|(a, b)| a != b).count();
    assert_eq!(moved, 30_000);
}

#[test]
fn smooth_spikes_leave_no_gaps() {
    let spacing = DEFAULT_SPACING;
    for s in 0..500u64 {
        let mut rng = seed::rng(s);
        let sk = random_sketch(&mut rng, 1, 6);
        let st = resample_arclength(&sk.strokes[0], spacing).unwrap();
        if st.length() < 0.1 {
            continue;
        }
        let width = rng.random_range(0.01..0.08);
        let half = 0.5 * width / st.length();
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let plan = SpikePlan {
            center: rng.random_range(half..1.0 - half),
            width,
            height: 0.0,
            smooth: true,
            offsets: [sign * rng.random_range(0.01..0.05), sign * rng.random_range(0.01..0.05)],
        };
        let out = apply_spike(&st, &plan, spacing);
        let worst = out.points.windows(2).map(|w| w[0].dist(w[1])).fold(0.0, f64::max);
        assert!(worst <= spacing + 1e-12, "seed {s}: gap {worst}");
        assert_eq!(out.points[0], st.points[0]);
        assert_eq!(out.points.last(), st.points.last());
    }
}

#[test]
fn misplacement_shifts_each_stroke_centroid_by_its_offset() {
    let p = StructParams::default();
    for s in 0..500u64 {
        let mut rng = seed::rng(s);
        let sk = random_sketch(&mut rng, 4, 8);
        let offsets = sample_misplace(&mut rng, &sk, &p);
        let out = apply_misplace(&sk, &offsets);
        for ((a, b), o) in sk.strokes.iter().zip(&out.strokes).zip(&offsets) {
            let (ca, cb) = (a.centroid(), b.centroid());
            assert!((o[0]).abs() <= p.stroke_translate_range[1] + 1e-12);
            // clamping can only pull points back toward the canvas
            let clamped = b.points.iter().zip(&a.points).any(|(q, r)| {
                (r.x + o[0] - q.x).abs() > 1e-12 || (r.y + o[1] - q.y).abs() > 1e-12
            });
            if !clamped {
                assert!((cb.x - ca.x - o[0]).abs() < 1e-12 && (cb.y - ca.y - o[1]).abs() < 1e-12, "seed {s}");
            }
        }
    }
}

#[test]
fn arc_erase_removes_requested_length() {
    let spacing = DEFAULT_SPACING;
    for s in 0..200u64 {
        let mut rng = seed::rng(s);
        let mut sk = random_sketch(&mut rng, 3, 6);
        sk.strokes = sk.strokes.iter().map(|st| resample_arclength(st, spacing).unwrap()).collect();
        let stroke = rng.random_range(0..sk.strokes.len());
        let fraction = rng.random_range(0.1..0.3);
        let start = rng.random_range(0.0..1.0 - fraction);
        let before = sk.strokes[stroke].length();
        let Some(out) = apply_erase(&sk, &ErasePlan::Arc { stroke, start, fraction }) else {
            continue;
        };
        let others: f64 = sk.strokes.iter().enumerate().filter(|(i, _)| *i != stroke).map(|(_, st)| st.length()).sum();
        let remaining = out.path_length() - others;
        assert!(
            (remaining - (1.0 - fraction) * before).abs() < 1e-9,
            "seed {s}: {remaining} vs {}",
            (1.0 - fraction) * before
        );
    }
}

#[test]
fn kmeans_recovers_planted_clusters() {
    for s in 0..20u64 {
        let (pts, labels) = planted_clusters(s, 10, 8, 4);
        let fit = kmeans(&pts, 10, s, 100).unwrap();
        assert_eq!(ari(&fit.assignment, &labels), 1.0, "seed {s}");
    }
}

#[test]
fn ari_oracle_sanity() {
    assert_eq!(ari(&[0, 0, 1, 1], &[1, 1, 0, 0]), 1.0);
    assert!(ari(&[0, 0, 1, 1], &[0, 1, 0, 1]) < 0.0);
}

#[test]
fn holdout_picks_one_member_per_cluster() {
    let (pts, labels) = planted_clusters(3, 10, 5, 4);
    let stats: Vec<CategoryStats> = pts
        .iter()
        .enumerate()
        .map(|(i, p)| CategoryStats {
            category: format!("cat{i:02}"),
            clip_i2t_gt: Some(p[0]),
            clip_i2i_gt_tracking: Some(p[1]),
            cd_gt_tracking: Some(p[2]),
            ssim_gt_tracking: Some(p[3]),
        })
        .collect();
    let split = holdout_kmeans(&stats, 10, 42).unwrap();
    assert_eq!(split.held_out.len(), 10);
    let truth: Vec<usize> = split.held_out.iter().map(|c| labels[c[3..].parse::<usize>().unwrap()]).collect();
    let mut distinct = truth.clone();
    distinct.sort();
    distinct.dedup();
    assert_eq!(distinct.len(), 10);
    assert_eq!(split.training.len(), 40);
}

#[test]
fn tracking_inversion_round_trips() {
    let spec = RenderSpec::default();
    for s in 0..10u64 {
        let mut rng = seed::rng(s);
        let sk = random_sketch(&mut rng, 4, 10);
        let dense = sk.with_strokes(sk.strokes.iter().map(|st| resample_arclength(st, 0.005).unwrap()).collect());
        let rec = synthesize_recording(&dense, 30.0, 3);
        let back = to_sketch(&rec, &PenHeuristic::default(), &CanvasSpec::default(), "thing", "r").unwrap();
        assert_eq!(back.strokes.len(), sk.strokes.len());
        let cd = chamfer(&render(&sk, &spec), &render(&back, &spec), 128).unwrap();
        assert!(cd < 2.0, "seed {s}: {cd}");
    }
}

#[test]
fn identity_config_keeps_geometry() {
    let mut rng = seed::rng(8);
    let sk = random_sketch(&mut rng, 5, 9);
    let cfg = AugmentConfig {
        probabilities: Probabilities::all(0.0),
        ..AugmentConfig::default()
    };
    for s in 0..50 {
        let (out, report) = augment::apply(&sk, &cfg, s).unwrap();
        assert!(report.steps.is_empty());
        assert_eq!(out.strokes.len(), sk.strokes.len());
        for (a, b) in out.points().zip(sk.points()) {
            assert!(a.dist(*b) <= 1e-12);
        }
    }
}

#[test]
fn erase_never_empties_a_single_stroke_sketch() {
    let sk = Sketch::new(vec![Stroke::new(vec![Point::new(0.1, 0.1), Point::new(0.9, 0.9)])], "t", "t");
    assert!(apply_erase(&sk, &ErasePlan::WholeStroke { stroke: 0 }).is_none());
}
