//! Local artifacts: wave distortion, spikes and jitter.

use std::f64::consts::TAU;

use rand::seq::index;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::config::{JitterParams, NormalDist, SpikeMode, SpikeParams, WaveParams};
use super::uniform;
use crate::seed::{self, Rng};
use crate::sketch::{Point, Stroke, DEFAULT_SPACING};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveComponent {
    pub amp: f64,
    /// Cycles per stroke.
    pub freq: f64,
    pub phase: f64,
}

pub fn sample_wave(rng: &mut Rng, p: &WaveParams) -> Vec<WaveComponent> {
    let n = rng.random_range(p.n_waves[0]..=p.n_waves[1]);
    (0..n)
        .map(|_| WaveComponent {
            amp: uniform(rng, p.amp_range),
            freq: uniform(rng, p.freq_range),
            phase: uniform(rng, p.phase_range),
        })
        .collect()
}

/// Offset every vertex along its normal by `Σ A sin(2π f t + φ)`, where `t`
/// is the vertex's normalized arc length.
pub fn apply_wave(stroke: &Stroke, waves: &[WaveComponent]) -> Stroke {
    let total = stroke.length();
    if total <= 0.0 || waves.is_empty() {
        return stroke.clone();
    }
    let cum = stroke.cumulative_lengths();
    let normals = stroke.vertex_normals();
    let points = stroke
        .points
        .iter()
        .zip(cum.iter().zip(&normals))
        .map(|(p, (&s, &(nx, ny)))| {
            let t = s / total;
            let d: f64 = waves
                .iter()
                .map(|w| w.amp * (TAU * w.freq * t + w.phase).sin())
                .sum();
            Point::clamped(p.x + d * nx, p.y + d * ny)
        })
        .collect();
    Stroke::new(points)
}

pub fn distort_stroke_wave(stroke: &Stroke, p: &WaveParams, seed: u64) -> Stroke {
    let mut rng = seed::rng(seed);
    apply_wave(stroke, &sample_wave(&mut rng, p))
}

/// One spike, positioned by the arc-length fraction of its center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpikePlan {
    pub center: f64,
    pub width: f64,
    /// Signed excursion along the local normal (sharp mode).
    pub height: f64,
    pub smooth: bool,
    /// Signed normal offsets of the two inner Bezier control points.
    pub offsets: [f64; 2],
}

fn abs_normal(rng: &mut Rng, d: NormalDist) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    (d.mean + d.std * z).abs()
}

/// Spikes for one stroke; `None` when the stroke is too short to host the
/// first sampled spike.
pub fn sample_spikes(rng: &mut Rng, stroke: &Stroke, p: &SpikeParams) -> Option<Vec<SpikePlan>> {
    let count = rng.random_range(0..=p.max_per_stroke);
    let length = stroke.length();
    let mut plans = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let width = abs_normal(rng, p.width);
        let height = abs_normal(rng, p.height);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let smooth = match p.mode {
            SpikeMode::Sharp => false,
            SpikeMode::Smooth => true,
            SpikeMode::Mixed => rng.random_bool(0.5),
        };
        let offsets = [
            sign * uniform(rng, p.bezier_offset_range),
            sign * uniform(rng, p.bezier_offset_range),
        ];
        if length <= width {
            return None;
        }
        let half = 0.5 * width / length;
        plans.push(SpikePlan {
            center: uniform(rng, [half, 1.0 - half]),
            width,
            height: sign * height,
            smooth,
            offsets,
        });
    }
    Some(plans)
}

/// Points strictly after `from` up to and including `to`, no gap above `spacing`.
fn push_segment(out: &mut Vec<Point>, from: Point, to: Point, spacing: f64) {
    let pieces = ((from.dist(to) / spacing) - 1e-9).ceil().max(1.0) as usize;
    for k in 1..pieces {
        out.push(from.lerp(to, k as f64 / pieces as f64));
    }
    out.push(to);
}

fn cubic(p: [Point; 4], t: f64) -> Point {
    let u = 1.0 - t;
    let (a, b, c, d) = (u * u * u, 3.0 * u * u * t, 3.0 * u * t * t, t * t * t);
    Point::new(
        a * p[0].x + b * p[1].x + c * p[2].x + d * p[3].x,
        a * p[0].y + b * p[1].y + c * p[2].y + d * p[3].y,
    )
}

/// Replace the stretch `[center ± width/2]` of the stroke with a spike.
pub fn apply_spike(stroke: &Stroke, plan: &SpikePlan, spacing: f64) -> Stroke {
    let total = stroke.length();
    if total <= 0.0 || stroke.len() < 2 {
        return stroke.clone();
    }
    let cum = stroke.cumulative_lengths();
    let c = plan.center.clamp(0.0, 1.0) * total;
    let s0 = (c - 0.5 * plan.width).max(0.0);
    let s1 = (c + 0.5 * plan.width).min(total);
    let (pc, (tx, ty)) = stroke.sample_at(&cum, c);
    let (nx, ny) = (-ty, tx);
    let p0 = stroke.sample_at(&cum, s0).0;
    let p1 = stroke.sample_at(&cum, s1).0;

    let mut out: Vec<Point> = stroke
        .points
        .iter()
        .zip(&cum)
        .take_while(|(_, &s)| s < s0)
        .map(|(p, _)| *p)
        .collect();
    out.push(p0);
    if plan.smooth {
        let ctrl = |s: f64, off: f64| {
            let q = stroke.sample_at(&cum, s).0;
            Point::new(q.x + off * nx, q.y + off * ny)
        };
        let w = s1 - s0;
        let hull = [p0, ctrl(s0 + w / 3.0, plan.offsets[0]), ctrl(s0 + 2.0 * w / 3.0, plan.offsets[1]), p1];
        // |B'(t)| <= 3 * longest control leg, so this many equal parameter
        // steps keep every chord within `spacing`
        let leg = hull.windows(2).map(|w| w[0].dist(w[1])).fold(0.0, f64::max);
        let pieces = ((3.0 * leg / spacing) - 1e-9).ceil().max(1.0) as usize;
        for k in 1..=pieces {
            out.push(cubic(hull, k as f64 / pieces as f64));
        }
    } else {
        let apex = Point::new(pc.x + plan.height * nx, pc.y + plan.height * ny);
        push_segment(&mut out, p0, apex, spacing);
        push_segment(&mut out, apex, p1, spacing);
    }
    out.extend(
        stroke
            .points
            .iter()
            .zip(&cum)
            .skip_while(|(_, &s)| s <= s1)
            .map(|(p, _)| *p),
    );
    Stroke::new(out.into_iter().map(Point::clamp).collect())
}

pub fn apply_spikes(stroke: &Stroke, plans: &[SpikePlan], spacing: f64) -> Stroke {
    plans
        .iter()
        .fold(stroke.clone(), |st, plan| apply_spike(&st, plan, spacing))
}

/// Seeded spikes on one stroke. A stroke shorter than a sampled spike is
/// returned unchanged.
pub fn add_spike(stroke: &Stroke, p: &SpikeParams, seed: u64) -> Stroke {
    let mut rng = seed::rng(seed);
    match sample_spikes(&mut rng, stroke, p) {
        Some(plans) => apply_spikes(stroke, &plans, DEFAULT_SPACING),
        None => stroke.clone(),
    }
}

/// Perturb `round(fraction · n)` distinct vertices by iid `N(0, σ²)` per axis.
pub fn jitter_stroke(stroke: &Stroke, sigma: f64, fraction: f64, rng: &mut Rng) -> Stroke {
    let n = stroke.len();
    let k = ((fraction * n as f64).round() as usize).min(n);
    let mut points = stroke.points.clone();
    if k == 0 || sigma == 0.0 {
        return stroke.clone();
    }
    for i in index::sample(rng, n, k) {
        let dx: f64 = rng.sample(StandardNormal);
        let dy: f64 = rng.sample(StandardNormal);
        let p = points[i];
        points[i] = Point::clamped(p.x + sigma * dx, p.y + sigma * dy);
    }
    Stroke::new(points)
}

pub fn add_jitter(stroke: &Stroke, p: &JitterParams, seed: u64) -> Stroke {
    let mut rng = seed::rng(seed);
    let fraction = uniform(&mut rng, p.vertex_fraction);
    jitter_stroke(stroke, p.sigma, fraction, &mut rng)
}
