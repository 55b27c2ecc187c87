//! Structural artifacts: whole-sketch distortion and relocation, per-stroke
//! misplacement and per-stroke resize.

use serde::{Deserialize, Serialize};

use super::config::StructParams;
use super::uniform;
use crate::error::{Error, Result};
use crate::seed::{self, Rng};
use crate::sketch::{bounds, Point, Sketch, Stroke};

/// Which structural sub-augmentations to run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StructFire {
    pub sketch_distort: bool,
    pub misplace: bool,
    pub resize: bool,
}

/// Scale about `from` by `(sx, sy)`, then move `from` to `to`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortPlan {
    pub sx: f64,
    pub sy: f64,
    pub from: Point,
    pub to: Point,
}

pub fn sample_distort(rng: &mut Rng, sketch: &Sketch, p: &StructParams) -> Option<DistortPlan> {
    let (lo, hi) = bounds(sketch).ok()?;
    let sx = uniform(rng, p.scale_range);
    let sy = uniform(rng, p.scale_range);
    let w = (hi.x - lo.x) * sx;
    let h = (hi.y - lo.y) * sy;
    let place = |rng: &mut Rng, extent: f64| {
        if extent < 1.0 {
            uniform(rng, [0.5 * extent, 1.0 - 0.5 * extent])
        } else {
            0.5
        }
    };
    let to = Point::new(place(rng, w), place(rng, h));
    Some(DistortPlan {
        sx,
        sy,
        from: Point::new(0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)),
        to,
    })
}

pub fn apply_distort(sketch: &Sketch, plan: &DistortPlan) -> Sketch {
    sketch.map_points(|p| {
        Point::new(
            plan.to.x + (p.x - plan.from.x) * plan.sx,
            plan.to.y + (p.y - plan.from.y) * plan.sy,
        )
    })
}

pub fn sample_misplace(rng: &mut Rng, sketch: &Sketch, p: &StructParams) -> Vec<[f64; 2]> {
    sketch
        .strokes
        .iter()
        .map(|_| {
            [
                uniform(rng, p.stroke_translate_range),
                uniform(rng, p.stroke_translate_range),
            ]
        })
        .collect()
}

pub fn apply_misplace(sketch: &Sketch, offsets: &[[f64; 2]]) -> Sketch {
    let strokes = sketch
        .strokes
        .iter()
        .zip(offsets)
        .map(|(s, &[dx, dy])| {
            Stroke::new(s.points.iter().map(|p| Point::clamped(p.x + dx, p.y + dy)).collect())
        })
        .collect();
    sketch.with_strokes(strokes)
}

pub fn sample_resize(rng: &mut Rng, sketch: &Sketch, p: &StructParams) -> Vec<f64> {
    sketch
        .strokes
        .iter()
        .map(|_| uniform(rng, p.stroke_scale_range))
        .collect()
}

pub fn apply_resize(sketch: &Sketch, factors: &[f64]) -> Sketch {
    let strokes = sketch
        .strokes
        .iter()
        .zip(factors)
        .map(|(s, &k)| {
            if k == 1.0 || s.is_empty() {
                return s.clone();
            }
            let c = s.centroid();
            Stroke::new(
                s.points
                    .iter()
                    .map(|p| Point::clamped(c.x + (p.x - c.x) * k, c.y + (p.y - c.y) * k))
                    .collect(),
            )
        })
        .collect();
    sketch.with_strokes(strokes)
}

/// Run the requested structural transforms in the order distort, misplace,
/// resize, each from its own stream of `seed`.
pub fn structural_transform(
    sketch: &Sketch,
    p: &StructParams,
    seed: u64,
    fire: StructFire,
) -> Result<Sketch> {
    if fire.misplace && fire.resize {
        return Err(Error::Exclusivity);
    }
    let mut out = sketch.clone();
    if fire.sketch_distort {
        if let Some(plan) = sample_distort(&mut seed::stream(seed, "sketch_distort"), &out, p) {
            out = apply_distort(&out, &plan);
        }
    }
    if fire.misplace {
        let offsets = sample_misplace(&mut seed::stream(seed, "misplace"), &out, p);
        out = apply_misplace(&out, &offsets);
    }
    if fire.resize {
        let factors = sample_resize(&mut seed::stream(seed, "resize"), &out, p);
        out = apply_resize(&out, &factors);
    }
    Ok(out)
}
