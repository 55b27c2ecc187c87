//! Random erasure for sketch-completion training: a missing arc of one
//! stroke, or a whole missing stroke.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::config::EraseParams;
use super::uniform;
use crate::seed::{self, Rng};
use crate::sketch::{Sketch, Stroke};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ErasePlan {
    WholeStroke {
        stroke: usize,
    },
    /// Remove arc-length fractions `[start, start + fraction]` of one stroke.
    Arc {
        stroke: usize,
        start: f64,
        fraction: f64,
    },
}

/// Sampled plan plus whether whole-stroke mode had to fall back to arc mode.
pub fn sample_erase(rng: &mut Rng, sketch: &Sketch, p: &EraseParams) -> (Option<ErasePlan>, bool) {
    let n = sketch.strokes.len();
    if n == 0 {
        return (None, false);
    }
    let whole = rng.random_bool(p.whole_stroke_prob);
    if whole && n > 1 {
        return (
            Some(ErasePlan::WholeStroke {
                stroke: rng.random_range(0..n),
            }),
            false,
        );
    }
    let fraction = uniform(rng, p.arc_fraction_range);
    let stroke = rng.random_range(0..n);
    let start = uniform(rng, [0.0, 1.0 - fraction]);
    (
        Some(ErasePlan::Arc {
            stroke,
            start,
            fraction,
        }),
        whole,
    )
}

/// Split a stroke around the removed arc; pieces of zero length are dropped.
fn cut_arc(stroke: &Stroke, start: f64, fraction: f64) -> Vec<Stroke> {
    let total = stroke.length();
    let cum = stroke.cumulative_lengths();
    let s0 = start * total;
    let s1 = ((start + fraction) * total).min(total);
    let mut pieces = Vec::with_capacity(2);

    if s0 > 0.0 {
        let mut head: Vec<_> = stroke
            .points
            .iter()
            .zip(&cum)
            .take_while(|(_, &s)| s < s0)
            .map(|(p, _)| *p)
            .collect();
        head.push(stroke.sample_at(&cum, s0).0);
        pieces.push(Stroke::new(head));
    }
    if s1 < total {
        let mut tail = vec![stroke.sample_at(&cum, s1).0];
        tail.extend(
            stroke
                .points
                .iter()
                .zip(&cum)
                .skip_while(|(_, &s)| s <= s1)
                .map(|(p, _)| *p),
        );
        pieces.push(Stroke::new(tail));
    }
    pieces.retain(|p| p.len() >= 2 && p.length() > 0.0);
    pieces
}

/// Apply an erase plan. Returns `None` when the plan would leave the sketch
/// without strokes (the caller keeps the input).
pub fn apply_erase(sketch: &Sketch, plan: &ErasePlan) -> Option<Sketch> {
    let mut strokes = sketch.strokes.clone();
    match *plan {
        ErasePlan::WholeStroke { stroke } => {
            if strokes.len() <= 1 || stroke >= strokes.len() {
                return None;
            }
            strokes.remove(stroke);
        }
        ErasePlan::Arc {
            stroke,
            start,
            fraction,
        } => {
            let target = strokes.get(stroke)?;
            if fraction <= 0.0 || target.length() <= 0.0 {
                return Some(sketch.clone());
            }
            let pieces = cut_arc(target, start, fraction);
            strokes.splice(stroke..=stroke, pieces);
        }
    }
    (!strokes.is_empty()).then(|| sketch.with_strokes(strokes))
}

pub fn random_erase(sketch: &Sketch, p: &EraseParams, seed: u64) -> Sketch {
    let (plan, _) = sample_erase(&mut seed::rng(seed), sketch, p);
    plan.and_then(|plan| apply_erase(sketch, &plan))
        .unwrap_or_else(|| sketch.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketch::{resample_arclength, Point};

    fn three() -> Sketch {
        let st = |y: f64| {
            resample_arclength(&Stroke::new(vec![Point::new(0.1, y), Point::new(0.9, y)]), 0.01).unwrap()
        };
        Sketch::new(vec![st(0.2), st(0.5), st(0.8)], "c", "0")
    }

    #[test]
    fn zero_fraction_is_identity() {
        let p = EraseParams {
            arc_fraction_range: [0.0, 0.0],
            whole_stroke_prob: 0.0,
        };
        let s = three();
        for seed in 0..20 {
            assert_eq!(random_erase(&s, &p, seed), s);
        }
    }

    #[test]
    fn whole_stroke_leaves_two_of_three() {
        let p = EraseParams {
            arc_fraction_range: [0.1, 0.3],
            whole_stroke_prob: 1.0,
        };
        for seed in 0..20 {
            assert_eq!(random_erase(&three(), &p, seed).strokes.len(), 2);
        }
    }

    #[test]
    fn single_stroke_falls_back_to_arc() {
        let s = Sketch::new(vec![three().strokes[0].clone()], "c", "0");
        let p = EraseParams {
            arc_fraction_range: [0.2, 0.2],
            whole_stroke_prob: 1.0,
        };
        let (plan, fell_back) = sample_erase(&mut seed::rng(3), &s, &p);
        assert!(fell_back);
        assert!(matches!(plan, Some(ErasePlan::Arc { .. })));
        let out = random_erase(&s, &p, 3);
        assert!((out.path_length() - 0.8 * 0.8).abs() < 1e-9);
    }

    #[test]
    fn arc_splits_into_at_most_two() {
        let s = three();
        let plan = ErasePlan::Arc {
            stroke: 1,
            start: 0.25,
            fraction: 0.5,
        };
        let out = apply_erase(&s, &plan).unwrap();
        assert_eq!(out.strokes.len(), 4);
        assert!((out.path_length() - (s.path_length() - 0.4)).abs() < 1e-12);
        let at_start = ErasePlan::Arc {
            stroke: 0,
            start: 0.0,
            fraction: 0.5,
        };
        assert_eq!(apply_erase(&s, &at_start).unwrap().strokes.len(), 3);
    }

    #[test]
    fn erasing_everything_is_refused() {
        let s = Sketch::new(vec![three().strokes[0].clone()], "c", "0");
        let plan = ErasePlan::Arc {
            stroke: 0,
            start: 0.0,
            fraction: 1.0,
        };
        assert!(apply_erase(&s, &plan).is_none());
    }
}
