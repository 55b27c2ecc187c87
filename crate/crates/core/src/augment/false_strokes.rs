//! Unintended strokes: joins between consecutive strokes and random lines.

use rand::Rng as _;

use super::config::FalseStrokeParams;
use super::uniform;
use crate::seed::{self, Rng};
use crate::sketch::{bounds, Point, Sketch, Stroke};

/// Straight two-point strokes from the end of each stroke to the start of the next.
pub fn transitional_strokes(sketch: &Sketch) -> Vec<Stroke> {
    sketch
        .strokes
        .windows(2)
        .filter_map(|w| {
            let a = *w[0].points.last()?;
            let b = *w[1].points.first()?;
            Some(Stroke::new(vec![a, b]))
        })
        .collect()
}

/// Endpoints of `1..=max_count` random lines inside the inflated bounding box.
pub fn sample_random_lines(rng: &mut Rng, sketch: &Sketch, p: &FalseStrokeParams) -> Vec<[Point; 2]> {
    let Ok((lo, hi)) = bounds(sketch) else {
        return Vec::new();
    };
    if p.random_count_max == 0 {
        return Vec::new();
    }
    let count = rng.random_range(1..=p.random_count_max);
    let grow_x = 0.5 * p.placement_inflate * (hi.x - lo.x);
    let grow_y = 0.5 * p.placement_inflate * (hi.y - lo.y);
    let xr = [(lo.x - grow_x).max(0.0), (hi.x + grow_x).min(1.0)];
    let yr = [(lo.y - grow_y).max(0.0), (hi.y + grow_y).min(1.0)];
    (0..count)
        .map(|_| {
            let a = Point::new(uniform(rng, xr), uniform(rng, yr));
            let b = Point::new(uniform(rng, xr), uniform(rng, yr));
            [a, b]
        })
        .collect()
}

pub fn line_strokes(lines: &[[Point; 2]]) -> Vec<Stroke> {
    lines
        .iter()
        .map(|[a, b]| Stroke::new(vec![a.clamp(), b.clamp()]))
        .collect()
}

/// Append false strokes in the mode selected by `p.transitional`.
pub fn add_false_strokes(sketch: &Sketch, p: &FalseStrokeParams, seed: u64) -> Sketch {
    let extra = if p.transitional {
        transitional_strokes(sketch)
    } else {
        line_strokes(&sample_random_lines(&mut seed::rng(seed), sketch, p))
    };
    let mut strokes = sketch.strokes.clone();
    strokes.extend(extra);
    sketch.with_strokes(strokes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stroke(pts: &[(f64, f64)]) -> Stroke {
        Stroke::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect())
    }

    #[test]
    fn transitional_adds_one_per_transition() {
        let s = Sketch::new(
            vec![
                stroke(&[(0.0, 0.0), (0.1, 0.1)]),
                stroke(&[(0.2, 0.2), (0.3, 0.2)]),
                stroke(&[(0.5, 0.5), (0.6, 0.6)]),
            ],
            "c",
            "0",
        );
        let out = add_false_strokes(&s, &FalseStrokeParams::default(), 0);
        assert_eq!(out.strokes.len(), 5);
        assert_eq!(out.strokes[3], stroke(&[(0.1, 0.1), (0.2, 0.2)]));
        assert_eq!(out.strokes[4], stroke(&[(0.3, 0.2), (0.5, 0.5)]));
    }

    #[test]
    fn single_stroke_transitional_is_identity() {
        let s = Sketch::new(vec![stroke(&[(0.0, 0.0), (0.1, 0.1)])], "c", "0");
        assert_eq!(add_false_strokes(&s, &FalseStrokeParams::default(), 0), s);
    }

    #[test]
    fn random_lines_stay_in_inflated_box() {
        let s = Sketch::new(vec![stroke(&[(0.2, 0.3), (0.6, 0.7)])], "c", "0");
        let p = FalseStrokeParams {
            transitional: false,
            random_count_max: 3,
            placement_inflate: 0.1,
        };
        for seed in 0..200 {
            let out = add_false_strokes(&s, &p, seed);
            let added = out.strokes.len() - 1;
            assert!((1..=3).contains(&added));
            for st in &out.strokes[1..] {
                for q in &st.points {
                    assert!(q.x >= 0.18 - 1e-12 && q.x <= 0.62 + 1e-12);
                    assert!(q.y >= 0.28 - 1e-12 && q.y <= 0.72 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_random_count_adds_nothing() {
        let s = Sketch::new(vec![stroke(&[(0.2, 0.3), (0.6, 0.7)])], "c", "0");
        let p = FalseStrokeParams {
            transitional: false,
            random_count_max: 0,
            placement_inflate: 0.1,
        };
        assert_eq!(add_false_strokes(&s, &p, 1), s);
    }
}
