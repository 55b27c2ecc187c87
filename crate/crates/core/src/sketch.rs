//! Vector sketch model, Quick, Draw! simplified-format I/O, normalization and
//! arc-length resampling.
//!
//! Coordinates are absolute and live in the unit canvas `[0, 1]²` with +y
//! pointing down, the same orientation as the Quick, Draw! 256×256 grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Resampling spacing applied before local augmentation.
pub const DEFAULT_SPACING: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Point with both coordinates clamped into the unit canvas.
    pub fn clamped(x: f64, y: f64) -> Self {
        Point {
            x: x.clamp(0.0, 1.0),
            y: y.clamp(0.0, 1.0),
        }
    }

    pub fn clamp(self) -> Self {
        Point::clamped(self.x, self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Stroke {
    pub points: Vec<Point>,
}

impl Stroke {
    pub fn new(points: Vec<Point>) -> Self {
        Stroke { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total polyline length.
    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].dist(w[1])).sum()
    }

    /// Cumulative arc length at every vertex; first entry is 0.
    pub fn cumulative_lengths(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.points.len());
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                acc += self.points[i - 1].dist(*p);
            }
            out.push(acc);
        }
        out
    }

    /// Position and unit tangent at arc length `s` (clamped to the stroke).
    ///
    /// `cum` must come from [`Stroke::cumulative_lengths`] of this stroke.
    pub fn sample_at(&self, cum: &[f64], s: f64) -> (Point, (f64, f64)) {
        let n = self.points.len();
        if n == 1 {
            return (self.points[0], (1.0, 0.0));
        }
        let total = cum[n - 1];
        let s = s.clamp(0.0, total);
        // first segment whose end reaches s
        let seg = match cum[1..].iter().position(|&c| c >= s) {
            Some(i) => i,
            None => n - 2,
        };
        let (a, b) = (self.points[seg], self.points[seg + 1]);
        let seg_len = cum[seg + 1] - cum[seg];
        let t = if seg_len > 0.0 {
            ((s - cum[seg]) / seg_len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        (a.lerp(b, t), self.tangent_of_segment(seg))
    }

    fn tangent_of_segment(&self, seg: usize) -> (f64, f64) {
        let (a, b) = (self.points[seg], self.points[seg + 1]);
        unit(b.x - a.x, b.y - a.y).unwrap_or_else(|| self.fallback_tangent())
    }

    fn fallback_tangent(&self) -> (f64, f64) {
        let (first, last) = (self.points[0], self.points[self.points.len() - 1]);
        unit(last.x - first.x, last.y - first.y).unwrap_or((1.0, 0.0))
    }

    /// Unit normal `(-ty, tx)` at each vertex, from the central difference of
    /// its neighbours (one-sided at the ends).
    pub fn vertex_normals(&self) -> Vec<(f64, f64)> {
        let n = self.points.len();
        (0..n)
            .map(|i| {
                let prev = self.points[i.saturating_sub(1)];
                let next = self.points[(i + 1).min(n - 1)];
                let (tx, ty) =
                    unit(next.x - prev.x, next.y - prev.y).unwrap_or_else(|| {
                        if n > 1 {
                            self.fallback_tangent()
                        } else {
                            (1.0, 0.0)
                        }
                    });
                (-ty, tx)
            })
            .collect()
    }

    pub fn centroid(&self) -> Point {
        let n = self.points.len() as f64;
        let (sx, sy) = self
            .points
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        Point::new(sx / n, sy / n)
    }
}

pub(crate) fn unit(dx: f64, dy: f64) -> Option<(f64, f64)> {
    let len = dx.hypot(dy);
    (len > 0.0 && len.is_finite()).then(|| (dx / len, dy / len))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sketch {
    pub strokes: Vec<Stroke>,
    pub category: String,
    pub source_id: String,
}

impl Sketch {
    pub fn new(strokes: Vec<Stroke>, category: impl Into<String>, source_id: impl Into<String>) -> Self {
        Sketch {
            strokes,
            category: category.into(),
            source_id: source_id.into(),
        }
    }

    /// Same metadata, different geometry.
    pub fn with_strokes(&self, strokes: Vec<Stroke>) -> Sketch {
        Sketch {
            strokes,
            category: self.category.clone(),
            source_id: self.source_id.clone(),
        }
    }

    pub fn points(&self) -> impl Iterator<Item = &Point> {
        self.strokes.iter().flat_map(|s| s.points.iter())
    }

    pub fn point_count(&self) -> usize {
        self.strokes.iter().map(Stroke::len).sum()
    }

    pub fn path_length(&self) -> f64 {
        self.strokes.iter().map(Stroke::length).sum()
    }

    /// Apply `f` to every point, clamping the result into the canvas.
    pub fn map_points(&self, mut f: impl FnMut(Point) -> Point) -> Sketch {
        self.with_strokes(
            self.strokes
                .iter()
                .map(|s| Stroke::new(s.points.iter().map(|&p| f(p).clamp()).collect()))
                .collect(),
        )
    }
}

/// Margin around the normalized drawing, in canvas units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CanvasSpec {
    pub margin: f64,
}

impl Default for CanvasSpec {
    fn default() -> Self {
        CanvasSpec { margin: 0.05 }
    }
}

impl CanvasSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..0.5).contains(&self.margin) {
            return Err(Error::Config(format!(
                "canvas margin {} must be in [0, 0.5)",
                self.margin
            )));
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct QuickDrawRecord {
    word: String,
    drawing: Vec<(Vec<f64>, Vec<f64>)>,
    #[serde(default)]
    key_id: Option<serde_json::Value>,
}

#[derive(Serialize)]
struct QuickDrawOut<'a> {
    word: &'a str,
    key_id: &'a str,
    drawing: Vec<(Vec<i64>, Vec<i64>)>,
}

/// Parse one record of the Quick, Draw! simplified NDJSON schema.
///
/// `line` is the 1-based line number used for error context and as the
/// fallback `source_id` when the record carries no `key_id`.
pub fn parse_quickdraw_line(text: &str, line: usize) -> Result<Sketch> {
    let record: QuickDrawRecord = serde_json::from_str(text).map_err(|e| Error::Parse {
        line,
        message: e.to_string(),
    })?;
    if record.drawing.is_empty() {
        return Err(Error::EmptySketch);
    }
    let mut strokes = Vec::with_capacity(record.drawing.len());
    for (xs, ys) in &record.drawing {
        if xs.len() != ys.len() {
            return Err(Error::Parse {
                line,
                message: format!("stroke has {} xs but {} ys", xs.len(), ys.len()),
            });
        }
        if xs.is_empty() {
            return Err(Error::Parse {
                line,
                message: "stroke has no points".into(),
            });
        }
        let mut points = Vec::with_capacity(xs.len());
        for (&x, &y) in xs.iter().zip(ys) {
            for v in [x, y] {
                if !(0.0..=255.0).contains(&v) {
                    return Err(Error::Range { line, value: v });
                }
                if v.fract() != 0.0 {
                    return Err(Error::Parse {
                        line,
                        message: format!("coordinate {v} is not an integer"),
                    });
                }
            }
            points.push(Point::new(x / 255.0, y / 255.0));
        }
        strokes.push(Stroke::new(points));
    }
    let source_id = match record.key_id {
        Some(serde_json::Value::String(s)) => s,
        Some(serde_json::Value::Number(n)) => n.to_string(),
        _ => format!("line-{line}"),
    };
    Ok(Sketch::new(strokes, record.word, source_id))
}

/// Serialize to the simplified NDJSON schema, re-quantizing to 0..=255.
pub fn to_quickdraw_line(sketch: &Sketch) -> String {
    let q = |v: f64| (v.clamp(0.0, 1.0) * 255.0).round() as i64;
    let out = QuickDrawOut {
        word: &sketch.category,
        key_id: &sketch.source_id,
        drawing: sketch
            .strokes
            .iter()
            .map(|s| {
                (
                    s.points.iter().map(|p| q(p.x)).collect(),
                    s.points.iter().map(|p| q(p.y)).collect(),
                )
            })
            .collect(),
    };
    serde_json::to_string(&out).expect("quickdraw record serializes")
}

/// Parse a whole NDJSON document, skipping blank lines.
pub fn parse_quickdraw(text: &str) -> Result<Vec<Sketch>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_quickdraw_line(l, i + 1))
        .collect()
}

/// Axis-aligned bounding box of all points.
pub fn bounds(sketch: &Sketch) -> Result<(Point, Point)> {
    let mut it = sketch.points();
    let first = *it.next().ok_or(Error::EmptySketch)?;
    Ok(it.fold((first, first), |(lo, hi), p| {
        (
            Point::new(lo.x.min(p.x), lo.y.min(p.y)),
            Point::new(hi.x.max(p.x), hi.y.max(p.y)),
        )
    }))
}

/// Fit the sketch into `[margin, 1 - margin]²`, aspect preserved and
/// centered. A sketch whose points all coincide is only re-centered.
pub fn normalize(sketch: &Sketch, spec: &CanvasSpec) -> Sketch {
    let Ok((lo, hi)) = bounds(sketch) else {
        return sketch.clone();
    };
    let extent = (hi.x - lo.x).max(hi.y - lo.y);
    let scale = if extent > 0.0 {
        (1.0 - 2.0 * spec.margin) / extent
    } else {
        1.0
    };
    let cx = 0.5 * (lo.x + hi.x);
    let cy = 0.5 * (lo.y + hi.y);
    sketch.map_points(|p| Point::new(0.5 + (p.x - cx) * scale, 0.5 + (p.y - cy) * scale))
}

/// Subdivide every segment into equal pieces no longer than `spacing`.
///
/// Original vertices are kept, so the path (and its length) is unchanged;
/// zero-length segments are dropped.
pub fn resample_arclength(stroke: &Stroke, spacing: f64) -> Result<Stroke> {
    if !(spacing > 0.0) || !spacing.is_finite() {
        return Err(Error::Config(format!(
            "resample spacing must be positive, got {spacing}"
        )));
    }
    let mut out = Vec::with_capacity(stroke.len());
    let Some(&first) = stroke.points.first() else {
        return Ok(Stroke::default());
    };
    out.push(first);
    for w in stroke.points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = a.dist(b);
        if len == 0.0 {
            continue;
        }
        let pieces = ((len / spacing) - 1e-9).ceil().max(1.0) as usize;
        for k in 1..pieces {
            out.push(a.lerp(b, k as f64 / pieces as f64));
        }
        out.push(b);
    }
    Ok(Stroke::new(out))
}
