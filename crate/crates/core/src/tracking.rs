//! Hand-landmark recordings to tracking sketches.
//!
//! Recordings are JSONL. An optional first line carries metadata, every
//! other line is one frame:
//!
//! ```text
//! {"frame_rate": 30.0, "source": "real", "aspect": 1.7778}
//! {"t": 0.000, "hand": [[x, y], ... 21 pairs], "pen": true}
//! {"t": 0.033, "hand": null}
//! ```
//!
//! Landmarks follow the common 21-point hand topology (0 wrist, 6 index PIP,
//! 8 index tip) with coordinates normalized to the video frame. `aspect` is
//! frame width over height and restores square pixels before normalization.
//! `pen` is optional; without it the pen state comes from how far the index
//! finger is extended.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sketch::{normalize, CanvasSpec, Point, Sketch, Stroke};

pub const LANDMARKS: usize = 21;
pub const WRIST: usize = 0;
pub const INDEX_PIP: usize = 6;
pub const INDEX_TIP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Synthetic,
    #[default]
    Real,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkFrame {
    pub timestamp: f64,
    /// `None` when no hand was detected.
    pub landmarks: Option<Vec<(f64, f64)>>,
    pub pen_flag: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackRecording {
    pub frames: Vec<LandmarkFrame>,
    pub frame_rate: f64,
    pub source: Source,
    pub aspect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PenHeuristic {
    /// Pen is down when |wrist→tip| / |wrist→PIP| exceeds this.
    pub extension_ratio_threshold: f64,
}

impl Default for PenHeuristic {
    fn default() -> Self {
        PenHeuristic {
            extension_ratio_threshold: 1.3,
        }
    }
}

impl PenHeuristic {
    pub fn validate(&self) -> Result<()> {
        if !(self.extension_ratio_threshold > 1.0) || !self.extension_ratio_threshold.is_finite() {
            return Err(Error::Config(format!(
                "extension_ratio_threshold {} must be > 1",
                self.extension_ratio_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeaderLine {
    #[serde(default)]
    frame_rate: Option<f64>,
    #[serde(default)]
    source: Option<Source>,
    #[serde(default)]
    aspect: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameLine {
    t: f64,
    // required key; null marks a missing hand
    hand: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pen: Option<bool>,
}

fn format_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Format(format!("line {line}: {msg}"))
}

fn parse_frame(line: usize, text: &str) -> Result<LandmarkFrame> {
    let raw: FrameLine = serde_json::from_str(text).map_err(|e| Error::Parse {
        line,
        message: e.to_string(),
    })?;
    if !raw.t.is_finite() {
        return Err(format_err(line, "timestamp is not finite"));
    }
    let landmarks = match raw.hand {
        serde_json::Value::Null => None,
        v => {
            let pts: Vec<[f64; 2]> = serde_json::from_value(v).map_err(|e| Error::Parse {
                line,
                message: format!("hand: {e}"),
            })?;
            if pts.len() != LANDMARKS {
                return Err(format_err(
                    line,
                    format!("expected {LANDMARKS} landmarks, got {}", pts.len()),
                ));
            }
            if pts.iter().flatten().any(|v| !v.is_finite()) {
                return Err(format_err(line, "landmark coordinate is not finite"));
            }
            Some(pts.into_iter().map(|[x, y]| (x, y)).collect())
        }
    };
    Ok(LandmarkFrame {
        timestamp: raw.t,
        landmarks,
        pen_flag: raw.pen,
    })
}

/// Median inter-frame rate, or 30 Hz when there are fewer than two frames.
fn estimate_rate(frames: &[LandmarkFrame]) -> f64 {
    let mut dts: Vec<f64> = frames
        .windows(2)
        .map(|w| w[1].timestamp - w[0].timestamp)
        .collect();
    if dts.is_empty() {
        return 30.0;
    }
    dts.sort_by(f64::total_cmp);
    1.0 / dts[dts.len() / 2]
}

pub fn parse_landmarks(text: &str) -> Result<TrackRecording> {
    let mut header: Option<HeaderLine> = None;
    let mut frames: Vec<LandmarkFrame> = Vec::new();
    let mut seen_content = false;
    for (i, text) in text.lines().enumerate() {
        let line = i + 1;
        if text.trim().is_empty() {
            continue;
        }
        let first = !seen_content;
        seen_content = true;
        let is_frame = serde_json::from_str::<serde_json::Value>(text)
            .map(|v| v.get("t").is_some())
            .unwrap_or(true);
        if first && !is_frame {
            let h: HeaderLine = serde_json::from_str(text).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            header = Some(h);
            continue;
        }
        let frame = parse_frame(line, text)?;
        if let Some(prev) = frames.last() {
            if frame.timestamp <= prev.timestamp {
                return Err(format_err(
                    line,
                    format!(
                        "timestamp {} does not increase past {}",
                        frame.timestamp, prev.timestamp
                    ),
                ));
            }
        }
        frames.push(frame);
    }
    let header = header.unwrap_or(HeaderLine {
        frame_rate: None,
        source: None,
        aspect: None,
    });
    let frame_rate = header.frame_rate.unwrap_or_else(|| estimate_rate(&frames));
    let aspect = header.aspect.unwrap_or(1.0);
    if !(frame_rate > 0.0 && frame_rate.is_finite()) {
        return Err(Error::Format(format!("frame_rate {frame_rate} must be positive")));
    }
    if !(aspect > 0.0 && aspect.is_finite()) {
        return Err(Error::Format(format!("aspect {aspect} must be positive")));
    }
    Ok(TrackRecording {
        frames,
        frame_rate,
        source: header.source.unwrap_or_default(),
        aspect,
    })
}

/// Serialize with a metadata header; `parse_landmarks` inverts this.
pub fn to_jsonl(rec: &TrackRecording) -> String {
    let mut out = serde_json::to_string(&HeaderLine {
        frame_rate: Some(rec.frame_rate),
        source: Some(rec.source),
        aspect: Some(rec.aspect),
    })
    .expect("header serializes");
    out.push('\n');
    for f in &rec.frames {
        let hand = match &f.landmarks {
            None => serde_json::Value::Null,
            Some(pts) => serde_json::to_value(pts.iter().map(|&(x, y)| [x, y]).collect::<Vec<_>>())
                .expect("landmarks serialize"),
        };
        let line = FrameLine {
            t: f.timestamp,
            hand,
            pen: f.pen_flag,
        };
        out.push_str(&serde_json::to_string(&line).expect("frame serializes"));
        out.push('\n');
    }
    out
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Pen down? An explicit flag wins over the extension heuristic.
pub fn pen_state(frame: &LandmarkFrame, h: &PenHeuristic) -> Result<bool> {
    if let Some(flag) = frame.pen_flag {
        return Ok(flag);
    }
    let lm = frame
        .landmarks
        .as_ref()
        .ok_or_else(|| Error::DegenerateGeometry("no hand in frame".into()))?;
    let base = dist(lm[WRIST], lm[INDEX_PIP]);
    if base == 0.0 {
        return Err(Error::DegenerateGeometry(format!(
            "wrist and index PIP coincide at t={}",
            frame.timestamp
        )));
    }
    Ok(dist(lm[WRIST], lm[INDEX_TIP]) / base > h.extension_ratio_threshold)
}

/// Fingertip paths of the maximal pen-down runs, in frame order, with x
/// scaled by the recording's aspect ratio. No smoothing is applied.
pub fn pen_runs(rec: &TrackRecording, h: &PenHeuristic) -> Result<Vec<Stroke>> {
    let mut strokes = Vec::new();
    let mut current: Vec<Point> = Vec::new();
    for frame in &rec.frames {
        let down = match &frame.landmarks {
            Some(_) => pen_state(frame, h)?,
            None => false,
        };
        match (&frame.landmarks, down) {
            (Some(lm), true) => {
                let (x, y) = lm[INDEX_TIP];
                current.push(Point::new(x * rec.aspect, y));
            }
            _ => {
                if !current.is_empty() {
                    strokes.push(Stroke::new(std::mem::take(&mut current)));
                }
            }
        }
    }
    if !current.is_empty() {
        strokes.push(Stroke::new(current));
    }
    Ok(strokes)
}

pub fn to_sketch(
    rec: &TrackRecording,
    h: &PenHeuristic,
    canvas: &CanvasSpec,
    category: &str,
    source_id: &str,
) -> Result<Sketch> {
    h.validate()?;
    let strokes = pen_runs(rec, h)?;
    if strokes.is_empty() {
        return Err(Error::EmptySketch);
    }
    // fingertips may leave the frame; normalize fits the raw extent before clamping
    Ok(normalize(&Sketch::new(strokes, category, source_id), canvas))
}

/// Synthetic hand pose with the index tip at `tip`: extended (ratio 2) for
/// pen down, curled (ratio 1) for pen up.
pub fn synthetic_hand(tip: (f64, f64), extended: bool) -> Vec<(f64, f64)> {
    let wrist = (tip.0, tip.1 + 0.2);
    let pip = if extended {
        (tip.0, tip.1 + 0.1)
    } else {
        (tip.0 + 0.2, tip.1 + 0.2)
    };
    let mut lm = vec![wrist; LANDMARKS];
    lm[INDEX_PIP] = pip;
    lm[INDEX_TIP] = tip;
    lm[5] = ((wrist.0 + pip.0) / 2.0, (wrist.1 + pip.1) / 2.0);
    lm[7] = ((pip.0 + tip.0) / 2.0, (pip.1 + tip.1) / 2.0);
    lm
}

/// Recording of a perfect tracker following `sketch`: one pen-down frame
/// per vertex and `gap_frames` pen-up frames between strokes. No pen flags
/// are written, so pen state comes from hand geometry.
pub fn synthesize_recording(sketch: &Sketch, frame_rate: f64, gap_frames: usize) -> TrackRecording {
    let dt = 1.0 / frame_rate;
    let mut frames = Vec::new();
    let push = |tip: Point, down: bool, frames: &mut Vec<LandmarkFrame>| {
        frames.push(LandmarkFrame {
            timestamp: frames.len() as f64 * dt,
            landmarks: Some(synthetic_hand((tip.x, tip.y), down)),
            pen_flag: None,
        });
    };
    for (i, stroke) in sketch.strokes.iter().enumerate() {
        if i > 0 {
            let from = *sketch.strokes[i - 1].points.last().expect("non-empty stroke");
            let to = stroke.points[0];
            for k in 1..=gap_frames {
                push(from.lerp(to, k as f64 / (gap_frames + 1) as f64), false, &mut frames);
            }
        }
        for &p in &stroke.points {
            push(p, true, &mut frames);
        }
    }
    TrackRecording {
        frames,
        frame_rate,
        source: Source::Synthetic,
        aspect: 1.0,
    }
}
