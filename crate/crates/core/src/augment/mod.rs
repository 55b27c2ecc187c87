//! Corruption of clean sketches into tracking-like sketches.
//!
//! [`apply`] decides which sub-augmentations fire, samples a concrete plan
//! for each one against the current geometry, executes it, and records the
//! plan in an [`AugmentReport`]. [`replay`] executes a recorded report and
//! reproduces the output bit for bit.
//!
//! Execution order is fixed: sketch distortion, misplacement or resize,
//! erasure, resampling, wave, spikes, jitter, transitional false strokes,
//! random false strokes.

pub mod config;
pub mod erase;
pub mod false_strokes;
pub mod local;
pub mod structural;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

pub use config::{
    AugmentConfig, EraseParams, FalseStrokeParams, Interval, JitterParams, NormalDist,
    Probabilities, SpikeMode, SpikeParams, StructParams, WaveParams,
};
pub use erase::{random_erase, ErasePlan};
pub use false_strokes::add_false_strokes;
pub use local::{add_jitter, add_spike, distort_stroke_wave, SpikePlan, WaveComponent};
pub use structural::{structural_transform, DistortPlan, StructFire};

use crate::error::Result;
use crate::seed::{self, Rng};
use crate::sketch::{resample_arclength, Point, Sketch, Stroke};

pub(crate) fn uniform(rng: &mut Rng, [lo, hi]: Interval) -> f64 {
    if lo >= hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubAugmentation {
    SketchDistort,
    Misplace,
    Resize,
    Erase,
    Wave,
    Spike,
    Jitter,
    Transitional,
    RandomFalse,
}

/// One executed sub-augmentation with everything needed to redo it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    SketchDistort { plan: DistortPlan },
    Misplace { offsets: Vec<[f64; 2]> },
    Resize { factors: Vec<f64> },
    Erase { plan: ErasePlan },
    Resample { spacing: f64 },
    Wave { strokes: Vec<Vec<WaveComponent>> },
    Spike { spacing: f64, strokes: Vec<Vec<SpikePlan>> },
    Jitter { seed: u64, sigma: f64, fraction: f64 },
    Transitional,
    RandomFalse { lines: Vec<[Point; 2]> },
}

impl Step {
    pub fn sub_augmentation(&self) -> Option<SubAugmentation> {
        Some(match self {
            Step::SketchDistort { .. } => SubAugmentation::SketchDistort,
            Step::Misplace { .. } => SubAugmentation::Misplace,
            Step::Resize { .. } => SubAugmentation::Resize,
            Step::Erase { .. } => SubAugmentation::Erase,
            Step::Resample { .. } => return None,
            Step::Wave { .. } => SubAugmentation::Wave,
            Step::Spike { .. } => SubAugmentation::Spike,
            Step::Jitter { .. } => SubAugmentation::Jitter,
            Step::Transitional => SubAugmentation::Transitional,
            Step::RandomFalse { .. } => SubAugmentation::RandomFalse,
        })
    }

    /// Execute this step. Steps are pure functions of their recorded fields.
    pub fn execute(&self, sketch: &Sketch) -> Sketch {
        match self {
            Step::SketchDistort { plan } => structural::apply_distort(sketch, plan),
            Step::Misplace { offsets } => structural::apply_misplace(sketch, offsets),
            Step::Resize { factors } => structural::apply_resize(sketch, factors),
            Step::Erase { plan } => {
                erase::apply_erase(sketch, plan).unwrap_or_else(|| sketch.clone())
            }
            Step::Resample { spacing } => sketch.with_strokes(
                sketch
                    .strokes
                    .iter()
                    .map(|s| resample_arclength(s, *spacing).expect("spacing validated"))
                    .collect(),
            ),
            Step::Wave { strokes } => sketch.with_strokes(
                sketch
                    .strokes
                    .iter()
                    .zip(strokes)
                    .map(|(s, w)| local::apply_wave(s, w))
                    .collect(),
            ),
            Step::Spike { spacing, strokes } => sketch.with_strokes(
                sketch
                    .strokes
                    .iter()
                    .zip(strokes)
                    .map(|(s, plans)| local::apply_spikes(s, plans, *spacing))
                    .collect(),
            ),
            Step::Jitter {
                seed,
                sigma,
                fraction,
            } => {
                let mut rng = seed::rng(*seed);
                sketch.with_strokes(
                    sketch
                        .strokes
                        .iter()
                        .map(|s| local::jitter_stroke(s, *sigma, *fraction, &mut rng))
                        .collect(),
                )
            }
            Step::Transitional => append(sketch, false_strokes::transitional_strokes(sketch)),
            Step::RandomFalse { lines } => append(sketch, false_strokes::line_strokes(lines)),
        }
    }
}

fn append(sketch: &Sketch, extra: Vec<Stroke>) -> Sketch {
    let mut strokes = sketch.strokes.clone();
    strokes.extend(extra);
    sketch.with_strokes(strokes)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AugmentReport {
    pub seed: u64,
    pub steps: Vec<Step>,
    /// Indices of appended false strokes in the output sketch.
    pub false_strokes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl AugmentReport {
    pub fn fired(&self) -> Vec<SubAugmentation> {
        self.steps.iter().filter_map(Step::sub_augmentation).collect()
    }

    pub fn has(&self, which: SubAugmentation) -> bool {
        self.fired().contains(&which)
    }
}

/// Which sub-augmentations fire for this sample.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FireSet {
    pub sketch_distort: bool,
    pub misplace: bool,
    pub resize: bool,
    pub erase: bool,
    pub wave: bool,
    pub spike: bool,
    pub jitter: bool,
    pub transitional: bool,
    pub random_false: bool,
}

impl FireSet {
    /// Independent draws per sub-augmentation; a fair coin keeps one of
    /// misplace and resize when both are drawn.
    pub fn draw(cfg: &AugmentConfig, seed: u64) -> FireSet {
        let mut rng = seed::stream(seed, "fire");
        let p = &cfg.probabilities;
        let mut roll = |prob: f64| rng.random::<f64>() < prob;
        let mut fire = FireSet {
            sketch_distort: roll(p.sketch_distort),
            misplace: roll(p.misplace),
            resize: roll(p.resize),
            erase: roll(p.erase) && cfg.erase_enabled,
            wave: roll(p.wave),
            spike: roll(p.spike),
            jitter: roll(p.jitter),
            transitional: roll(p.transitional),
            random_false: roll(p.random_false),
        };
        if fire.misplace && fire.resize {
            if rng.random_bool(0.5) {
                fire.resize = false;
            } else {
                fire.misplace = false;
            }
        }
        fire
    }
}

/// Corrupt a normalized sketch. Identical inputs give bit-identical outputs.
pub fn apply(sketch: &Sketch, cfg: &AugmentConfig, seed: u64) -> Result<(Sketch, AugmentReport)> {
    cfg.validate()?;
    let fire = FireSet::draw(cfg, seed);
    apply_fired(sketch, cfg, seed, fire)
}

/// Like [`apply`] with an explicit fire set. Misplace and resize together
/// are rejected.
pub fn apply_fired(
    sketch: &Sketch,
    cfg: &AugmentConfig,
    seed: u64,
    fire: FireSet,
) -> Result<(Sketch, AugmentReport)> {
    cfg.validate()?;
    if fire.misplace && fire.resize {
        return Err(crate::error::Error::Exclusivity);
    }
    let mut report = AugmentReport {
        seed,
        ..AugmentReport::default()
    };
    let mut cur = sketch.clone();
    let run = |step: Step, cur: &mut Sketch, report: &mut AugmentReport| {
        *cur = step.execute(cur);
        report.steps.push(step);
    };

    if fire.sketch_distort {
        if let Some(plan) = structural::sample_distort(&mut seed::stream(seed, "sketch_distort"), &cur, &cfg.structural) {
            run(Step::SketchDistort { plan }, &mut cur, &mut report);
        }
    }
    if fire.misplace {
        let offsets = structural::sample_misplace(&mut seed::stream(seed, "misplace"), &cur, &cfg.structural);
        run(Step::Misplace { offsets }, &mut cur, &mut report);
    }
    if fire.resize {
        let factors = structural::sample_resize(&mut seed::stream(seed, "resize"), &cur, &cfg.structural);
        run(Step::Resize { factors }, &mut cur, &mut report);
    }
    if fire.erase {
        let (plan, fell_back) = erase::sample_erase(&mut seed::stream(seed, "erase"), &cur, &cfg.erase);
        if fell_back {
            report.notes.push("erase: single stroke, whole-stroke mode fell back to arc".into());
        }
        if let Some(plan) = plan {
            if erase::apply_erase(&cur, &plan).is_none() {
                report.notes.push("erase: plan would remove every stroke, skipped".into());
            }
            run(Step::Erase { plan }, &mut cur, &mut report);
        }
    }
    if fire.wave || fire.spike || fire.jitter {
        run(
            Step::Resample {
                spacing: cfg.resample_spacing,
            },
            &mut cur,
            &mut report,
        );
    }
    if fire.wave {
        let mut rng = seed::stream(seed, "wave");
        let strokes = cur
            .strokes
            .iter()
            .map(|_| local::sample_wave(&mut rng, &cfg.wave))
            .collect();
        run(Step::Wave { strokes }, &mut cur, &mut report);
    }
    if fire.spike {
        let mut rng = seed::stream(seed, "spike");
        let mut strokes = Vec::with_capacity(cur.strokes.len());
        for (i, st) in cur.strokes.iter().enumerate() {
            match local::sample_spikes(&mut rng, st, &cfg.spike) {
                Some(plans) => strokes.push(plans),
                None => {
                    report.notes.push(format!("spike: stroke {i} too short, unchanged"));
                    strokes.push(Vec::new());
                }
            }
        }
        run(
            Step::Spike {
                spacing: cfg.resample_spacing,
                strokes,
            },
            &mut cur,
            &mut report,
        );
    }
    if fire.jitter {
        let mut rng = seed::stream(seed, "jitter");
        let fraction = uniform(&mut rng, cfg.jitter.vertex_fraction);
        let step = Step::Jitter {
            seed: rng.random(),
            sigma: cfg.jitter.sigma,
            fraction,
        };
        run(step, &mut cur, &mut report);
    }
    if fire.transitional {
        let before = cur.strokes.len();
        run(Step::Transitional, &mut cur, &mut report);
        report.false_strokes.extend(before..cur.strokes.len());
    }
    if fire.random_false {
        let lines = false_strokes::sample_random_lines(
            &mut seed::stream(seed, "random_false"),
            &cur,
            &cfg.false_strokes,
        );
        let before = cur.strokes.len();
        run(Step::RandomFalse { lines }, &mut cur, &mut report);
        report.false_strokes.extend(before..cur.strokes.len());
    }
    Ok((cur, report))
}

/// Re-execute a recorded report on the clean sketch it was produced from.
pub fn replay(sketch: &Sketch, report: &AugmentReport) -> Sketch {
    report
        .steps
        .iter()
        .fold(sketch.clone(), |cur, step| step.execute(&cur))
}
