use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]`, written as a two-element array in config files.
pub type Interval = [f64; 2];

fn check_interval(name: &str, r: Interval, min: f64) -> Result<()> {
    let [lo, hi] = r;
    if !(lo.is_finite() && hi.is_finite()) || lo < min || lo > hi {
        return Err(Error::Config(format!(
            "{name} = [{lo}, {hi}] must satisfy {min} <= lo <= hi"
        )));
    }
    Ok(())
}

fn check_fraction(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Config(format!("{name} = {v} must be in [0, 1]")));
    }
    Ok(())
}

/// Normal distribution parameters in canvas units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalDist {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveParams {
    /// Inclusive range for the number of summed sine components.
    pub n_waves: [u32; 2],
    /// Cycles per stroke.
    pub freq_range: Interval,
    pub amp_range: Interval,
    pub phase_range: Interval,
}

impl Default for WaveParams {
    fn default() -> Self {
        WaveParams {
            n_waves: [2, 5],
            freq_range: [0.5, 4.0],
            amp_range: [0.005, 0.02],
            phase_range: [0.0, TAU],
        }
    }
}

impl WaveParams {
    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.n_waves;
        if lo < 1 || lo > hi {
            return Err(Error::Config(format!(
                "wave.n_waves = [{lo}, {hi}] must satisfy 1 <= lo <= hi"
            )));
        }
        check_interval("wave.freq_range", self.freq_range, 0.0)?;
        check_interval("wave.amp_range", self.amp_range, 0.0)?;
        check_interval("wave.phase_range", self.phase_range, 0.0)?;
        if self.phase_range[1] > TAU {
            return Err(Error::Config("wave.phase_range must lie in [0, 2π]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpikeMode {
    Sharp,
    Smooth,
    /// Each spike picks sharp or smooth with equal odds.
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpikeParams {
    pub mode: SpikeMode,
    pub height: NormalDist,
    pub width: NormalDist,
    pub bezier_offset_range: Interval,
    pub max_per_stroke: u32,
}

impl Default for SpikeParams {
    fn default() -> Self {
        SpikeParams {
            mode: SpikeMode::Mixed,
            height: NormalDist {
                mean: 0.03,
                std: 0.01,
            },
            width: NormalDist {
                mean: 0.01,
                std: 0.005,
            },
            bezier_offset_range: [0.01, 0.05],
            max_per_stroke: 2,
        }
    }
}

impl SpikeParams {
    pub fn validate(&self) -> Result<()> {
        for (name, d) in [("spike.height", self.height), ("spike.width", self.width)] {
            if !(d.std >= 0.0) || !d.mean.is_finite() || !d.std.is_finite() {
                return Err(Error::Config(format!("{name} needs finite mean and std >= 0")));
            }
        }
        check_interval("spike.bezier_offset_range", self.bezier_offset_range, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JitterParams {
    pub sigma: f64,
    /// Fraction of vertices perturbed, drawn once per sample from this range.
    pub vertex_fraction: Interval,
}

impl Default for JitterParams {
    fn default() -> Self {
        JitterParams {
            sigma: 0.003,
            vertex_fraction: [0.3, 0.7],
        }
    }
}

impl JitterParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::Config(format!("jitter.sigma = {} must be >= 0", self.sigma)));
        }
        check_interval("jitter.vertex_fraction", self.vertex_fraction, 0.0)?;
        check_fraction("jitter.vertex_fraction", self.vertex_fraction[1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StructParams {
    /// Per-axis whole-sketch scale factor.
    pub scale_range: Interval,
    /// Per-axis stroke offset in canvas units.
    pub stroke_translate_range: Interval,
    /// Uniform per-stroke scale about the stroke centroid.
    pub stroke_scale_range: Interval,
}

impl Default for StructParams {
    fn default() -> Self {
        StructParams {
            scale_range: [0.7, 1.0],
            stroke_translate_range: [-0.05, 0.05],
            stroke_scale_range: [0.8, 1.25],
        }
    }
}

impl StructParams {
    pub fn validate(&self) -> Result<()> {
        check_interval("structural.scale_range", self.scale_range, f64::MIN_POSITIVE)?;
        check_interval(
            "structural.stroke_translate_range",
            self.stroke_translate_range,
            f64::NEG_INFINITY,
        )?;
        check_interval(
            "structural.stroke_scale_range",
            self.stroke_scale_range,
            f64::MIN_POSITIVE,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FalseStrokeParams {
    /// Transitional mode joins consecutive strokes; otherwise random lines.
    pub transitional: bool,
    pub random_count_max: u32,
    /// Relative growth of the bounding box that random lines are drawn in.
    pub placement_inflate: f64,
}

impl Default for FalseStrokeParams {
    fn default() -> Self {
        FalseStrokeParams {
            transitional: true,
            random_count_max: 3,
            placement_inflate: 0.1,
        }
    }
}

impl FalseStrokeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.placement_inflate >= 0.0) || !self.placement_inflate.is_finite() {
            return Err(Error::Config(format!(
                "false_strokes.placement_inflate = {} must be >= 0",
                self.placement_inflate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EraseParams {
    pub arc_fraction_range: Interval,
    pub whole_stroke_prob: f64,
}

impl Default for EraseParams {
    fn default() -> Self {
        EraseParams {
            arc_fraction_range: [0.1, 0.3],
            whole_stroke_prob: 0.3,
        }
    }
}

impl EraseParams {
    pub fn validate(&self) -> Result<()> {
        check_interval("erase.arc_fraction_range", self.arc_fraction_range, 0.0)?;
        check_fraction("erase.arc_fraction_range", self.arc_fraction_range[1])?;
        check_fraction("erase.whole_stroke_prob", self.whole_stroke_prob)
    }
}

/// Independent firing probability of each sub-augmentation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Probabilities {
    pub wave: f64,
    pub spike: f64,
    pub jitter: f64,
    pub sketch_distort: f64,
    pub misplace: f64,
    pub resize: f64,
    pub transitional: f64,
    pub random_false: f64,
    pub erase: f64,
}

impl Default for Probabilities {
    fn default() -> Self {
        Probabilities::all(0.5)
    }
}

impl Probabilities {
    pub fn all(p: f64) -> Self {
        Probabilities {
            wave: p,
            spike: p,
            jitter: p,
            sketch_distort: p,
            misplace: p,
            resize: p,
            transitional: p,
            random_false: p,
            erase: p,
        }
    }

    fn entries(&self) -> [(&'static str, f64); 9] {
        [
            ("wave", self.wave),
            ("spike", self.spike),
            ("jitter", self.jitter),
            ("sketch_distort", self.sketch_distort),
            ("misplace", self.misplace),
            ("resize", self.resize),
            ("transitional", self.transitional),
            ("random_false", self.random_false),
            ("erase", self.erase),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    pub probabilities: Probabilities,
    pub erase_enabled: bool,
    /// Vertex spacing enforced before local augmentations.
    pub resample_spacing: f64,
    pub wave: WaveParams,
    pub spike: SpikeParams,
    pub jitter: JitterParams,
    pub structural: StructParams,
    pub false_strokes: FalseStrokeParams,
    pub erase: EraseParams,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            probabilities: Probabilities::default(),
            erase_enabled: false,
            resample_spacing: crate::sketch::DEFAULT_SPACING,
            wave: WaveParams::default(),
            spike: SpikeParams::default(),
            jitter: JitterParams::default(),
            structural: StructParams::default(),
            false_strokes: FalseStrokeParams::default(),
            erase: EraseParams::default(),
        }
    }
}

impl AugmentConfig {
    /// Every sub-augmentation disabled.
    pub fn disabled() -> Self {
        AugmentConfig {
            probabilities: Probabilities::all(0.0),
            ..AugmentConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in self.probabilities.entries() {
            check_fraction(&format!("probabilities.{name}"), p)?;
        }
        if !(self.resample_spacing > 0.0) || !self.resample_spacing.is_finite() {
            return Err(Error::Config(format!(
                "resample_spacing = {} must be positive",
                self.resample_spacing
            )));
        }
        self.wave.validate()?;
        self.spike.validate()?;
        self.jitter.validate()?;
        self.structural.validate()?;
        self.false_strokes.validate()?;
        self.erase.validate()
    }
}
