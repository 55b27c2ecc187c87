use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use airsketch::augment::AugmentConfig;
use airsketch::dataset::DatasetConfig;
use airsketch::metrics::MetricsConfig;
use airsketch::tracking::PenHeuristic;
use airsketch::{CanvasSpec, Error, RenderSpec, Result};

/// Parameters shared by all commands, loaded from `--config`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub canvas: CanvasSpec,
    pub augment: AugmentConfig,
    pub render: RenderSpec,
    pub metrics: MetricsConfig,
    pub dataset: DatasetConfig,
    pub pen: PenHeuristic,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<RunConfig> {
        let cfg = match path {
            None => RunConfig::default(),
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                toml::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: {}", p.display(), e.message())))?
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.canvas.validate()?;
        self.augment.validate()?;
        self.render.validate()?;
        self.metrics.ssim.validate()?;
        self.dataset.validate()?;
        self.pen.validate()
    }
}

/// Written next to every artifact so outputs describe how they were made.
#[derive(Debug, Serialize)]
pub struct Snapshot<'a, A: Serialize> {
    pub command: &'a str,
    pub seed: String,
    pub args: A,
    pub config: &'a RunConfig,
}

pub fn write_snapshot<A: Serialize>(
    path: &Path,
    command: &str,
    seed: u64,
    args: A,
    config: &RunConfig,
) -> Result<()> {
    let snap = Snapshot {
        command,
        seed: seed.to_string(),
        args,
        config,
    };
    let text = toml::to_string(&snap).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
