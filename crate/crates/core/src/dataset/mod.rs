//! Training and evaluation datasets: (clean, corrupted) image pairs with
//! prompts and a replayable manifest, score-based corpus filtering, and the
//! clustered held-out category split.
//!
//! Output layout of [`build_pairs`]:
//!
//! ```text
//! <out>/images/<sample_id>_clean.png
//! <out>/images/<sample_id>_noisy.png
//! <out>/manifest.jsonl
//! <out>/config_snapshot.toml
//! ```

pub mod filter;
pub mod holdout;
pub mod kmeans;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use filter::{filter_top_percent, keep_count, FilterOutcome};
pub use holdout::{aggregate_stats, holdout_kmeans, parse_stats, CategoryStats, HoldoutSplit};
pub use kmeans::{kmeans, standardize, KMeans};

use crate::augment::{self, AugmentConfig, AugmentReport};
use crate::error::{Error, Result};
use crate::raster::{render, RasterImage, RenderSpec};
use crate::seed;
use crate::sketch::Sketch;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.jsonl";
pub const SNAPSHOT_FILE: &str = "config_snapshot.toml";
pub const IMAGES_DIR: &str = "images";

pub fn make_prompt(category: &str) -> Result<String> {
    if category.trim().is_empty() {
        return Err(Error::Config("category must not be empty".into()));
    }
    Ok(format!("a black and white sketch of a {category}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    /// Flag a seeded fraction of entries for empty-prompt training.
    pub empty_prompts: bool,
    pub empty_prompt_fraction: f64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            empty_prompts: false,
            empty_prompt_fraction: 0.25,
        }
    }
}

impl DatasetConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.empty_prompt_fraction) {
            return Err(Error::Config(format!(
                "empty_prompt_fraction {} must be in [0, 1]",
                self.empty_prompt_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub schema_version: u32,
    pub sample_id: String,
    pub source_id: String,
    pub category: String,
    pub prompt: String,
    pub empty_prompt: bool,
    /// Relative to the dataset root.
    pub clean_path: String,
    pub noisy_path: String,
    pub seed: u64,
    pub augment_report: AugmentReport,
}

/// Everything that determines the bytes of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildSnapshot {
    /// Decimal string: TOML integers cannot hold every u64.
    pub global_seed: String,
    pub corpus_size: usize,
    pub dataset: DatasetConfig,
    pub render: RenderSpec,
    pub augment: AugmentConfig,
}

pub fn sample_id(index: usize) -> String {
    format!("{index:06}")
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

fn build_one(
    index: usize,
    sketch: &Sketch,
    aug: &AugmentConfig,
    spec: &RenderSpec,
    ds: &DatasetConfig,
    out_dir: &Path,
    global_seed: u64,
) -> Result<ManifestEntry> {
    let seed = seed::sample_seed(global_seed, index as u64);
    let id = sample_id(index);
    let prompt = make_prompt(&sketch.category)?;
    let (noisy, report) = augment::apply(sketch, aug, seed)?;
    let clean_rel = format!("{IMAGES_DIR}/{id}_clean.png");
    let noisy_rel = format!("{IMAGES_DIR}/{id}_noisy.png");
    render(sketch, spec).save_png(&out_dir.join(&clean_rel))?;
    render(&noisy, spec).save_png(&out_dir.join(&noisy_rel))?;
    let empty_prompt = ds.empty_prompts
        && seed::stream(seed, "empty_prompt").random::<f64>() < ds.empty_prompt_fraction;
    Ok(ManifestEntry {
        schema_version: MANIFEST_SCHEMA_VERSION,
        sample_id: id,
        source_id: sketch.source_id.clone(),
        category: sketch.category.clone(),
        prompt,
        empty_prompt,
        clean_path: clean_rel,
        noisy_path: noisy_rel,
        seed,
        augment_report: report,
    })
}

/// Render clean and corrupted images for every corpus sketch and write the
/// manifest. Runs on the current rayon pool; output bytes do not depend on
/// the number of threads.
pub fn build_pairs(
    corpus: &[Sketch],
    aug: &AugmentConfig,
    spec: &RenderSpec,
    ds: &DatasetConfig,
    out_dir: &Path,
    global_seed: u64,
) -> Result<Vec<ManifestEntry>> {
    if corpus.is_empty() {
        return Err(Error::Config("corpus is empty".into()));
    }
    aug.validate()?;
    spec.validate()?;
    ds.validate()?;
    let images = out_dir.join(IMAGES_DIR);
    fs::create_dir_all(&images).map_err(|e| Error::io(&images, e))?;
    let manifest_path = out_dir.join(MANIFEST_FILE);
    let partial = out_dir.join(format!("{MANIFEST_FILE}.partial"));

    let result = (|| {
        let entries: Vec<ManifestEntry> = corpus
            .par_iter()
            .enumerate()
            .map(|(i, s)| build_one(i, s, aug, spec, ds, out_dir, global_seed))
            .collect::<Result<_>>()?;

        let mut text = String::new();
        for e in &entries {
            text.push_str(&serde_json::to_string(e).expect("manifest entry serializes"));
            text.push('\n');
        }
        write_file(&partial, text.as_bytes())?;
        fs::rename(&partial, &manifest_path).map_err(|e| Error::io(&manifest_path, e))?;

        let snapshot = BuildSnapshot {
            global_seed: global_seed.to_string(),
            corpus_size: corpus.len(),
            dataset: ds.clone(),
            render: *spec,
            augment: aug.clone(),
        };
        let toml = toml::to_string(&snapshot).map_err(|e| Error::Format(e.to_string()))?;
        write_file(&out_dir.join(SNAPSHOT_FILE), toml.as_bytes())?;
        Ok(entries)
    })();

    if result.is_err() {
        let _ = fs::remove_file(&partial);
        let _ = fs::remove_file(&manifest_path);
    }
    result
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let e: ManifestEntry = serde_json::from_str(l).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            if e.schema_version != MANIFEST_SCHEMA_VERSION {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("unsupported schema_version {}", e.schema_version),
                });
            }
            Ok(e)
        })
        .collect()
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    parse_manifest(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

/// Re-render the noisy image of `entry` from its recorded report and compare
/// with the stored PNG.
pub fn verify_entry(clean: &Sketch, entry: &ManifestEntry, spec: &RenderSpec, root: &Path) -> Result<bool> {
    let replayed = augment::replay(clean, &entry.augment_report);
    let stored = RasterImage::load_png(&root.join(&entry.noisy_path))?;
    Ok(render(&replayed, spec) == stored)
}

pub fn manifest_paths(root: &Path, entry: &ManifestEntry) -> (PathBuf, PathBuf) {
    (root.join(&entry.clean_path), root.join(&entry.noisy_path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketch::{Point, Stroke};

    #[test]
    fn prompt_template() {
        assert_eq!(make_prompt("cat").unwrap(), "a black and white sketch of a cat");
        assert_eq!(make_prompt("angel").unwrap(), "a black and white sketch of a angel");
        assert!(matches!(make_prompt(""), Err(Error::Config(_))));
    }

    fn corpus() -> Vec<Sketch> {
        (0..2)
            .map(|i| {
                Sketch::new(
                    vec![
                        Stroke::new(vec![Point::new(0.1, 0.1), Point::new(0.9, 0.2 + 0.1 * i as f64)]),
                        Stroke::new(vec![Point::new(0.2, 0.8), Point::new(0.7, 0.6)]),
                    ],
                    "cat",
                    format!("k{i}"),
                )
            })
            .collect()
    }

    #[test]
    fn two_sketches_two_entries_four_pngs() {
        let dir = tempfile::tempdir().unwrap();
        let spec = RenderSpec {
            size: 64,
            ..RenderSpec::default()
        };
        let entries = build_pairs(&corpus(), &AugmentConfig::default(), &spec, &DatasetConfig::default(), dir.path(), 7).unwrap();
        assert_eq!(entries.len(), 2);
        let pngs = fs::read_dir(dir.path().join(IMAGES_DIR)).unwrap().count();
        assert_eq!(pngs, 4);
        let back = read_manifest(&dir.path().join(MANIFEST_FILE)).unwrap();
        assert_eq!(back, entries);
        for (s, e) in corpus().iter().zip(&back) {
            assert!(verify_entry(s, e, &spec, dir.path()).unwrap());
            assert_eq!(e.prompt, make_prompt(&e.category).unwrap());
        }
        let snap: BuildSnapshot =
            toml::from_str(&fs::read_to_string(dir.path().join(SNAPSHOT_FILE)).unwrap()).unwrap();
        assert_eq!(snap.global_seed, "7");
    }

    #[test]
    fn empty_corpus_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let err = build_pairs(&[], &AugmentConfig::default(), &RenderSpec::default(), &DatasetConfig::default(), dir.path(), 0)
            .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn empty_prompt_flag_fraction() {
        let dir = tempfile::tempdir().unwrap();
        let spec = RenderSpec {
            size: 16,
            stroke_width: 1.0,
            supersample: 1,
        };
        let corpus: Vec<Sketch> = (0..400).map(|i| corpus()[i % 2].clone()).collect();
        let ds = DatasetConfig {
            empty_prompts: true,
            ..DatasetConfig::default()
        };
        let entries = build_pairs(&corpus, &AugmentConfig::disabled(), &spec, &ds, dir.path(), 1).unwrap();
        let flagged = entries.iter().filter(|e| e.empty_prompt).count();
        assert!((70..=130).contains(&flagged), "{flagged}");
    }

    #[test]
    fn unwritable_output_cleans_up_manifest() {
        let dir = tempfile::tempdir().unwrap();
        // a file where the images directory should go
        fs::write(dir.path().join(IMAGES_DIR), b"x").unwrap();
        let err = build_pairs(&corpus(), &AugmentConfig::default(), &RenderSpec::default(), &DatasetConfig::default(), dir.path(), 0)
            .unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(!dir.path().join(MANIFEST_FILE).exists());
    }
}
