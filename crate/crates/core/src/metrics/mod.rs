//! Faithfulness metrics: SSIM, Chamfer distance, per-pair reports with
//! ingested neural scores, and the chaos-bin analysis.

pub mod bins;
pub mod chamfer;
pub mod ssim;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bins::{chaos_bins, Bin, BinMode, BinSummary, ChaosRecord};
pub use chamfer::{chamfer, chamfer_bruteforce, chamfer_points, chamfer_points_bruteforce};
pub use ssim::{ssim, SsimParams};

use crate::error::{Error, Result};
use crate::raster::{RasterImage, DEFAULT_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub ssim: SsimParams,
    pub cd_threshold: u8,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            ssim: SsimParams::default(),
            cd_threshold: DEFAULT_THRESHOLD,
        }
    }
}

/// One sidecar line written by the neural scorer.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreRecord {
    pub sample_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lpips: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clip_i2i: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clip_i2t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scorer: Option<String>,
}

/// Parse sidecar JSONL keyed by sample id. Duplicate ids and non-finite
/// scores are rejected.
pub fn parse_sidecar(text: &str) -> Result<BTreeMap<String, ScoreRecord>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: ScoreRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        if [rec.lpips, rec.clip_i2i, rec.clip_i2t]
            .iter()
            .flatten()
            .any(|v| !v.is_finite())
        {
            return Err(Error::Parse {
                line: i + 1,
                message: "non-finite score".into(),
            });
        }
        if out.contains_key(&rec.sample_id) {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("duplicate sample_id {}", rec.sample_id),
            });
        }
        out.insert(rec.sample_id.clone(), rec);
    }
    Ok(out)
}

pub fn read_sidecar(path: &Path) -> Result<BTreeMap<String, ScoreRecord>> {
    parse_sidecar(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub sample_id: String,
    pub ssim: f64,
    pub cd: f64,
    pub lpips: Option<f64>,
    pub clip_i2i: Option<f64>,
    pub clip_i2t: Option<f64>,
}

pub fn evaluate_pair(
    sample_id: &str,
    gt: &RasterImage,
    cand: &RasterImage,
    cfg: &MetricsConfig,
    ingested: Option<&ScoreRecord>,
) -> Result<MetricsReport> {
    let ssim = ssim(gt, cand, &cfg.ssim)?;
    let cd = chamfer(gt, cand, cfg.cd_threshold)?;
    Ok(MetricsReport {
        sample_id: sample_id.to_owned(),
        ssim,
        cd,
        lpips: ingested.and_then(|r| r.lpips),
        clip_i2i: ingested.and_then(|r| r.clip_i2i),
        clip_i2t: ingested.and_then(|r| r.clip_i2t),
    })
}

pub fn write_reports_csv(path: &Path, reports: &[MetricsReport]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for r in reports {
        w.serialize(r).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_reports_csv(path: &Path) -> Result<Vec<MetricsReport>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    r.deserialize()
        .map(|row| row.map_err(|e| csv_error(path, e)))
        .collect()
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!("checked is_io_error"),
        }
    } else {
        Error::Format(format!("{}: {e}", path.display()))
    }
}

/// Sample id of an image file: the stem without a trailing role suffix.
pub fn sample_id_of(path: &Path) -> Option<String> {
    let stem = path.file_stem()?.to_str()?;
    let id = ["_clean", "_noisy", "_gen", "_tracking"]
        .iter()
        .find_map(|s| stem.strip_suffix(s))
        .unwrap_or(stem);
    Some(id.to_owned())
}

/// PNG files in `dir` keyed by sample id.
pub fn index_pngs(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_png = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if !is_png {
            continue;
        }
        if let Some(id) = sample_id_of(&path) {
            if let Some(prev) = out.insert(id.clone(), path.clone()) {
                return Err(Error::Format(format!(
                    "sample id {id} matches both {} and {}",
                    prev.display(),
                    path.display()
                )));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Default)]
pub struct BatchOutcome {
    /// Successful reports in sample-id order.
    pub reports: Vec<MetricsReport>,
    pub failures: Vec<(String, Error)>,
    pub unmatched: Vec<String>,
}

/// Evaluate every sample id present in both directories, in parallel.
pub fn evaluate_dirs(
    gt_dir: &Path,
    cand_dir: &Path,
    cfg: &MetricsConfig,
    sidecar: &BTreeMap<String, ScoreRecord>,
) -> Result<BatchOutcome> {
    let gt = index_pngs(gt_dir)?;
    let cand = index_pngs(cand_dir)?;
    let unmatched = gt
        .keys()
        .filter(|k| !cand.contains_key(*k))
        .chain(cand.keys().filter(|k| !gt.contains_key(*k)))
        .cloned()
        .collect();
    let pairs: Vec<(&String, &PathBuf, &PathBuf)> = gt
        .iter()
        .filter_map(|(id, g)| cand.get(id).map(|c| (id, g, c)))
        .collect();
    let results: Vec<(String, Result<MetricsReport>)> = pairs
        .par_iter()
        .map(|(id, g, c)| {
            let r = RasterImage::load_png(g).and_then(|gi| {
                let ci = RasterImage::load_png(c)?;
                evaluate_pair(id, &gi, &ci, cfg, sidecar.get(*id))
            });
            ((*id).clone(), r)
        })
        .collect();
    let mut out = BatchOutcome {
        unmatched,
        ..BatchOutcome::default()
    };
    for (id, r) in results {
        match r {
            Ok(rep) => out.reports.push(rep),
            Err(e) => out.failures.push((id, e)),
        }
    }
    Ok(out)
}

/// Join a generated-vs-gt report with a tracking-vs-gt report on sample id.
pub fn join_chaos_records(generated: &[MetricsReport], tracking: &[MetricsReport]) -> Vec<ChaosRecord> {
    let gen: BTreeMap<&str, f64> = generated.iter().map(|r| (r.sample_id.as_str(), r.cd)).collect();
    let mut rows: Vec<(&str, ChaosRecord)> = tracking
        .iter()
        .filter_map(|t| {
            gen.get(t.sample_id.as_str()).map(|&g| {
                (
                    t.sample_id.as_str(),
                    ChaosRecord {
                        tracking_cd: t.cd,
                        generated_cd: g,
                    },
                )
            })
        })
        .collect();
    rows.sort_by(|a, b| a.0.cmp(b.0));
    rows.into_iter().map(|(_, r)| r).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{render, RenderSpec};
    use crate::sketch::{Point, Sketch, Stroke};

    fn img() -> RasterImage {
        let s = Sketch::new(
            vec![Stroke::new(vec![Point::new(0.2, 0.2), Point::new(0.8, 0.6)])],
            "t",
            "0",
        );
        render(&s, &RenderSpec {
            size: 64,
            ..RenderSpec::default()
        })
    }

    #[test]
    fn self_pair_report() {
        let a = img();
        let r = evaluate_pair("x", &a, &a, &MetricsConfig::default(), None).unwrap();
        assert_eq!(r.ssim, 1.0);
        assert_eq!(r.cd, 0.0);
        assert!(r.lpips.is_none() && r.clip_i2i.is_none() && r.clip_i2t.is_none());
    }

    #[test]
    fn ingested_scores_pass_through() {
        let a = img();
        let side = ScoreRecord {
            sample_id: "x".into(),
            lpips: Some(0.25),
            clip_i2t: Some(0.31),
            ..ScoreRecord::default()
        };
        let r = evaluate_pair("x", &a, &a, &MetricsConfig::default(), Some(&side)).unwrap();
        assert_eq!((r.lpips, r.clip_i2i, r.clip_i2t), (Some(0.25), None, Some(0.31)));
    }

    #[test]
    fn sidecar_parsing() {
        let text = "{\"sample_id\":\"a\",\"lpips\":0.1,\"scorer\":\"clip-vit-b32\"}\n\n{\"sample_id\":\"b\"}\n";
        let m = parse_sidecar(text).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m["a"].scorer.as_deref(), Some("clip-vit-b32"));
        assert!(parse_sidecar("{\"sample_id\":\"a\"}\n{\"sample_id\":\"a\"}").is_err());
        assert!(parse_sidecar("{\"sample_id\":\"a\",\"extra\":1}").is_err());
        assert!(parse_sidecar("{\"lpips\":0.1}").is_err());
    }

    #[test]
    fn csv_roundtrip_with_empty_cells() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let reports = vec![
            MetricsReport {
                sample_id: "000001".into(),
                ssim: 0.75,
                cd: 3.5,
                lpips: None,
                clip_i2i: Some(0.9),
                clip_i2t: None,
            },
            MetricsReport {
                sample_id: "000002".into(),
                ssim: -0.125,
                cd: 0.0,
                lpips: Some(0.2),
                clip_i2i: None,
                clip_i2t: Some(0.3),
            },
        ];
        write_reports_csv(&path, &reports).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("sample_id,ssim,cd,lpips,clip_i2i,clip_i2t\n"));
        assert!(text.contains("000001,0.75,3.5,,0.9,\n"));
        assert_eq!(read_reports_csv(&path).unwrap(), reports);
    }

    #[test]
    fn sample_ids_strip_role_suffix() {
        assert_eq!(sample_id_of(Path::new("d/000003_clean.png")).unwrap(), "000003");
        assert_eq!(sample_id_of(Path::new("d/000003_noisy.png")).unwrap(), "000003");
        assert_eq!(sample_id_of(Path::new("d/cat_12.png")).unwrap(), "cat_12");
    }
}
