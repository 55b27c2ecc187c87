//! Faithfulness as a function of tracking chaos: records are grouped by the
//! CD between tracking and ground truth, and each group reports the mean of
//! both CD series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinMode {
    /// Equal-width intervals over `[min, max]` of tracking CD.
    #[default]
    EqualWidth,
    /// Equal-count groups after sorting by tracking CD.
    EqualCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaosRecord {
    pub tracking_cd: f64,
    pub generated_cd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub mean_tracking_cd: Option<f64>,
    pub mean_generated_cd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinSummary {
    pub mode: BinMode,
    pub bins: Vec<Bin>,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn summarize(lo: f64, hi: f64, members: &[ChaosRecord]) -> Bin {
    Bin {
        lo,
        hi,
        count: members.len(),
        mean_tracking_cd: mean(members.iter().map(|r| r.tracking_cd)),
        mean_generated_cd: mean(members.iter().map(|r| r.generated_cd)),
    }
}

pub fn chaos_bins(records: &[ChaosRecord], n_bins: usize, mode: BinMode) -> Result<BinSummary> {
    if n_bins == 0 {
        return Err(Error::Config("need at least one bin".into()));
    }
    if records.len() < n_bins {
        return Err(Error::InsufficientData {
            needed: n_bins,
            got: records.len(),
        });
    }
    if records
        .iter()
        .any(|r| !r.tracking_cd.is_finite() || !r.generated_cd.is_finite())
    {
        return Err(Error::Format("chaos records must be finite".into()));
    }
    let bins = match mode {
        BinMode::EqualWidth => {
            let min = records.iter().map(|r| r.tracking_cd).fold(f64::INFINITY, f64::min);
            let max = records.iter().map(|r| r.tracking_cd).fold(f64::NEG_INFINITY, f64::max);
            let width = (max - min) / n_bins as f64;
            let mut members = vec![Vec::new(); n_bins];
            for r in records {
                let i = if width > 0.0 {
                    (((r.tracking_cd - min) / width).floor() as usize).min(n_bins - 1)
                } else {
                    0
                };
                members[i].push(*r);
            }
            members
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let lo = min + i as f64 * width;
                    let hi = if i + 1 == n_bins { max } else { min + (i + 1) as f64 * width };
                    summarize(lo, hi, m)
                })
                .collect()
        }
        BinMode::EqualCount => {
            let mut sorted = records.to_vec();
            sorted.sort_by(|a, b| a.tracking_cd.total_cmp(&b.tracking_cd));
            let n = sorted.len();
            (0..n_bins)
                .map(|i| {
                    let chunk = &sorted[i * n / n_bins..(i + 1) * n / n_bins];
                    summarize(chunk[0].tracking_cd, chunk[chunk.len() - 1].tracking_cd, chunk)
                })
                .collect()
        }
    };
    Ok(BinSummary { mode, bins })
}
