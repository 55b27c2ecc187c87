//! Held-out category selection: cluster categories by their statistics and
//! hold out one random category per cluster.

use std::collections::BTreeMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::kmeans::{kmeans, standardize};
use crate::error::{Error, Result};
use crate::seed;

/// Per-category (or per-sample, before aggregation) statistics. Any field
/// may be missing in the input file; clustering needs all four.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryStats {
    pub category: String,
    #[serde(default)]
    pub clip_i2t_gt: Option<f64>,
    #[serde(default)]
    pub clip_i2i_gt_tracking: Option<f64>,
    #[serde(default)]
    pub cd_gt_tracking: Option<f64>,
    #[serde(default)]
    pub ssim_gt_tracking: Option<f64>,
}

impl CategoryStats {
    pub fn features(&self) -> Option<[f64; 4]> {
        let f = [
            self.clip_i2t_gt?,
            self.clip_i2i_gt_tracking?,
            self.cd_gt_tracking?,
            self.ssim_gt_tracking?,
        ];
        f.iter().all(|v| v.is_finite()).then_some(f)
    }
}

/// Average rows that share a category. A feature missing from any row of a
/// category is missing from the aggregate.
pub fn aggregate_stats(rows: &[CategoryStats]) -> Vec<CategoryStats> {
    let mut groups: BTreeMap<&str, Vec<&CategoryStats>> = BTreeMap::new();
    for r in rows {
        groups.entry(r.category.as_str()).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(cat, rs)| {
            let avg = |f: fn(&CategoryStats) -> Option<f64>| {
                let vals: Option<Vec<f64>> = rs.iter().map(|r| f(r)).collect();
                vals.map(|v| v.iter().sum::<f64>() / v.len() as f64)
            };
            CategoryStats {
                category: cat.to_owned(),
                clip_i2t_gt: avg(|r| r.clip_i2t_gt),
                clip_i2i_gt_tracking: avg(|r| r.clip_i2i_gt_tracking),
                cd_gt_tracking: avg(|r| r.cd_gt_tracking),
                ssim_gt_tracking: avg(|r| r.ssim_gt_tracking),
            }
        })
        .collect()
}

pub fn parse_stats(text: &str) -> Result<Vec<CategoryStats>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldoutSplit {
    /// One category per cluster, in cluster order.
    pub held_out: Vec<String>,
    /// Cluster of every category.
    pub clusters: BTreeMap<String, usize>,
    pub training: Vec<String>,
    pub k: usize,
    pub seed: u64,
}

pub fn holdout_kmeans(stats: &[CategoryStats], k: usize, seed: u64) -> Result<HoldoutSplit> {
    let missing: Vec<String> = stats
        .iter()
        .filter(|s| s.features().is_none())
        .map(|s| s.category.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::IncompleteStats(missing));
    }
    let mut sorted: Vec<&CategoryStats> = stats.iter().collect();
    sorted.sort_by(|a, b| a.category.cmp(&b.category));
    if sorted.windows(2).any(|w| w[0].category == w[1].category) {
        return Err(Error::Config("duplicate category in statistics".into()));
    }
    if sorted.len() < k {
        return Err(Error::Config(format!(
            "{} categories cannot fill {k} clusters",
            sorted.len()
        )));
    }
    let raw: Vec<Vec<f64>> = sorted
        .iter()
        .map(|s| s.features().expect("checked").to_vec())
        .collect();
    let fit = kmeans(&standardize(&raw), k, seed, 100)?;

    let mut members: Vec<Vec<&str>> = vec![Vec::new(); k];
    for (s, &c) in sorted.iter().zip(&fit.assignment) {
        members[c].push(&s.category);
    }
    let mut rng = seed::stream(seed, "holdout");
    let held_out: Vec<String> = members
        .iter()
        .map(|m| m[rng.random_range(0..m.len())].to_owned())
        .collect();
    let training = sorted
        .iter()
        .map(|s| s.category.clone())
        .filter(|c| !held_out.contains(c))
        .collect();
    Ok(HoldoutSplit {
        held_out,
        clusters: sorted
            .iter()
            .zip(&fit.assignment)
            .map(|(s, &c)| (s.category.clone(), c))
            .collect(),
        training,
        k,
        seed,
    })
}
