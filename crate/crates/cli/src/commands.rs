use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use airsketch::augment::{self, AugmentReport};
use airsketch::dataset::{self, CategoryStats};
use airsketch::metrics::{self, BinMode};
use airsketch::sketch::{normalize, parse_quickdraw_line, to_quickdraw_line};
use airsketch::{render, seed, tracking, Error, Result, Sketch};

use crate::config::{write_snapshot, RunConfig};
use crate::{Cli, Command};

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// `<file>.config.toml`, next to a file artifact.
fn snapshot_beside(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".config.toml");
    out.with_file_name(name)
}

fn ndjson<'a>(lines: impl Iterator<Item = String> + 'a) -> String {
    let mut text = String::new();
    for l in lines {
        text.push_str(&l);
        text.push('\n');
    }
    text
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("value serializes")
}

fn to_json_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

/// Read an NDJSON corpus. Errors carry the file name and line number.
fn read_corpus(path: &Path) -> Result<Vec<Sketch>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_quickdraw_line(line, i + 1).map_err(|e| match e {
            Error::EmptySketch => Error::Parse {
                line: i + 1,
                message: format!("{}: drawing has no strokes", path.display()),
            },
            other => other,
        })?);
    }
    if out.is_empty() {
        return Err(Error::Config(format!("{} contains no sketches", path.display())));
    }
    Ok(out)
}

pub fn run(cli: Cli) -> Result<()> {
    let cfg = RunConfig::load(cli.global.config.as_deref())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let seed = cli.global.seed;
    pool.install(|| match cli.command {
        Command::QdImport(a) => qd_import(&a, &cfg, seed),
        Command::Augment(a) => augment_cmd(&a, &cfg, seed),
        Command::Render(a) => render_cmd(&a, &cfg, seed),
        Command::GenDataset(a) => gen_dataset(&a, &cfg, seed),
        Command::Eval(a) => eval(&a, &cfg, seed),
        Command::Bins(a) => bins(&a, &cfg, seed),
        Command::Holdout(a) => holdout(&a, &cfg, seed),
        Command::TrackImport(a) => track_import(&a, &cfg, seed),
    })
}

#[derive(Debug, Args, Serialize)]
pub struct QdImportArgs {
    /// Quick, Draw! simplified NDJSON.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Normalized NDJSON output.
    #[arg(long)]
    pub out: PathBuf,
    /// Keep only these categories (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub categories: Vec<String>,
    /// Score sidecar JSONL keyed by key_id; enables the top-fraction filter
    /// on `clip_i2t`.
    #[arg(long)]
    pub scores: Option<PathBuf>,
    /// Fraction of every category kept when --scores is given.
    #[arg(long, default_value_t = 0.05)]
    pub top_fraction: f64,
}

fn qd_import(a: &QdImportArgs, cfg: &RunConfig, seed: u64) -> Result<()> {
    let mut corpus: Vec<Sketch> = read_corpus(&a.input)?
        .into_iter()
        .filter(|s| a.categories.is_empty() || a.categories.contains(&s.category))
        .map(|s| normalize(&s, &cfg.canvas))
        .collect();
    if let Some(path) = &a.scores {
        let scores = metrics::read_sidecar(path)?;
        let mut by_cat: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
        let mut unscored = 0usize;
        for s in &corpus {
            let entry = by_cat.entry(s.category.clone()).or_default();
            match scores.get(&s.source_id).and_then(|r| r.clip_i2t) {
                Some(v) => entry.push((s.source_id.clone(), v)),
                None => unscored += 1,
            }
        }
        let kept = dataset::filter_top_percent(&by_cat, a.top_fraction)?;
        if unscored > 0 {
            eprintln!("airsketch: warning: {unscored} sketches have no clip_i2t score and were dropped");
        }
        for c in &kept.empty_categories {
            eprintln!("airsketch: warning: category {c} has no scored sketches");
        }
        let keep: std::collections::HashSet<&str> = kept.selected.iter().map(String::as_str).collect();
        corpus.retain(|s| keep.contains(s.source_id.as_str()));
    }
    if corpus.is_empty() {
        return Err(Error::Config("no sketches left after filtering".into()));
    }
    write_text(&a.out, &ndjson(corpus.iter().map(to_quickdraw_line)))?;
    write_snapshot(&snapshot_beside(&a.out), "qd-import", seed, a, cfg)?;
    eprintln!("airsketch: wrote {} sketches to {}", corpus.len(), a.out.display());
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct AugmentArgs {
    /// Normalized NDJSON corpus.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Corrupted NDJSON (coordinates re-quantized to 0..=255).
    #[arg(long)]
    pub out: PathBuf,
    /// Per-sample augmentation reports (JSONL). Defaults to `<out>.reports.jsonl`.
    #[arg(long)]
    pub reports: Option<PathBuf>,
}

fn augment_cmd(a: &AugmentArgs, cfg: &RunConfig, seed: u64) -> Result<()> {
    let corpus = read_corpus(&a.input)?;
    let results: Vec<(Sketch, AugmentReport)> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, s)| augment::apply(s, &cfg.augment, seed::sample_seed(seed, i as u64)))
        .collect::<Result<_>>()?;
    let reports = a.reports.clone().unwrap_or_else(|| {
        let mut n = a.out.file_name().unwrap_or_default().to_os_string();
        n.push(".reports.jsonl");
        a.out.with_file_name(n)
    });
    write_text(&a.out, &ndjson(results.iter().map(|(s, _)| to_quickdraw_line(s))))?;
    write_text(&reports, &ndjson(results.iter().map(|(_, r)| to_json(r))))?;
    write_snapshot(&snapshot_beside(&a.out), "augment", seed, a, cfg)
}

#[derive(Debug, Args, Serialize)]
pub struct RenderArgs {
    /// NDJSON sketches.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output directory; images are named `<index>[_<suffix>].png`.
    #[arg(long)]
    pub out: PathBuf,
    /// File-name suffix such as `clean` or `tracking`.
    #[arg(long)]
    pub suffix: Option<String>,
}

fn render_cmd(a: &RenderArgs, cfg: &RunConfig, seed: u64) -> Result<()> {
    let corpus = read_corpus(&a.input)?;
    create_dir(&a.out)?;
    corpus.par_iter().enumerate().try_for_each(|(i, s)| {
        let name = match &a.suffix {
            Some(sfx) => format!("{}_{sfx}.png", dataset::sample_id(i)),
            None => format!("{}.png", dataset::sample_id(i)),
        };
        render(s, &cfg.render).save_png(&a.out.join(name))
    })?;
    write_snapshot(&a.out.join(dataset::SNAPSHOT_FILE), "render", seed, a, cfg)
}

#[derive(Debug, Args, Serialize)]
pub struct GenDatasetArgs {
    /// Normalized NDJSON corpus.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Dataset directory (images/, manifest.jsonl, config_snapshot.toml).
    #[arg(long)]
    pub out: PathBuf,
    /// Only use the first N sketches.
    #[arg(long)]
    pub limit: Option<usize>,
}

fn gen_dataset(a: &GenDatasetArgs, cfg: &RunConfig, seed: u64) -> Result<()> {
    let mut corpus = read_corpus(&a.input)?;
    if let Some(n) = a.limit {
        corpus.truncate(n);
    }
    let entries = dataset::build_pairs(&corpus, &cfg.augment, &cfg.render, &cfg.dataset, &a.out, seed)?;
    eprintln!("airsketch: wrote {} pairs to {}", entries.len(), a.out.display());
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    /// Ground-truth PNG directory.
    #[arg(long)]
    pub gt: PathBuf,
    /// Candidate PNG directory; files pair up by sample id.
    #[arg(long)]
    pub cand: PathBuf,
    /// Report CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Externally computed LPIPS / CLIP scores (JSONL keyed by sample_id).
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    /// Skip pairs whose metrics cannot be computed (e.g. blank images)
    /// instead of failing.
    #[arg(long)]
    pub skip_blank: bool,
}

fn eval(a: &EvalArgs, cfg: &RunConfig, seed: u64) -> Result<()> {
    for d in [&a.gt, &a.cand] {
        if !d.is_dir() {
            return Err(Error::io(d, std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory")));
        }
    }
    let sidecar = match &a.sidecar {
        Some(p) => metrics::read_sidecar(p)?,
        None => BTreeMap::new(),
    };
    let outcome = metrics::evaluate_dirs(&a.gt, &a.cand, &cfg.metrics, &sidecar)?;
    for id in &outcome.unmatched {
        eprintln!("airsketch: warning: {id} has no counterpart");
    }
    if let Some((id, e)) = outcome.failures.first() {
        if !a.skip_blank {
            return Err(Error::Format(format!("sample {id}: {e}")));
        }
        for (id, e) in &outcome.failures {
            eprintln!("airsketch: warning: skipped {id}: {e}");
        }
    }
    if outcome.reports.is_empty() {
        return Err(Error::Config("no image pairs to evaluate".into()));
    }
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    metrics::write_reports_csv(&a.out, &outcome.reports)?;
    write_snapshot(&snapshot_beside(&a.out), "eval", seed, a, cfg)?;
    eprintln!("airsketch: evaluated {} pairs", outcome.reports.len());
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct BinsArgs {
    /// Report CSV of generated images against ground truth.
    #[arg(long)]
    pub report: PathBuf,
    /// Report CSV of tracking images against ground truth.
    #[arg(long)]
    pub tracking_report: PathBuf,
    /// Number of bins.
    #[arg(long, default_value_t = 4)]
    pub n_bins: usize,
    /// Equal-width intervals of tracking CD, or equal-count groups.
    #[arg(long, value_enum, default_value = "equal-width")]
    pub mode: CliBinMode,
    /// JSON summary; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CliBinMode {
    EqualWidth,
    EqualCount,
}

fn bins(a: &BinsArgs, cfg: &RunConfig, seed: u64) -> Result<()> {
    let generated = metrics::read_reports_csv(&a.report)?;
    let tracking = metrics::read_reports_csv(&a.tracking_report)?;
    let records = metrics::join_chaos_records(&generated, &tracking);
    let mode = match a.mode {
        CliBinMode::EqualWidth => BinMode::EqualWidth,
        CliBinMode::EqualCount => BinMode::EqualCount,
    };
    let summary = metrics::chaos_bins(&records, a.n_bins, mode)?;
    let text = to_json_pretty(&summary);
    match &a.out {
        Some(p) => {
            write_text(p, &text)?;
            write_snapshot(&snapshot_beside(p), "bins", seed, a, cfg)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct HoldoutArgs {
    /// Per-sample or per-category statistics (JSONL of CategoryStats).
    #[arg(long)]
    pub stats: PathBuf,
    /// Number of clusters, and of held-out categories.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// JSON split; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn holdout(a: &HoldoutArgs, cfg: &RunConfig, seed: u64) -> Result<()> {
    let rows: Vec<CategoryStats> = dataset::parse_stats(&read_text(&a.stats)?)?;
    let stats = dataset::aggregate_stats(&rows);
    let split = dataset::holdout_kmeans(&stats, a.k, seed)?;
    let text = to_json_pretty(&split);
    match &a.out {
        Some(p) => {
            write_text(p, &text)?;
            write_snapshot(&snapshot_beside(p), "holdout", seed, a, cfg)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct TrackImportArgs {
    /// Landmark recordings (JSONL); one sketch per file, named by file stem.
    #[arg(long = "in", required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Tracking sketches as NDJSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Category written into every imported sketch.
    #[arg(long)]
    pub category: String,
}

fn track_import(a: &TrackImportArgs, cfg: &RunConfig, seed: u64) -> Result<()> {
    let mut lines = Vec::with_capacity(a.input.len());
    for path in &a.input {
        let rec = tracking::parse_landmarks(&read_text(path)?)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        let id = path.file_stem().unwrap_or_default().to_string_lossy();
        let sketch = tracking::to_sketch(&rec, &cfg.pen, &cfg.canvas, &a.category, &id)?;
        lines.push(to_quickdraw_line(&sketch));
    }
    write_text(&a.out, &ndjson(lines.into_iter()))?;
    write_snapshot(&snapshot_beside(&a.out), "track-import", seed, a, cfg)
}
