pub mod commands;
pub mod config;

use std::ffi::OsString;

use clap::{Args, Parser, Subcommand};

use airsketch::ErrorCategory;

/// Corruption-pair generation, rendering and faithfulness evaluation for
/// air-drawn sketches.
///
/// Every flag marked [env: ...] can also be set through that environment
/// variable. Exit codes: 0 success, 2 usage, 3 I/O, 4 configuration,
/// 5 invalid data. Failures print one line `airsketch: error[<category>]: ...`.
#[derive(Debug, Parser)]
#[command(name = "airsketch", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Seed for every random decision of the run.
    #[arg(long, global = true, default_value_t = 0, env = "AIRSKETCH_SEED")]
    pub seed: u64,
    /// Worker threads (0 = all cores). Outputs do not depend on this.
    #[arg(long, global = true, default_value_t = 0, env = "AIRSKETCH_THREADS")]
    pub threads: usize,
    /// TOML file with [canvas], [augment], [render], [metrics], [dataset]
    /// and [pen] sections; omitted keys keep their defaults.
    #[arg(long, global = true, env = "AIRSKETCH_CONFIG")]
    pub config: Option<std::path::PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize a Quick, Draw! simplified NDJSON file, optionally keeping
    /// only the best-scored fraction of every category.
    QdImport(commands::QdImportArgs),
    /// Corrupt every sketch of an NDJSON corpus.
    Augment(commands::AugmentArgs),
    /// Rasterize every sketch of an NDJSON file to PNG.
    Render(commands::RenderArgs),
    /// Build a (clean, noisy) training dataset with manifest.
    GenDataset(commands::GenDatasetArgs),
    /// Score candidate images against ground truth (SSIM, Chamfer distance).
    Eval(commands::EvalArgs),
    /// Bin generated-image CD by tracking CD.
    Bins(commands::BinsArgs),
    /// Cluster categories by statistics and pick held-out categories.
    Holdout(commands::HoldoutArgs),
    /// Convert hand-landmark recordings into tracking sketches.
    TrackImport(commands::TrackImportArgs),
}

/// Parse `args` (including the program name) and run the command. Returns
/// the process exit code; errors have already been reported on stderr.
pub fn run_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match commands::run(cli) {
        Ok(()) => 0,
        Err(e) => {
            let code = match e.category() {
                ErrorCategory::Io => 3,
                ErrorCategory::Config => 4,
                ErrorCategory::Data => 5,
            };
            let msg = e.to_string().replace('\n', " ");
            eprintln!("airsketch: error[{}]: {msg}", e.category().as_str());
            code
        }
    }
}
