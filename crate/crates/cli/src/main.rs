mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Invocation problem detected outside clap: bad config values, missing
/// inputs, inconsistent flags.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Parser)]
#[command(name = "fairflow", version, about = "Exposure-fair re-ranking experiments")]
struct Cli {
    /// TOML file of default flag values; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse, filter and split a ratings file.
    Ingest(IngestArgs),
    /// Produce top-t long lists from a training split.
    Recommend(RecommendArgs),
    /// Turn long lists into final top-n lists.
    Rerank(RerankArgs),
    /// Compute the metric report of final lists.
    Evaluate(EvaluateArgs),
    /// Re-rank and evaluate over a grid of variants, lambdas and betas.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub ratings: Option<PathBuf>,
    /// Item to supplier map; items without a supplier are dropped.
    #[arg(long)]
    pub suppliers: Option<PathBuf>,
    /// tsv, csv or dat; guessed from the extension when omitted.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub min_user: Option<usize>,
    #[arg(long)]
    pub min_item: Option<usize>,
    #[arg(long)]
    pub sample_users: Option<usize>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RecommendArgs {
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// userknn, popular or import.
    #[arg(long)]
    pub algo: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    /// cosine or pearson.
    #[arg(long)]
    pub similarity: Option<String>,
    #[arg(long)]
    pub t: Option<usize>,
    /// Externally produced lists for `--algo import`.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RerankArgs {
    #[arg(long)]
    pub long: Option<PathBuf>,
    #[arg(long)]
    pub suppliers: Option<PathBuf>,
    /// none, item, supplier, random or reverse.
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Expected long-list size; defaults to the size found in the file.
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-iteration statistics; defaults to `<out>.iterations.json`.
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Final lists to evaluate.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Without a map every item is its own supplier.
    #[arg(long)]
    pub suppliers: Option<PathBuf>,
    /// Long lists; required by `--groups`.
    #[arg(long)]
    pub long: Option<PathBuf>,
    /// Also report the visibility-group shift against the base top-n.
    #[arg(long)]
    pub groups: bool,
    /// Second batch for a paired significance test on hits.
    #[arg(long)]
    pub mcnemar: Option<PathBuf>,
    /// Output stem: writes `<out>.json`, `<out>.csv` and, with `--groups`,
    /// `<out>.groups.csv`. Without it the JSON goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Use the built-in synthetic corpus instead of files.
    #[arg(long)]
    pub synthetic: bool,
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long)]
    pub long: Option<PathBuf>,
    #[arg(long)]
    pub suppliers: Option<PathBuf>,
    /// Comma-separated variants.
    #[arg(long)]
    pub variant: Option<String>,
    /// Comma-separated lambda grid.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Comma-separated beta values.
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.chain().any(|e| e.is::<UsageError>()) {
        return 1;
    }
    match err.chain().find_map(|e| e.downcast_ref::<fairflow_core::Error>()) {
        Some(e) if e.is_usage() => 1,
        Some(e) if e.is_internal() => 3,
        _ => 2,
    }
}

fn configure_workers() -> Result<(), UsageError> {
    let Ok(raw) = std::env::var("FAIRFLOW_WORKERS") else {
        return Ok(());
    };
    let workers: usize = raw
        .parse()
        .ok()
        .filter(|&w| w > 0)
        .ok_or_else(|| UsageError(format!("FAIRFLOW_WORKERS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| UsageError(e.to_string()))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    configure_workers()?;
    let config = cli.config.as_deref();
    match cli.command {
        Command::Ingest(a) => commands::ingest(a, &config::Settings::load(config, "ingest")?),
        Command::Recommend(a) => commands::recommend(a, &config::Settings::load(config, "recommend")?),
        Command::Rerank(a) => commands::rerank(a, &config::Settings::load(config, "rerank")?),
        Command::Evaluate(a) => commands::evaluate(a, &config::Settings::load(config, "evaluate")?),
        Command::Sweep(a) => commands::sweep(a, &config::Settings::load(config, "sweep")?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
