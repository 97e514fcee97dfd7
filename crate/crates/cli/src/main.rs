//! `camp` — command-line pipeline for context-aware cricket player ratings.
//!
//! Typical use: `camp simulate` to produce a synthetic dataset (or point the
//! config at real ball-by-ball files), then `camp pipeline` to run
//! ingestion, feature building, clustering, projection, rating, the
//! resource-table baseline, and evaluation in one pass. Each stage can also
//! run on its own; later stages read the artifacts earlier ones wrote.

mod fsio;
mod manifest;
mod steps;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use camp_core::config::RunConfig;
use camp_core::projection::ModelKind;
use camp_core::{CampError, Result};

use crate::fsio::open_input;
use crate::steps::Ctx;

#[derive(Parser)]
#[command(
    name = "camp",
    version,
    about = "Context-aware cricket player contribution ratings"
)]
struct Cli {
    /// JSON configuration file; every field is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Root seed; all randomness derives from it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Projection model for ratings: knn, ridge, or forest.
    #[arg(long, global = true)]
    model: Option<String>,

    /// Wicket weight, in [0.1, 1].
    #[arg(long, global = true)]
    w: Option<f64>,

    /// Batting contribution weight.
    #[arg(long, global = true)]
    w_bat: Option<f64>,

    /// Bowling contribution weight.
    #[arg(long, global = true)]
    w_bowl: Option<f64>,

    /// Directory with an external dataset for reproduction checks.
    #[arg(long, global = true)]
    with_dataset: Option<String>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Parse, validate, and filter raw ball/summary data.
    Ingest,
    /// Build team, batter, and bowler feature embeddings.
    Features,
    /// Fit the k-means cluster models.
    Cluster,
    /// Build stage examples and cross-validate the projection models.
    Project,
    /// Compute per-player contribution ratings.
    Rate,
    /// Compute the resource-table baseline ratings.
    Baseline,
    /// Agreement, comparison, error, and distribution reports.
    Evaluate,
    /// Generate a synthetic dataset.
    Simulate,
    /// Run every stage in order.
    Pipeline,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ingest => "ingest",
            Command::Features => "features",
            Command::Cluster => "cluster",
            Command::Project => "project",
            Command::Rate => "rate",
            Command::Baseline => "baseline",
            Command::Evaluate => "evaluate",
            Command::Simulate => "simulate",
            Command::Pipeline => "pipeline",
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_json(open_input(path)?)?,
        None => RunConfig::default(),
    };
    // Flags win over the file.
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(model) = &cli.model {
        cfg.model = ModelKind::parse(model).ok_or_else(|| {
            CampError::validation(format!(
                "--model: expected knn, ridge, or forest, got {model:?}"
            ))
        })?;
    }
    if let Some(w) = cli.w {
        cfg.scoring.w = w;
    }
    if let Some(w_bat) = cli.w_bat {
        cfg.scoring.w_bat = w_bat;
    }
    if let Some(w_bowl) = cli.w_bowl {
        cfg.scoring.w_bowl = w_bowl;
    }
    if let Some(dir) = &cli.with_dataset {
        cfg.with_dataset = Some(dir.clone());
    }
    if let Some(out) = &cli.out {
        cfg.paths.out_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = resolve_config(cli)?;
    let ctx = Ctx::new(cfg);
    match cli.command {
        Command::Ingest => steps::cmd_ingest(&ctx),
        Command::Features => steps::cmd_features(&ctx),
        Command::Cluster => steps::cmd_cluster(&ctx),
        Command::Project => steps::cmd_project(&ctx),
        Command::Rate => steps::cmd_rate(&ctx),
        Command::Baseline => steps::cmd_baseline(&ctx),
        Command::Evaluate => steps::cmd_evaluate(&ctx),
        Command::Simulate => steps::cmd_simulate(&ctx),
        Command::Pipeline => steps::cmd_pipeline(&ctx),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("camp {}: error: {e}", cli.command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
