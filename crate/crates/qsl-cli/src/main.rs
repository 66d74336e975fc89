//! Experiment command line: configure, run, persist and plot every
//! experiment deterministically. Each subcommand reads an optional JSON
//! configuration, applies flag overrides, validates before computing, and
//! writes CSV/JSON/SVG outputs stamped with the configuration hash and seed.

mod commands;
mod config;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{parse_measure_flag, ConfigError, ExperimentConfig};
use output::OutputWriter;

#[derive(Parser)]
#[command(name = "qsl", version, about = "Quantum similarity learning experiments")]
struct Cli {
    /// JSON configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Root seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory override.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Similarity measure override: full, swap:m or proj:m.
    #[arg(long, global = true)]
    measure: Option<String>,

    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form pair-circuit study: similarity heatmaps, density of
    /// states, retrieval losses and the improvement map.
    ToyAnalysis,
    /// Train the configured experiment and persist weights plus the loss
    /// history.
    Train,
    /// Evaluate persisted weights: full loss and a goodness report.
    Eval {
        /// Weights file written by the train subcommand.
        #[arg(long)]
        weights: PathBuf,
    },
    /// Decision-grid classification with held-out accuracy.
    Classify,
    /// Interpolated-image transition scan.
    Transition,
    /// Complete a partially observed graph from learned node similarity.
    GraphComplete,
    /// Gradient-descent generation of a second-space point for a support
    /// image, with the cost landscape.
    Generate,
    /// Training-quality study across measured-qubit counts.
    PartialStudy,
    /// Batch-loss spread study across batch sizes.
    BatchStudy,
}

fn emit_error(kind: &str, message: &str) {
    let doc = serde_json::json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{doc}");
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, ConfigError> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(measure) = &cli.measure {
        config.measure = parse_measure_flag(measure)?;
    }
    if let Some(output) = &cli.output {
        config.output_dir = Some(output.display().to_string());
    }
    config.validate()?;
    Ok(config)
}

fn default_dir(command: &Command) -> &'static str {
    match command {
        Command::ToyAnalysis => "out/toy-analysis",
        Command::Train => "out/train",
        Command::Eval { .. } => "out/eval",
        Command::Classify => "out/classify",
        Command::Transition => "out/transition",
        Command::GraphComplete => "out/graph-complete",
        Command::Generate => "out/generate",
        Command::PartialStudy => "out/partial-study",
        Command::BatchStudy => "out/batch-study",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let config = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            emit_error("config", &e.0);
            return ExitCode::from(2);
        }
    };

    let dir = config
        .output_dir
        .clone()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(default_dir(&cli.command)));
    let mut writer = match OutputWriter::new(&dir, &config.hash(), config.seed) {
        Ok(w) => w,
        Err(e) => {
            emit_error("runtime", &format!("cannot prepare output directory: {e}"));
            return ExitCode::from(1);
        }
    };

    let outcome = match &cli.command {
        Command::ToyAnalysis => commands::toy::run(&config, &mut writer),
        Command::Train => commands::train_eval::run_train(&config, &mut writer),
        Command::Eval { weights } => {
            commands::train_eval::run_eval(&config, weights, &mut writer, cli.quiet)
        }
        Command::Classify => commands::classify::run(&config, &mut writer),
        Command::Transition => commands::transition::run(&config, &mut writer),
        Command::GraphComplete => commands::graph::run(&config, &mut writer),
        Command::Generate => commands::generate::run(&config, &mut writer),
        Command::PartialStudy => commands::partial::run(&config, &mut writer),
        Command::BatchStudy => commands::batch::run(&config, &mut writer),
    };

    match outcome {
        Ok(()) => {
            if !cli.quiet {
                for path in writer.written() {
                    eprintln!("wrote {}", path.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            emit_error("runtime", &e.0);
            ExitCode::from(1)
        }
    }
}
