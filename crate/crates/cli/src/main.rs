//! `annomod`: train and compare annotator-aware classification
//! strategies on sparse binary annotation corpora.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 numerical failure.

use annomod_cli::commands;
use annomod_cli::commands::scale::GridKind;
use annomod_cli::error::CliError;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "annomod",
    version,
    about = "Annotator-aware modeling for subjective binary classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GridArg {
    Annotators,
    Annotations,
}

#[derive(Subcommand)]
enum Command {
    /// Print a summary row for a corpus: sizes, densities, agreement.
    Stats {
        dataset: PathBuf,
        /// Auxiliary-text sidecar.
        #[arg(long)]
        aux_texts: Option<PathBuf>,
        /// Split-assignment sidecar.
        #[arg(long)]
        splits: Option<PathBuf>,
    },
    /// Generate a synthetic corpus and embedding file.
    Synth {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train one strategy; write checkpoint, history, predictions,
    /// metrics, and the split assignment used.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a checkpoint on one split of the configured corpus.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        /// train, val, or test.
        #[arg(long)]
        split: String,
        #[arg(long)]
        config: PathBuf,
        /// Split sidecar overriding the config (for example the
        /// splits.jsonl a training run wrote).
        #[arg(long)]
        splits: Option<PathBuf>,
        /// Also write the metrics JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scaling sweep and append one ledger row per trial.
    Scale {
        /// Which quantity the sweep scales.
        #[arg(long, value_enum)]
        grid: GridArg,
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; 0 uses one per core. Any value yields the
        /// same ledger rows.
        #[arg(long, default_value_t = 0)]
        parallelism: usize,
    },
    /// Correlate relative improvement with a corpus-size predictor.
    Correlate {
        #[arg(long)]
        ledger: PathBuf,
        /// instances, annotators, or annotations_per_annotator.
        #[arg(long, default_value = "annotations_per_annotator")]
        predictor: String,
        /// Annotator-pool size separating small from large pools.
        #[arg(long, default_value_t = 18)]
        threshold: usize,
        /// Cap on rows sampled per dataset; 0 keeps all.
        #[arg(long, default_value_t = 0)]
        max_per_dataset: usize,
        /// Seed for the per-dataset sampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the report as CSV to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a ledger as markdown plus SVG scaling plots.
    Report {
        #[arg(long)]
        ledger: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Stats {
            dataset,
            aux_texts,
            splits,
        } => commands::stats::run(&dataset, aux_texts.as_deref(), splits.as_deref()),
        Command::Synth { config, out } => commands::synth::run(&config, out.as_deref()),
        Command::Train { config, out } => commands::train::run(&config, out.as_deref()),
        Command::Eval {
            checkpoint,
            split,
            config,
            splits,
            out,
        } => commands::eval::run(&checkpoint, &split, &config, splits.as_deref(), out.as_deref()),
        Command::Scale {
            grid,
            config,
            out,
            parallelism,
        } => {
            let kind = match grid {
                GridArg::Annotators => GridKind::Annotators,
                GridArg::Annotations => GridKind::Annotations,
            };
            commands::scale::run(kind, &config, out.as_deref(), parallelism)
        }
        Command::Correlate {
            ledger,
            predictor,
            threshold,
            max_per_dataset,
            seed,
            out,
        } => commands::correlate::run(
            &ledger,
            &predictor,
            threshold,
            max_per_dataset,
            seed,
            out.as_deref(),
        ),
        Command::Report { ledger, out_dir } => commands::report::run(&ledger, &out_dir),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests print to stdout and succeed;
            // anything else is a usage error.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
