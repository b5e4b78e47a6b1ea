//! `train`: fit one strategy on one corpus and write every artifact
//! needed to audit or resume the run.

use crate::commands::{build_store, ensure_dir, write_text};
use crate::config::{
    parse_strategy, parse_tie_rule, TrainConfig, DEFAULT_HIDDEN, DEFAULT_SPLIT_RATIOS,
    DEFAULT_USER_DIM,
};
use crate::error::CliError;
use crate::formats::checkpoint::save_checkpoint;
use crate::formats::dataset::{load_dataset, write_splits};
use crate::formats::dump::write_dump;
use annomod_core::corpus::{split_dataset, Dataset, TieRule};
use annomod_core::encoder::EmbeddingStore;
use annomod_core::pipeline::{run_strategy, RunOutput, StrategySpec};
use annomod_core::trainer::{MetricsBundle, TrainHistory};
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
pub struct SplitMetricsJson {
    pub f1_individual: f64,
    pub f1_majority: f64,
    pub f1_per_annotator_mean: f64,
    pub accuracy: f64,
    pub rows: usize,
}

impl SplitMetricsJson {
    pub fn from_bundle(b: &MetricsBundle) -> Self {
        SplitMetricsJson {
            f1_individual: b.f1_individual,
            f1_majority: b.f1_majority,
            f1_per_annotator_mean: b.f1_per_annotator_mean,
            accuracy: b.accuracy,
            rows: b.rows.len(),
        }
    }
}

#[derive(Serialize)]
struct MetricsJson<'a> {
    strategy: &'a str,
    selected_epoch: usize,
    adam_updates: u64,
    val: SplitMetricsJson,
    test: SplitMetricsJson,
}

pub fn render_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable metrics");
    s.push('\n');
    s
}

fn history_csv(history: &TrainHistory) -> String {
    let mut out = String::from("epoch,train_loss,val_f1\n");
    for e in &history.epochs {
        out.push_str(&format!("{},{},{}\n", e.epoch, e.train_loss, e.val_f1));
    }
    out
}

/// Loads the corpus and resolves its splits per the config: a sidecar
/// when given, otherwise a seeded ratio split.
pub fn prepare_dataset(cfg: &TrainConfig) -> Result<Dataset, CliError> {
    let dataset = load_dataset(
        &cfg.dataset,
        cfg.aux_texts.as_deref(),
        cfg.splits.as_deref(),
    )?;
    if dataset.splits().is_some() {
        return Ok(dataset);
    }
    let ratios = cfg.split_ratios.unwrap_or(DEFAULT_SPLIT_RATIOS);
    split_dataset(&dataset, ratios, cfg.split_seed.unwrap_or(0)).map_err(CliError::from)
}

pub fn spec_from_config(cfg: &TrainConfig) -> Result<(StrategySpec, TieRule), CliError> {
    let tie = parse_tie_rule(cfg.tie_rule.as_deref().unwrap_or("positive"))?;
    let spec = StrategySpec {
        strategy: parse_strategy(&cfg.strategy)?,
        user_dim: cfg.user_dim.unwrap_or(DEFAULT_USER_DIM),
        hidden: cfg.hidden.unwrap_or(DEFAULT_HIDDEN),
        hyper: cfg.hyperparams.to_core(),
        table_seed: cfg.table_seed.unwrap_or(0),
        model_seed: cfg.model_seed.unwrap_or(0),
        tie,
        authorship: cfg.authorship.to_core(),
    };
    Ok((spec, tie))
}

pub fn write_artifacts(
    out_dir: &Path,
    dataset: &Dataset,
    spec: &StrategySpec,
    output: &RunOutput,
) -> Result<(), CliError> {
    ensure_dir(out_dir)?;
    save_checkpoint(&output.params, &out_dir.join("checkpoint.bin"))?;
    write_text(&out_dir.join("history.csv"), &history_csv(&output.history))?;
    write_dump(&output.test.rows, &out_dir.join("predictions.csv"))?;
    write_splits(dataset, &out_dir.join("splits.jsonl"))?;
    let metrics = MetricsJson {
        strategy: spec.strategy.as_str(),
        selected_epoch: output.history.selected_epoch,
        adam_updates: output.history.adam_updates,
        val: SplitMetricsJson::from_bundle(&output.val),
        test: SplitMetricsJson::from_bundle(&output.test),
    };
    write_text(&out_dir.join("metrics.json"), &render_json(&metrics))
}

pub fn run(config_path: &Path, out_override: Option<&Path>) -> Result<(), CliError> {
    let cfg = TrainConfig::load(config_path)?;
    let out_dir = out_override.unwrap_or(&cfg.output_dir).to_path_buf();

    let dataset = prepare_dataset(&cfg)?;
    let store: EmbeddingStore = build_store(&dataset, &cfg.embeddings)?;
    let (spec, _) = spec_from_config(&cfg)?;

    let output = run_strategy(&dataset, &store, &spec)?;
    write_artifacts(&out_dir, &dataset, &spec, &output)?;

    println!(
        "{}: selected epoch {}, val F1 {:.4}, test F1 {:.4}, artifacts in {}",
        spec.strategy.as_str(),
        output.history.selected_epoch,
        output.val.f1_individual,
        output.test.f1_individual,
        out_dir.display()
    );
    Ok(())
}
