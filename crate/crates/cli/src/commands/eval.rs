//! `eval`: score a saved checkpoint on one split of the configured
//! corpus.

use crate::commands::{build_store, write_text};
use crate::commands::train::{render_json, SplitMetricsJson};
use crate::config::TrainConfig;
use crate::error::CliError;
use crate::formats::checkpoint::load_checkpoint;
use crate::formats::dataset::load_dataset;
use annomod_core::corpus::{split_dataset, Split};
use annomod_core::trainer::evaluate;
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
struct EvalJson {
    split: &'static str,
    strategy: &'static str,
    metrics: SplitMetricsJson,
}

pub fn run(
    checkpoint_path: &Path,
    split_name: &str,
    config_path: &Path,
    splits_override: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let split = Split::parse(split_name)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let cfg = TrainConfig::load(config_path)?;

    // The splits must reproduce the training partition: an explicit
    // sidecar wins, otherwise the config's seeded ratio split.
    let splits_path = splits_override.or(cfg.splits.as_deref());
    let dataset = load_dataset(&cfg.dataset, cfg.aux_texts.as_deref(), splits_path)?;
    let dataset = if dataset.splits().is_some() {
        dataset
    } else {
        let ratios = cfg
            .split_ratios
            .unwrap_or(crate::config::DEFAULT_SPLIT_RATIOS);
        split_dataset(&dataset, ratios, cfg.split_seed.unwrap_or(0))?
    };

    let store = build_store(&dataset, &cfg.embeddings)?;
    let params = load_checkpoint(checkpoint_path)?;
    let tie = crate::config::parse_tie_rule(cfg.tie_rule.as_deref().unwrap_or("positive"))?;

    let bundle = evaluate(&params, &dataset, &store, split, tie)?;
    let rendered = render_json(&EvalJson {
        split: split.as_str(),
        strategy: params.strategy().as_str(),
        metrics: SplitMetricsJson::from_bundle(&bundle),
    });
    print!("{rendered}");
    if let Some(path) = out {
        write_text(path, &rendered)?;
    }
    Ok(())
}
