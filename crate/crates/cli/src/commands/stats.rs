//! `stats`: print one summary row for a corpus.

use crate::error::CliError;
use crate::formats::dataset::load_dataset;
use annomod_core::corpus::compute_stats;
use std::path::Path;

pub fn run(
    dataset_path: &Path,
    aux_path: Option<&Path>,
    splits_path: Option<&Path>,
) -> Result<(), CliError> {
    let dataset = load_dataset(dataset_path, aux_path, splits_path)?;
    let stats = compute_stats(&dataset)?;

    let name = dataset_path
        .file_stem()
        .map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().to_string());
    let alpha = stats
        .alpha
        .map_or_else(|| "undefined".to_string(), |a| format!("{a:.3}"));

    println!(
        "{:<20} {:>10} {:>10} {:>12} {:>16} {:>16} {:>10}",
        "dataset", "annotators", "instances", "annotations", "ann/annotator", "ann/instance", "alpha"
    );
    println!(
        "{:<20} {:>10} {:>10} {:>12} {:>16} {:>16} {:>10}",
        name,
        stats.num_annotators,
        stats.num_instances,
        stats.num_annotations,
        format!("{:.1} ± {:.1}", stats.ann_per_annotator_mean, stats.ann_per_annotator_std),
        format!("{:.1} ± {:.1}", stats.ann_per_instance_mean, stats.ann_per_instance_std),
        alpha
    );
    Ok(())
}
