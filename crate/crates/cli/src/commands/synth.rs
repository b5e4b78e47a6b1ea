//! `synth`: generate a synthetic corpus and its embedding file.

use crate::commands::ensure_dir;
use crate::config::SynthFileConfig;
use crate::error::CliError;
use crate::formats::dataset::write_dataset;
use crate::formats::embedding::write_embedding_file;
use annomod_core::corpus::generate_synthetic;
use std::path::Path;

pub fn run(config_path: &Path, out_override: Option<&Path>) -> Result<(), CliError> {
    let cfg = SynthFileConfig::load(config_path)?;
    let out_dir = out_override.unwrap_or(&cfg.output_dir);
    let (dataset, store) = generate_synthetic(&cfg.to_core())?;

    ensure_dir(out_dir)?;
    let dataset_path = out_dir.join("dataset.jsonl");
    let embeddings_path = out_dir.join("embeddings.aemb");
    write_dataset(&dataset, &dataset_path)?;
    write_embedding_file(&store, &embeddings_path)?;

    println!(
        "wrote {} ({} instances, {} annotators, {} annotations) and {}",
        dataset_path.display(),
        dataset.instances().len(),
        dataset.annotators().len(),
        dataset.matrix().len(),
        embeddings_path.display()
    );
    Ok(())
}
