//! Subcommand implementations.

pub mod correlate;
pub mod eval;
pub mod report;
pub mod scale;
pub mod stats;
pub mod synth;
pub mod train;

use crate::config::EmbeddingSource;
use crate::error::{write_err, CliError};
use crate::formats::embedding::load_embedding_file;
use annomod_core::corpus::Dataset;
use annomod_core::encoder::{ensure_coverage, EmbeddingStore};
use std::path::Path;

/// Resolves the embedding source for a dataset.
///
/// A file source must already cover every instance and every referenced
/// auxiliary text; the hasher source encodes all of them from their
/// texts. The two are never mixed, so a run's vectors come from exactly
/// one place.
pub fn build_store(
    dataset: &Dataset,
    source: &EmbeddingSource,
) -> Result<EmbeddingStore, CliError> {
    match source {
        EmbeddingSource::File(path) => {
            let store = load_embedding_file(path)?;
            let check = |id: &str| -> Result<(), CliError> {
                if store.contains(id) {
                    Ok(())
                } else {
                    Err(CliError::Data(format!(
                        "{}: no embedding for '{id}'",
                        path.display()
                    )))
                }
            };
            for id in dataset.instances().keys() {
                check(id)?;
            }
            for annotator in dataset.annotators().values() {
                for tid in &annotator.aux_text_ids {
                    check(tid)?;
                }
            }
            Ok(store)
        }
        EmbeddingSource::Hasher(settings) => {
            let config = settings.to_core();
            let empty = EmbeddingStore::new(config.dim)?;
            ensure_coverage(dataset, &empty, &config).map_err(CliError::from)
        }
    }
}

pub fn ensure_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|e| write_err(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| write_err(path, e))
}
