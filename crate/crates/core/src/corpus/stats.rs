//! Corpus-level summary statistics.

use crate::corpus::{krippendorff_alpha, Dataset};
use crate::error::CoreError;
use crate::math;

/// Summary of a corpus: sizes, annotation density, and agreement.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub num_annotators: usize,
    pub num_instances: usize,
    pub num_annotations: usize,
    /// Mean and population standard deviation of annotations per
    /// annotator.
    pub ann_per_annotator_mean: f64,
    pub ann_per_annotator_std: f64,
    /// Mean and population standard deviation of annotations per
    /// instance.
    pub ann_per_instance_mean: f64,
    pub ann_per_instance_std: f64,
    /// Krippendorff's alpha; `None` when agreement is undefined or no
    /// instance has two annotations.
    pub alpha: Option<f64>,
}

/// Computes [`CorpusStats`]. Errors if the dataset carries no
/// annotations at all.
pub fn compute_stats(dataset: &Dataset) -> Result<CorpusStats, CoreError> {
    let matrix = dataset.matrix();
    if matrix.is_empty() {
        return Err(CoreError::NoAnnotations);
    }

    let counts = matrix.annotator_counts();
    let per_annotator: alloc::vec::Vec<f64> = dataset
        .annotators()
        .keys()
        .map(|a| counts.get(a).copied().unwrap_or(0) as f64)
        .collect();
    let per_instance: alloc::vec::Vec<f64> = dataset
        .instances()
        .keys()
        .map(|i| matrix.degree(i) as f64)
        .collect();

    let (apa_mean, apa_std) = math::mean_std(&per_annotator);
    let (api_mean, api_std) = math::mean_std(&per_instance);

    let alpha = match krippendorff_alpha(matrix) {
        Ok(a) => Some(a),
        Err(CoreError::NoPairableInstances) | Err(CoreError::AgreementUndefined) => None,
        Err(e) => return Err(e),
    };

    Ok(CorpusStats {
        num_annotators: dataset.annotators().len(),
        num_instances: dataset.instances().len(),
        num_annotations: matrix.len(),
        ann_per_annotator_mean: apa_mean,
        ann_per_annotator_std: apa_std,
        ann_per_instance_mean: api_mean,
        ann_per_instance_std: api_std,
        alpha,
    })
}
