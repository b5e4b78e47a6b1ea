//! Seeded subsampling of annotators and annotations.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{AnnotationMatrix, Dataset};
use crate::error::CoreError;
use crate::math;
use crate::rng;

/// How annotators are chosen when shrinking the annotator pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubsampleMode {
    /// Uniformly at random from the seeded stream.
    #[default]
    Random,
    /// The `k` annotators with the most annotations, ties broken by id.
    TopByCount,
}

impl SubsampleMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SubsampleMode::Random => "random",
            SubsampleMode::TopByCount => "top",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CoreError> {
        match s {
            "random" => Ok(SubsampleMode::Random),
            "top" => Ok(SubsampleMode::TopByCount),
            other => Err(CoreError::InvalidConfig(alloc::format!(
                "unknown subsample mode '{other}'"
            ))),
        }
    }
}

/// Keeps `k` annotators and their annotations. Instances left without any
/// annotation are dropped, along with their split assignments; auxiliary
/// texts are kept only if a retained annotator references them.
pub fn subsample_annotators(
    dataset: &Dataset,
    k: usize,
    mode: SubsampleMode,
    seed: u64,
) -> Result<Dataset, CoreError> {
    let total = dataset.annotators().len();
    if k == 0 || k > total {
        return Err(CoreError::InvalidConfig(alloc::format!(
            "cannot keep {k} of {total} annotators"
        )));
    }

    let ids: Vec<&String> = dataset.annotators().keys().collect();
    let chosen: BTreeSet<String> = match mode {
        SubsampleMode::Random => {
            let mut gen = rng::seeded(seed);
            rng::sample_indices(&mut gen, total, k)
                .into_iter()
                .map(|i| ids[i].clone())
                .collect()
        }
        SubsampleMode::TopByCount => {
            let counts = dataset.matrix().annotator_counts();
            let mut ranked: Vec<(usize, &String)> = ids
                .iter()
                .map(|id| (counts.get(*id).copied().unwrap_or(0), *id))
                .collect();
            // Highest count first, then lexicographic id.
            ranked.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
            ranked.into_iter().take(k).map(|(_, id)| id.clone()).collect()
        }
    };

    let matrix = dataset.matrix().restrict_to_annotators(&chosen);
    rebuild(dataset, matrix, Some(&chosen))
}

/// Keeps a per-annotator fraction of annotations: every annotator retains
/// `max(1, floor(fraction * count))` of their annotations, chosen from
/// the seeded stream. Instances left without annotations are dropped.
pub fn subsample_annotations(
    dataset: &Dataset,
    fraction: f64,
    seed: u64,
) -> Result<Dataset, CoreError> {
    if !fraction.is_finite() || fraction <= 0.0 || fraction > 1.0 {
        return Err(CoreError::InvalidConfig(alloc::format!(
            "annotation fraction {fraction} outside (0, 1]"
        )));
    }

    // Group each annotator's annotations in sorted instance order.
    let mut per_annotator: BTreeMap<&str, Vec<(&str, u8)>> = BTreeMap::new();
    for (i, a, l) in dataset.matrix().iter() {
        per_annotator.entry(a).or_default().push((i, l));
    }

    let mut gen = rng::seeded(seed);
    let mut matrix = AnnotationMatrix::new();
    for (a, anns) in &per_annotator {
        let keep = math::floor_guarded(fraction * anns.len() as f64).max(1);
        let picked = rng::sample_indices(&mut gen, anns.len(), keep);
        let mut picked = picked;
        picked.sort_unstable();
        for idx in picked {
            let (i, l) = anns[idx];
            matrix.insert(i, a, l)?;
        }
    }
    rebuild(dataset, matrix, None)
}

/// Assembles a dataset around a reduced annotation matrix, dropping
/// unannotated instances and unreferenced auxiliary texts.
fn rebuild(
    dataset: &Dataset,
    matrix: AnnotationMatrix,
    annotators: Option<&BTreeSet<String>>,
) -> Result<Dataset, CoreError> {
    let keep_instances: BTreeSet<&str> = matrix.instance_ids().collect();
    let instances: Vec<_> = dataset
        .instances()
        .values()
        .filter(|i| keep_instances.contains(i.id.as_str()))
        .cloned()
        .collect();
    let kept_annotators: Vec<_> = dataset
        .annotators()
        .values()
        .filter(|a| annotators.is_none_or(|set| set.contains(&a.id)))
        .cloned()
        .collect();
    let aux_texts: BTreeMap<String, String> = {
        let referenced: BTreeSet<&str> = kept_annotators
            .iter()
            .flat_map(|a| a.aux_text_ids.iter().map(String::as_str))
            .collect();
        dataset
            .aux_texts()
            .iter()
            .filter(|(id, _)| referenced.contains(id.as_str()))
            .map(|(id, t)| (id.clone(), t.clone()))
            .collect()
    };
    let splits = dataset.splits().map(|s| {
        s.iter()
            .filter(|(id, _)| keep_instances.contains(id.as_str()))
            .map(|(id, &sp)| (id.clone(), sp))
            .collect()
    });
    Dataset::new(instances, kept_annotators, matrix, splits, aux_texts)
}
