//! Synthetic corpora with planted annotator disagreement.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{AnnotationMatrix, Annotator, Dataset, Instance};
use crate::encoder::EmbeddingStore;
use crate::error::CoreError;
use crate::math;
use crate::rng;

/// Configuration for [`generate_synthetic`].
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub num_annotators: usize,
    pub num_instances: usize,
    pub embedding_dim: usize,
    /// Fraction of annotators that follow a second, conflicting concept.
    pub contrarian_fraction: f64,
    /// Probability that any single annotation is flipped.
    pub noise_rate: f64,
    /// Exact number of annotators assigned to each instance.
    pub annotations_per_instance: usize,
    pub seed: u64,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), CoreError> {
        if self.num_annotators == 0 || self.num_annotators > 10_000 {
            return Err(CoreError::InvalidConfig(alloc::format!(
                "num_annotators {} outside 1..=10000",
                self.num_annotators
            )));
        }
        if self.num_instances == 0 || self.num_instances > 100_000 {
            return Err(CoreError::InvalidConfig(alloc::format!(
                "num_instances {} outside 1..=100000",
                self.num_instances
            )));
        }
        if self.embedding_dim < 2 {
            return Err(CoreError::InvalidConfig(alloc::format!(
                "embedding_dim {} below 2",
                self.embedding_dim
            )));
        }
        if !(0.0..=1.0).contains(&self.contrarian_fraction)
            || !self.contrarian_fraction.is_finite()
        {
            return Err(CoreError::InvalidConfig(alloc::format!(
                "contrarian_fraction {} outside [0, 1]",
                self.contrarian_fraction
            )));
        }
        if !(0.0..=1.0).contains(&self.noise_rate) || !self.noise_rate.is_finite() {
            return Err(CoreError::InvalidConfig(alloc::format!(
                "noise_rate {} outside [0, 1]",
                self.noise_rate
            )));
        }
        if self.annotations_per_instance == 0
            || self.annotations_per_instance > self.num_annotators
        {
            return Err(CoreError::InvalidConfig(alloc::format!(
                "annotations_per_instance {} outside 1..=num_annotators",
                self.annotations_per_instance
            )));
        }
        Ok(())
    }
}

/// Generates a corpus with a planted structure.
///
/// Instance vectors are standard normal draws. A base concept vector
/// labels each instance by the sign of its dot product; a disjoint
/// contrarian concept flips the label for contrarian annotators on the
/// instances it selects, so contrarians disagree with the majority in a
/// text-dependent, learnable way. Independent label noise is applied
/// last. Annotator assignment is round robin over a seeded permutation,
/// giving every instance exactly `annotations_per_instance` annotators
/// and near-uniform per-annotator load.
///
/// The first `floor(contrarian_fraction * num_annotators)` annotator
/// indices are the contrarians. All randomness comes from one ChaCha20
/// stream seeded by `config.seed`, so equal configs give bit-identical
/// corpora and embeddings.
pub fn generate_synthetic(
    config: &SynthConfig,
) -> Result<(Dataset, EmbeddingStore), CoreError> {
    config.validate()?;
    let a = config.num_annotators;
    let n = config.num_instances;
    let dim = config.embedding_dim;
    let mut gen = rng::seeded(config.seed);

    let draw_vec = |gen: &mut rand_chacha::ChaCha20Rng| -> Vec<f32> {
        (0..dim).map(|_| rng::standard_normal(gen) as f32).collect()
    };
    let w_base = draw_vec(&mut gen);
    let w_contra = draw_vec(&mut gen);

    let mut store = EmbeddingStore::new(dim)?;
    let mut instances = Vec::with_capacity(n);
    let mut vectors: Vec<Vec<f32>> = Vec::with_capacity(n);
    for i in 0..n {
        let id = alloc::format!("i{i:05}");
        let v = draw_vec(&mut gen);
        store.insert(&id, v.clone())?;
        vectors.push(v);
        instances.push(Instance {
            id,
            text: String::new(),
        });
    }

    let mut perm: Vec<usize> = (0..a).collect();
    rng::shuffle(&mut gen, &mut perm);

    let n_contrarian = math::floor_guarded(config.contrarian_fraction * a as f64).min(a);
    let annotator_id = |idx: usize| alloc::format!("a{idx:04}");

    let dot = |w: &[f32], x: &[f32]| -> f64 {
        w.iter()
            .zip(x)
            .map(|(&wi, &xi)| wi as f64 * xi as f64)
            .sum()
    };

    let mut matrix = AnnotationMatrix::new();
    for (i, inst) in instances.iter().enumerate() {
        let x = &vectors[i];
        let base_label = u8::from(dot(&w_base, x) > 0.0);
        let contra_active = dot(&w_contra, x) > 0.0;
        for s in 0..config.annotations_per_instance {
            let idx = perm[(i * config.annotations_per_instance + s) % a];
            let mut label = base_label;
            if idx < n_contrarian && contra_active {
                label ^= 1;
            }
            let noise: f64 = rand::Rng::gen(&mut gen);
            if noise < config.noise_rate {
                label ^= 1;
            }
            matrix.insert(&inst.id, &annotator_id(idx), label)?;
        }
    }

    let annotators: Vec<Annotator> = (0..a)
        .map(|idx| Annotator {
            id: annotator_id(idx),
            aux_text_ids: Vec::new(),
        })
        .collect();
    let dataset = Dataset::new(instances, annotators, matrix, None, BTreeMap::new())?;
    Ok((dataset, store))
}
