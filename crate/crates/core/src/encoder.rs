//! Instance encoding: precomputed embedding stores and a seeded hashing
//! text encoder.
//!
//! Models consume fixed vectors, never raw text. Vectors normally come
//! from an [`EmbeddingStore`] filled by an external encoder; when a
//! vector is missing, [`hash_encode`] derives one from the text itself
//! with signed feature hashing, so any corpus stays usable without
//! external models.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::Dataset;
use crate::error::CoreError;
use crate::math;
use crate::rng;

/// Fixed-dimension id-to-vector map. Vectors are stored as `f32` and
/// widened on read, matching on-disk embedding formats exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    dim: usize,
    vectors: BTreeMap<String, Vec<f32>>,
}

impl EmbeddingStore {
    pub fn new(dim: usize) -> Result<Self, CoreError> {
        if dim == 0 {
            return Err(CoreError::InvalidConfig(
                "embedding dimension must be positive".to_string(),
            ));
        }
        Ok(EmbeddingStore {
            dim,
            vectors: BTreeMap::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.vectors.contains_key(id)
    }

    /// Adds a vector. Rejects empty ids, repeated ids, wrong dimensions,
    /// and non-finite components.
    pub fn insert(&mut self, id: &str, vector: Vec<f32>) -> Result<(), CoreError> {
        if id.is_empty() {
            return Err(CoreError::InvalidData("empty embedding id".to_string()));
        }
        if vector.len() != self.dim {
            return Err(CoreError::DimensionMismatch {
                what: "embedding vector",
                expected: self.dim,
                got: vector.len(),
            });
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidData(alloc::format!(
                "non-finite embedding component for '{id}'"
            )));
        }
        if self.vectors.contains_key(id) {
            return Err(CoreError::InvalidData(alloc::format!(
                "duplicate embedding id '{id}'"
            )));
        }
        self.vectors.insert(id.to_string(), vector);
        Ok(())
    }

    /// Adds a vector given in `f64`, narrowing each component.
    pub fn insert_f64(&mut self, id: &str, vector: &[f64]) -> Result<(), CoreError> {
        self.insert(id, vector.iter().map(|&v| v as f32).collect())
    }

    pub fn get(&self, id: &str) -> Option<&[f32]> {
        self.vectors.get(id).map(Vec::as_slice)
    }

    /// Vector widened to `f64` for numeric work.
    pub fn get_f64(&self, id: &str) -> Option<Vec<f64>> {
        self.vectors
            .get(id)
            .map(|v| v.iter().map(|&x| x as f64).collect())
    }

    /// Ids in sorted order.
    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.vectors.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.vectors.iter().map(|(id, v)| (id.as_str(), v.as_slice()))
    }
}

/// Settings for [`hash_encode`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashEncoderConfig {
    /// Output dimension, at least 8.
    pub dim: usize,
    /// Seed mixed into every feature hash.
    pub seed: u64,
    /// Which n-gram orders to extract; subset of {1, 2}, non-empty.
    pub ngram_orders: Vec<u8>,
}

impl Default for HashEncoderConfig {
    fn default() -> Self {
        HashEncoderConfig {
            dim: 256,
            seed: 0,
            ngram_orders: vec![1, 2],
        }
    }
}

impl HashEncoderConfig {
    pub fn validate(&self) -> Result<(), CoreError> {
        if self.dim < 8 {
            return Err(CoreError::InvalidConfig(alloc::format!(
                "hash encoder dimension {} below 8",
                self.dim
            )));
        }
        if self.ngram_orders.is_empty() {
            return Err(CoreError::InvalidConfig(
                "ngram_orders must not be empty".to_string(),
            ));
        }
        let mut seen = [false; 3];
        for &o in &self.ngram_orders {
            if o != 1 && o != 2 {
                return Err(CoreError::InvalidConfig(alloc::format!(
                    "ngram order {o} not in {{1, 2}}"
                )));
            }
            if seen[o as usize] {
                return Err(CoreError::InvalidConfig(alloc::format!(
                    "ngram order {o} repeated"
                )));
            }
            seen[o as usize] = true;
        }
        Ok(())
    }

    fn wants(&self, order: u8) -> bool {
        self.ngram_orders.contains(&order)
    }
}

/// Encodes text into a deterministic L2-normalized vector with signed
/// feature hashing.
///
/// Tokens are whitespace-split and lowercased. Each selected n-gram is
/// hashed (seeded FNV-1a); the hash picks a bucket and a sign, and the
/// accumulated vector is L2-normalized. The result has unit norm unless
/// no feature survives (empty or all-cancelling text), in which case it
/// is exactly zero. Word order matters whenever bigrams are enabled.
///
/// The configuration must be valid (see [`HashEncoderConfig::validate`]);
/// this function panics on an invalid one.
pub fn hash_encode(text: &str, config: &HashEncoderConfig) -> Vec<f64> {
    config
        .validate()
        .expect("hash_encode requires a validated config");

    let tokens: Vec<String> = text
        .split_whitespace()
        .map(|t| t.to_lowercase())
        .collect();
    let mut acc = vec![0.0f64; config.dim];
    if tokens.is_empty() {
        return acc;
    }

    let base = rng::splitmix64(config.seed ^ 0x6861_7368);
    let bump = |h: u64, acc: &mut [f64]| {
        let bucket = ((h >> 1) % config.dim as u64) as usize;
        let sign = if h & 1 == 1 { 1.0 } else { -1.0 };
        acc[bucket] += sign;
    };

    if config.wants(1) {
        for t in &tokens {
            let h = rng::fnv1a64_update(base ^ 0x01, t.as_bytes());
            bump(h, &mut acc);
        }
    }
    if config.wants(2) {
        for pair in tokens.windows(2) {
            let mut h = rng::fnv1a64_update(base ^ 0x02, pair[0].as_bytes());
            h = rng::fnv1a64_update(h, &[0x1f]);
            h = rng::fnv1a64_update(h, pair[1].as_bytes());
            bump(h, &mut acc);
        }
    }

    let norm = math::sqrt(acc.iter().map(|v| v * v).sum());
    if norm > 0.0 {
        for v in &mut acc {
            *v /= norm;
        }
    }
    acc
}

/// Ensures every instance and referenced auxiliary text has a vector.
///
/// Returns a store extending `base`: ids already present keep their
/// vectors bit for bit; missing ids are filled by hashing their text.
/// An id with no stored vector and no text is an error naming the id.
pub fn ensure_coverage(
    dataset: &Dataset,
    base: &EmbeddingStore,
    config: &HashEncoderConfig,
) -> Result<EmbeddingStore, CoreError> {
    config.validate()?;
    if base.dim() != config.dim && !base.is_empty() {
        return Err(CoreError::DimensionMismatch {
            what: "hash encoder output",
            expected: base.dim(),
            got: config.dim,
        });
    }
    let mut out = base.clone();

    let fill = |id: &str, text: &str, out: &mut EmbeddingStore| -> Result<(), CoreError> {
        if out.contains(id) {
            return Ok(());
        }
        if text.trim().is_empty() {
            return Err(CoreError::MissingEmbedding(id.to_string()));
        }
        out.insert_f64(id, &hash_encode(text, config))
    };

    for inst in dataset.instances().values() {
        fill(&inst.id, &inst.text, &mut out)?;
    }
    for annotator in dataset.annotators().values() {
        for tid in &annotator.aux_text_ids {
            let text = dataset
                .aux_texts()
                .get(tid)
                .expect("dataset validation resolves aux text ids");
            fill(tid, text, &mut out)?;
        }
    }
    Ok(out)
}
