//! Annotator representation strategies.
//!
//! A strategy decides what, if anything, the classifier is told about the
//! annotator whose judgment it predicts. User tokens start from random
//! draws; the other representations are computed here from the corpus and
//! injected as starting values. Both kinds are model parameters once
//! injected and keep training with the classifier. The multi-task
//! strategy injects nothing into the input and instead gives each
//! annotator an output head.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::{Dataset, Split};
use crate::encoder::EmbeddingStore;
use crate::error::CoreError;
use crate::math;
use crate::rng;
use crate::trainer::AdamOptimizer;

/// Standard deviation of user-token initialization.
const USER_TOKEN_INIT_STD: f64 = 0.02;

/// How annotator identity conditions the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Strategy {
    /// Annotator-blind baseline.
    None,
    /// Trainable per-annotator embedding concatenated to the input.
    UserToken,
    /// Label-history embedding initialized from the annotator's mean
    /// positive and mean negative train instance embeddings, concatenated.
    Composite,
    /// Composite embedding plus a trainable user token.
    CompositeUser,
    /// Representation initialized from the mean embedding of the
    /// annotator's own texts.
    AveragedText,
    /// Representation initialized from an authorship profile: the mean
    /// predicted annotator distribution of an authorship classifier over
    /// the annotator's texts.
    Authorship,
    /// Shared trunk with one output head per annotator.
    MultiTask,
}

impl Strategy {
    pub const ALL: [Strategy; 7] = [
        Strategy::None,
        Strategy::UserToken,
        Strategy::Composite,
        Strategy::CompositeUser,
        Strategy::AveragedText,
        Strategy::Authorship,
        Strategy::MultiTask,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::None => "none",
            Strategy::UserToken => "user_token",
            Strategy::Composite => "composite",
            Strategy::CompositeUser => "composite_user",
            Strategy::AveragedText => "averaged_text",
            Strategy::Authorship => "authorship",
            Strategy::MultiTask => "multi_task",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CoreError> {
        Strategy::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| {
                CoreError::InvalidConfig(alloc::format!("unknown strategy '{s}'"))
            })
    }

    /// Whether the model input carries a trainable user-token slot.
    pub fn uses_user_slot(self) -> bool {
        matches!(self, Strategy::UserToken | Strategy::CompositeUser)
    }

    /// Whether the model input carries a corpus-derived representation
    /// slot.
    pub fn uses_fixed_slot(self) -> bool {
        matches!(
            self,
            Strategy::Composite
                | Strategy::CompositeUser
                | Strategy::AveragedText
                | Strategy::Authorship
        )
    }

    pub fn is_multi_task(self) -> bool {
        matches!(self, Strategy::MultiTask)
    }
}

/// Per-annotator representation initializations for one strategy, in
/// sorted annotator order. `user_init` seeds the user-token slot and
/// `fixed_init` the corpus-derived slot; both become trainable model
/// parameters on injection. Either may be empty depending on the
/// strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatorTable {
    pub strategy: Strategy,
    pub annotator_ids: Vec<String>,
    pub user_dim: usize,
    pub fixed_dim: usize,
    pub user_init: Vec<f64>,
    pub fixed_init: Vec<f64>,
}

impl AnnotatorTable {
    pub fn len(&self) -> usize {
        self.annotator_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.annotator_ids.is_empty()
    }

    pub fn index_of(&self, annotator_id: &str) -> Option<usize> {
        self.annotator_ids
            .binary_search_by(|probe| probe.as_str().cmp(annotator_id))
            .ok()
    }

    pub fn fixed_slice(&self, idx: usize) -> &[f64] {
        &self.fixed_init[idx * self.fixed_dim..(idx + 1) * self.fixed_dim]
    }

    pub fn user_slice(&self, idx: usize) -> &[f64] {
        &self.user_init[idx * self.user_dim..(idx + 1) * self.user_dim]
    }
}

/// Draws initial user tokens, one `dim`-vector per annotator in the given
/// order, from N(0, 0.02^2).
pub fn init_user_tokens(annotator_ids: &[String], dim: usize, seed: u64) -> Vec<f64> {
    let mut gen = rng::seeded(seed);
    let mut out = Vec::with_capacity(annotator_ids.len() * dim);
    for _ in annotator_ids {
        for _ in 0..dim {
            out.push(USER_TOKEN_INIT_STD * rng::standard_normal(&mut gen));
        }
    }
    out
}

fn mean_of(ids: &BTreeSet<&str>, store: &EmbeddingStore) -> Option<Vec<f64>> {
    if ids.is_empty() {
        return None;
    }
    let mut acc = vec![0.0f64; store.dim()];
    for id in ids {
        let v = store.get(id).expect("coverage checked by caller");
        for (a, &x) in acc.iter_mut().zip(v) {
            *a += x as f64;
        }
    }
    let n = ids.len() as f64;
    for a in &mut acc {
        *a /= n;
    }
    Some(acc)
}

/// Label-history composite embeddings.
///
/// For each annotator, the mean embedding of train instances they labeled
/// positive and the mean of those they labeled negative, concatenated
/// in that order. An empty class falls back to the mean over all train
/// instances the annotator labeled; an annotator with no train
/// annotations at all falls back to the mean over every train instance
/// on both halves. Only train-split instances ever contribute, so the
/// representation leaks nothing from validation or test.
pub fn compute_composite(
    dataset: &Dataset,
    store: &EmbeddingStore,
) -> Result<BTreeMap<String, Vec<f64>>, CoreError> {
    if dataset.splits().is_none() {
        return Err(CoreError::InvalidData(
            "composite embeddings need split assignments".to_string(),
        ));
    }
    let train: BTreeSet<&str> = dataset
        .split_instance_ids(Split::Train)
        .into_iter()
        .collect();
    if train.is_empty() {
        return Err(CoreError::EmptySplit("train"));
    }
    for id in &train {
        if !store.contains(id) {
            return Err(CoreError::MissingEmbedding(id.to_string()));
        }
    }
    let global = mean_of(&train, store).expect("train split is non-empty");

    let mut out = BTreeMap::new();
    for annotator in dataset.annotators().keys() {
        let mut pos: BTreeSet<&str> = BTreeSet::new();
        let mut neg: BTreeSet<&str> = BTreeSet::new();
        let mut any: BTreeSet<&str> = BTreeSet::new();
        for instance in &train {
            if let Some(label) = dataset.matrix().get(instance, annotator) {
                any.insert(instance);
                if label == 1 {
                    pos.insert(instance);
                } else {
                    neg.insert(instance);
                }
            }
        }
        let fallback = mean_of(&any, store).unwrap_or_else(|| global.clone());
        let pos_mean = mean_of(&pos, store).unwrap_or_else(|| fallback.clone());
        let neg_mean = mean_of(&neg, store).unwrap_or_else(|| fallback.clone());
        let mut v = pos_mean;
        v.extend_from_slice(&neg_mean);
        out.insert(annotator.clone(), v);
    }
    Ok(out)
}

/// Mean embedding of each annotator's own texts; a zero vector when the
/// annotator has none.
pub fn averaged_text_embedding(
    dataset: &Dataset,
    store: &EmbeddingStore,
) -> Result<BTreeMap<String, Vec<f64>>, CoreError> {
    let mut out = BTreeMap::new();
    for (id, annotator) in dataset.annotators() {
        let texts: BTreeSet<&str> = annotator
            .aux_text_ids
            .iter()
            .map(String::as_str)
            .collect();
        for t in &texts {
            if !store.contains(t) {
                return Err(CoreError::MissingEmbedding(t.to_string()));
            }
        }
        let v = mean_of(&texts, store).unwrap_or_else(|| vec![0.0; store.dim()]);
        out.insert(id.clone(), v);
    }
    Ok(out)
}

/// Settings for the authorship classifier behind
/// [`authorship_reprs`].
#[derive(Debug, Clone, PartialEq)]
pub struct AuthorshipConfig {
    pub hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
}

impl Default for AuthorshipConfig {
    fn default() -> Self {
        AuthorshipConfig {
            hidden: 128,
            epochs: 10,
            learning_rate: 1e-3,
            batch_size: 32,
        }
    }
}

impl AuthorshipConfig {
    pub fn validate(&self) -> Result<(), CoreError> {
        if self.hidden == 0 {
            return Err(CoreError::InvalidConfig(
                "authorship hidden width must be positive".to_string(),
            ));
        }
        if self.batch_size == 0 {
            return Err(CoreError::InvalidConfig(
                "authorship batch size must be positive".to_string(),
            ));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(CoreError::InvalidConfig(
                "authorship learning rate must be positive".to_string(),
            ));
        }
        Ok(())
    }
}

/// Authorship-based annotator profiles.
///
/// Trains a two-layer softmax classifier (tanh hidden layer) to predict
/// which annotator wrote each auxiliary text, then represents every
/// annotator by the mean predicted annotator distribution over their own
/// texts. An annotator without texts gets the uniform distribution. With
/// no auxiliary texts anywhere, training is skipped and all annotators
/// are uniform.
pub fn authorship_reprs(
    dataset: &Dataset,
    store: &EmbeddingStore,
    config: &AuthorshipConfig,
    seed: u64,
) -> Result<BTreeMap<String, Vec<f64>>, CoreError> {
    config.validate()?;
    let ids: Vec<&String> = dataset.annotators().keys().collect();
    let k = ids.len();
    if k == 0 {
        return Ok(BTreeMap::new());
    }

    // (embedding, author index) pairs in sorted annotator and text order.
    let mut pairs: Vec<(Vec<f64>, usize)> = Vec::new();
    for (j, id) in ids.iter().enumerate() {
        let mut text_ids: Vec<&String> = dataset.annotators()[*id].aux_text_ids.iter().collect();
        text_ids.sort_unstable();
        text_ids.dedup();
        for t in text_ids {
            let v = store
                .get_f64(t)
                .ok_or_else(|| CoreError::MissingEmbedding(t.clone()))?;
            pairs.push((v, j));
        }
    }

    let uniform = vec![1.0 / k as f64; k];
    if pairs.is_empty() {
        return Ok(ids
            .iter()
            .map(|id| ((*id).clone(), uniform.clone()))
            .collect());
    }

    let d = store.dim();
    let h = config.hidden;
    let mut gen = rng::seeded(seed);
    let w1_scale = 1.0 / math::sqrt(d as f64);
    let w2_scale = 1.0 / math::sqrt(h as f64);
    let mut w1: Vec<f64> = (0..h * d)
        .map(|_| w1_scale * rng::standard_normal(&mut gen))
        .collect();
    let mut b1 = vec![0.0f64; h];
    let mut w2: Vec<f64> = (0..k * h)
        .map(|_| w2_scale * rng::standard_normal(&mut gen))
        .collect();
    let mut b2 = vec![0.0f64; k];

    let forward = |x: &[f64], w1: &[f64], b1: &[f64], w2: &[f64], b2: &[f64]| {
        let mut a1 = vec![0.0f64; h];
        for row in 0..h {
            let mut z = b1[row];
            let base = row * d;
            for (col, &xv) in x.iter().enumerate() {
                z += w1[base + col] * xv;
            }
            a1[row] = math::tanh(z);
        }
        let mut logits = vec![0.0f64; k];
        for row in 0..k {
            let mut z = b2[row];
            let base = row * h;
            for (col, &av) in a1.iter().enumerate() {
                z += w2[base + col] * av;
            }
            logits[row] = z;
        }
        (a1, logits)
    };

    let softmax = |logits: &[f64]| -> Vec<f64> {
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|&z| math::exp(z - max)).collect();
        let sum: f64 = exps.iter().sum();
        exps.into_iter().map(|e| e / sum).collect()
    };

    let mut adam = AdamOptimizer::new(
        config.learning_rate,
        0.9,
        0.999,
        1e-8,
        &[h * d, h, k * h, k],
    );
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    for _ in 0..config.epochs {
        rng::shuffle(&mut gen, &mut order);
        for chunk in order.chunks(config.batch_size) {
            let bs = chunk.len() as f64;
            let mut gw1 = vec![0.0f64; h * d];
            let mut gb1 = vec![0.0f64; h];
            let mut gw2 = vec![0.0f64; k * h];
            let mut gb2 = vec![0.0f64; k];
            for &p in chunk {
                let (x, target) = (&pairs[p].0, pairs[p].1);
                let (a1, logits) = forward(x, &w1, &b1, &w2, &b2);
                let probs = softmax(&logits);
                // d(cross entropy)/d(logit) averaged over the batch.
                let mut da1 = vec![0.0f64; h];
                for row in 0..k {
                    let mut dz = probs[row] / bs;
                    if row == target {
                        dz -= 1.0 / bs;
                    }
                    gb2[row] += dz;
                    let base = row * h;
                    for col in 0..h {
                        gw2[base + col] += dz * a1[col];
                        da1[col] += dz * w2[base + col];
                    }
                }
                for row in 0..h {
                    let dz1 = da1[row] * (1.0 - a1[row] * a1[row]);
                    gb1[row] += dz1;
                    let base = row * d;
                    for (col, &xv) in x.iter().enumerate() {
                        gw1[base + col] += dz1 * xv;
                    }
                }
            }
            adam.step(
                &mut [
                    w1.as_mut_slice(),
                    b1.as_mut_slice(),
                    w2.as_mut_slice(),
                    b2.as_mut_slice(),
                ],
                &[&gw1, &gb1, &gw2, &gb2],
            );
        }
    }

    let mut sums: Vec<Vec<f64>> = vec![vec![0.0; k]; k];
    let mut counts = vec![0usize; k];
    for (x, j) in &pairs {
        let (_, logits) = forward(x, &w1, &b1, &w2, &b2);
        let probs = softmax(&logits);
        for (acc, p) in sums[*j].iter_mut().zip(&probs) {
            *acc += p;
        }
        counts[*j] += 1;
    }

    let mut out = BTreeMap::new();
    for (j, id) in ids.iter().enumerate() {
        let v = if counts[j] == 0 {
            uniform.clone()
        } else {
            sums[j].iter().map(|s| s / counts[j] as f64).collect()
        };
        out.insert((*id).clone(), v);
    }
    Ok(out)
}

/// Builds the [`AnnotatorTable`] for a strategy. `seed` feeds user-token
/// initialization and authorship training through derived child seeds;
/// `user_dim` is only consulted for strategies with a trainable slot.
pub fn build_table(
    strategy: Strategy,
    dataset: &Dataset,
    store: &EmbeddingStore,
    user_dim: usize,
    authorship: &AuthorshipConfig,
    seed: u64,
) -> Result<AnnotatorTable, CoreError> {
    let annotator_ids: Vec<String> = dataset.annotators().keys().cloned().collect();

    let (user_dim, user_init) = if strategy.uses_user_slot() {
        if user_dim == 0 {
            return Err(CoreError::InvalidConfig(
                "user token dimension must be positive".to_string(),
            ));
        }
        let init = init_user_tokens(&annotator_ids, user_dim, rng::derive_seed(seed, "user_tokens"));
        (user_dim, init)
    } else {
        (0, Vec::new())
    };

    let (fixed_dim, fixed_init) = if strategy.uses_fixed_slot() {
        let map = match strategy {
            Strategy::Composite | Strategy::CompositeUser => compute_composite(dataset, store)?,
            Strategy::AveragedText => averaged_text_embedding(dataset, store)?,
            Strategy::Authorship => authorship_reprs(
                dataset,
                store,
                authorship,
                rng::derive_seed(seed, "authorship"),
            )?,
            _ => unreachable!(),
        };
        let dim = map.values().next().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(annotator_ids.len() * dim);
        for id in &annotator_ids {
            flat.extend_from_slice(&map[id]);
        }
        (dim, flat)
    } else {
        (0, Vec::new())
    };

    Ok(AnnotatorTable {
        strategy,
        annotator_ids,
        user_dim,
        fixed_dim,
        user_init,
        fixed_init,
    })
}
