//! Deterministic mini-batch training with Adam and early stopping.
//!
//! Training shuffles with a ChaCha20 stream seeded from the hyperparams,
//! evaluates individual macro-F1 on the validation split after every
//! epoch, keeps the parameters of the best epoch (earliest on ties), and
//! stops once no strict improvement has been seen for `patience` epochs.
//! The returned parameters are always the best-epoch snapshot.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::{Dataset, Split, TieRule};
use crate::encoder::EmbeddingStore;
use crate::error::CoreError;
use crate::math;
use crate::metrics::{accuracy, macro_f1, majority_f1, per_annotator_macro_f1, PredRow};
use crate::model::{Example, Gradients, ModelParams};
use crate::rng;

/// Optimization settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparams {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Epochs without strict validation improvement before stopping.
    pub patience: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Seeds epoch shuffling.
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            learning_rate: 1e-3,
            epochs: 10,
            batch_size: 32,
            patience: 3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed: 0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), CoreError> {
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(CoreError::InvalidConfig(
                "learning rate must be positive and finite".to_string(),
            ));
        }
        if self.epochs == 0 {
            return Err(CoreError::InvalidConfig("epochs must be positive".to_string()));
        }
        if self.batch_size == 0 {
            return Err(CoreError::InvalidConfig(
                "batch size must be positive".to_string(),
            ));
        }
        if self.patience == 0 {
            return Err(CoreError::InvalidConfig(
                "patience must be positive".to_string(),
            ));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&b) {
                return Err(CoreError::InvalidConfig(alloc::format!(
                    "{name} must lie in [0, 1)"
                )));
            }
        }
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(CoreError::InvalidConfig(
                "epsilon must be positive".to_string(),
            ));
        }
        Ok(())
    }
}

/// Textbook Adam over a fixed list of tensors.
///
/// Moment estimates are kept per element; bias correction uses the
/// explicit `1 - beta^t` terms with running beta powers, so the very
/// first step from zero state moves each parameter by
/// `-lr * g / (|g| + eps)`.
#[derive(Debug, Clone)]
pub struct AdamOptimizer {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: u64,
    b1_pow: f64,
    b2_pow: f64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl AdamOptimizer {
    pub fn new(lr: f64, beta1: f64, beta2: f64, eps: f64, shapes: &[usize]) -> Self {
        AdamOptimizer {
            lr,
            beta1,
            beta2,
            eps,
            t: 0,
            b1_pow: 1.0,
            b2_pow: 1.0,
            m: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            v: shapes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    /// Applies one update. Tensor count and shapes must match `new`.
    pub fn step(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]]) {
        assert_eq!(params.len(), self.m.len(), "tensor count mismatch");
        assert_eq!(grads.len(), self.m.len(), "gradient count mismatch");
        self.t += 1;
        self.b1_pow *= self.beta1;
        self.b2_pow *= self.beta2;
        let mc = 1.0 - self.b1_pow;
        let vc = 1.0 - self.b2_pow;
        for (i, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            assert_eq!(p.len(), self.m[i].len(), "tensor {i} shape mismatch");
            assert_eq!(g.len(), self.m[i].len(), "gradient {i} shape mismatch");
            for j in 0..p.len() {
                let gj = g[j];
                self.m[i][j] = self.beta1 * self.m[i][j] + (1.0 - self.beta1) * gj;
                self.v[i][j] = self.beta2 * self.v[i][j] + (1.0 - self.beta2) * gj * gj;
                let m_hat = self.m[i][j] / mc;
                let v_hat = self.v[i][j] / vc;
                p[j] -= self.lr * m_hat / (math::sqrt(v_hat) + self.eps);
            }
        }
    }

    pub fn updates(&self) -> u64 {
        self.t
    }
}

/// Adam state bound to a model's trainable tensors.
#[derive(Debug, Clone)]
pub struct AdamState {
    names: Vec<&'static str>,
    opt: AdamOptimizer,
}

impl AdamState {
    pub fn new(params: &ModelParams, hyper: &Hyperparams) -> Self {
        let names = params.trainable_names();
        let shapes: Vec<usize> = names
            .iter()
            .map(|n| params.tensor(n).expect("trainable tensor").len())
            .collect();
        AdamState {
            names,
            opt: AdamOptimizer::new(
                hyper.learning_rate,
                hyper.beta1,
                hyper.beta2,
                hyper.epsilon,
                &shapes,
            ),
        }
    }

    pub fn updates(&self) -> u64 {
        self.opt.updates()
    }
}

/// One Adam update on a model from computed gradients.
pub fn adam_step(state: &mut AdamState, params: &mut ModelParams, grads: &Gradients) {
    let mut ps: Vec<&mut [f64]> = Vec::with_capacity(state.names.len());
    let mut gs: Vec<&[f64]> = Vec::with_capacity(state.names.len());
    for (name, tensor) in params.tensors_mut() {
        if state.names.contains(&name) {
            ps.push(tensor.as_mut_slice());
            gs.push(grads.tensor(name).expect("gradient for trainable tensor"));
        }
    }
    state.opt.step(&mut ps, &gs);
}

/// Train and validation views of a dataset, with instance vectors
/// resolved up front. Test labels are never copied in.
#[derive(Debug, Clone)]
pub struct TrainingData {
    xs: Vec<Vec<f64>>,
    train: Vec<Example>,
    val: Vec<Example>,
    annotator_ids: Vec<String>,
}

impl TrainingData {
    /// Gathers train and val examples. The dataset must carry splits and
    /// both splits must be non-empty; every train or val instance needs a
    /// stored embedding.
    pub fn new(dataset: &Dataset, store: &EmbeddingStore) -> Result<Self, CoreError> {
        if dataset.splits().is_none() {
            return Err(CoreError::InvalidData(
                "training needs split assignments".to_string(),
            ));
        }
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        let mut xs = Vec::new();
        for split in [Split::Train, Split::Val] {
            for id in dataset.split_instance_ids(split) {
                let v = store
                    .get_f64(id)
                    .ok_or_else(|| CoreError::MissingEmbedding(id.to_string()))?;
                index.insert(id, xs.len());
                xs.push(v);
            }
        }
        let annotator_ids: Vec<String> = dataset.annotators().keys().cloned().collect();
        let annotator_index: BTreeMap<&str, usize> = annotator_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();

        let mut train = Vec::new();
        let mut val = Vec::new();
        for (instance, annotator, label) in dataset.matrix().iter() {
            let bucket = match dataset.split_of(instance) {
                Some(Split::Train) => &mut train,
                Some(Split::Val) => &mut val,
                _ => continue,
            };
            bucket.push(Example {
                x_index: index[instance],
                annotator: annotator_index[annotator],
                label,
            });
        }
        if train.is_empty() {
            return Err(CoreError::EmptySplit("train"));
        }
        if val.is_empty() {
            return Err(CoreError::EmptySplit("val"));
        }
        Ok(TrainingData {
            xs,
            train,
            val,
            annotator_ids,
        })
    }

    pub fn xs(&self) -> &[Vec<f64>] {
        &self.xs
    }

    pub fn train_examples(&self) -> &[Example] {
        &self.train
    }

    pub fn val_examples(&self) -> &[Example] {
        &self.val
    }

    pub fn annotator_ids(&self) -> &[String] {
        &self.annotator_ids
    }
}

/// Loss and validation score of one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    /// 1-based epoch number.
    pub epoch: usize,
    /// Mean training loss per averaging unit (example, or instance for
    /// the multi-task strategy).
    pub train_loss: f64,
    /// Individual macro-F1 on the validation split.
    pub val_f1: f64,
}

/// Full training trace plus which epoch's parameters were returned.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
    /// 1-based epoch whose parameters were selected.
    pub selected_epoch: usize,
    pub adam_updates: u64,
}

/// Trains a model, returning the best-epoch parameters and the trace.
///
/// Epoch shuffling is seeded by `hyper.seed`. Single-head strategies
/// shuffle and batch examples; the multi-task strategy shuffles and
/// batches whole instances so each batch holds complete instance groups.
/// A non-finite batch loss aborts with an error naming the update.
pub fn train(
    params: ModelParams,
    data: &TrainingData,
    hyper: &Hyperparams,
) -> Result<(ModelParams, TrainHistory), CoreError> {
    hyper.validate()?;
    if data.annotator_ids != params.annotator_ids() {
        return Err(CoreError::InvalidData(
            "training data annotators do not match the model".to_string(),
        ));
    }

    let mut current = params;
    let mut state = AdamState::new(&current, hyper);
    let mut gen = rng::seeded(hyper.seed);
    let multi = current.strategy().is_multi_task();

    // Multi-task batches are built from whole instance groups.
    let mut groups: Vec<Vec<Example>> = if multi {
        let mut by_instance: BTreeMap<usize, Vec<Example>> = BTreeMap::new();
        for ex in &data.train {
            by_instance.entry(ex.x_index).or_default().push(*ex);
        }
        by_instance.into_values().collect()
    } else {
        Vec::new()
    };
    let mut examples: Vec<Example> = if multi { Vec::new() } else { data.train.clone() };

    let mut history = TrainHistory {
        epochs: Vec::new(),
        selected_epoch: 0,
        adam_updates: 0,
    };
    let mut best: Option<ModelParams> = None;
    let mut best_f1 = f64::NEG_INFINITY;
    let mut best_epoch = 0usize;

    for epoch in 1..=hyper.epochs {
        let mut loss_sum = 0.0;
        let mut unit_sum = 0.0;
        let run_batch = |batch: &[Example],
                             units: f64,
                             current: &mut ModelParams,
                             state: &mut AdamState|
         -> Result<(f64, f64), CoreError> {
            let (loss, grads) = current.loss_and_gradients(&data.xs, batch)?;
            if !loss.is_finite() {
                return Err(CoreError::NonFiniteLoss {
                    update: state.updates() + 1,
                });
            }
            adam_step(state, current, &grads);
            Ok((loss * units, units))
        };

        if multi {
            rng::shuffle(&mut gen, &mut groups);
            let mut batch: Vec<Example> = Vec::new();
            for chunk in groups.chunks(hyper.batch_size) {
                batch.clear();
                for group in chunk {
                    batch.extend_from_slice(group);
                }
                let (l, u) = run_batch(&batch, chunk.len() as f64, &mut current, &mut state)?;
                loss_sum += l;
                unit_sum += u;
            }
        } else {
            rng::shuffle(&mut gen, &mut examples);
            for batch in examples.chunks(hyper.batch_size) {
                let (l, u) = run_batch(batch, batch.len() as f64, &mut current, &mut state)?;
                loss_sum += l;
                unit_sum += u;
            }
        }

        let val_f1 = validation_f1(&current, data)?;
        history.epochs.push(EpochRecord {
            epoch,
            train_loss: loss_sum / unit_sum,
            val_f1,
        });

        if val_f1 > best_f1 {
            best_f1 = val_f1;
            best_epoch = epoch;
            best = Some(current.clone());
        }
        if epoch - best_epoch >= hyper.patience {
            break;
        }
    }

    history.selected_epoch = best_epoch;
    history.adam_updates = state.updates();
    Ok((best.expect("at least one epoch ran"), history))
}

fn validation_f1(params: &ModelParams, data: &TrainingData) -> Result<f64, CoreError> {
    let mut preds = Vec::with_capacity(data.val.len());
    let mut golds = Vec::with_capacity(data.val.len());
    for ex in &data.val {
        let p = params.forward_indexed(&data.xs[ex.x_index], ex.annotator)?;
        preds.push(p.label);
        golds.push(ex.label);
    }
    macro_f1(&preds, &golds)
}

/// Evaluation scores over one split, with the per-annotation rows that
/// produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsBundle {
    pub split: Split,
    /// Macro-F1 pooled over all (instance, annotator) pairs.
    pub f1_individual: f64,
    /// Macro-F1 of modal predictions against modal golds per instance.
    pub f1_majority: f64,
    /// Mean of per-annotator macro-F1 scores.
    pub f1_per_annotator_mean: f64,
    pub accuracy: f64,
    pub rows: Vec<PredRow>,
}

/// Evaluates a trained model on one split of a dataset.
pub fn evaluate(
    params: &ModelParams,
    dataset: &Dataset,
    store: &EmbeddingStore,
    split: Split,
    tie: TieRule,
) -> Result<MetricsBundle, CoreError> {
    let matrix = dataset.split_matrix(split)?;
    let mut rows = Vec::with_capacity(matrix.len());
    for (instance, annotator, gold) in matrix.iter() {
        let x = store
            .get_f64(instance)
            .ok_or_else(|| CoreError::MissingEmbedding(instance.to_string()))?;
        let p = params.forward(&x, annotator)?;
        rows.push(PredRow {
            instance_id: instance.to_string(),
            annotator_id: annotator.to_string(),
            gold,
            prob: p.probability,
            pred: p.label,
        });
    }
    if rows.is_empty() {
        return Err(CoreError::EmptySplit(split.as_str()));
    }
    let preds: Vec<u8> = rows.iter().map(|r| r.pred).collect();
    let golds: Vec<u8> = rows.iter().map(|r| r.gold).collect();
    Ok(MetricsBundle {
        split,
        f1_individual: macro_f1(&preds, &golds)?,
        f1_majority: majority_f1(&rows, &matrix, tie)?,
        f1_per_annotator_mean: per_annotator_macro_f1(&rows)?,
        accuracy: accuracy(&preds, &golds)?,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AnnotationMatrix, Annotator, Instance};
    use crate::repr::{build_table, AuthorshipConfig, Strategy};

    #[test]
    #[allow(clippy::excessive_precision)]
    fn first_adam_step_has_closed_form() {
        let mut opt = AdamOptimizer::new(1e-3, 0.9, 0.999, 1e-8, &[1]);
        let mut p = vec![0.0f64];
        let g = vec![0.73f64];
        opt.step(&mut [p.as_mut_slice()], &[g.as_slice()]);
        let want = -1e-3 * 0.73 / (0.73 + 1e-8);
        assert!((p[0] - want).abs() < 1e-15, "got {}", p[0]);
        assert!((p[0] - (-0.000_999_999_986_301_369_9)).abs() < 1e-15);
        assert_eq!(opt.updates(), 1);
    }

    #[test]
    fn adam_moments_carry_across_steps() {
        let mut opt = AdamOptimizer::new(0.1, 0.9, 0.999, 1e-8, &[1]);
        let mut p = vec![0.0f64];
        opt.step(&mut [p.as_mut_slice()], &[&[1.0]]);
        let after_one = p[0];
        // A zero gradient still moves the parameter: first-moment
        // momentum survives the step boundary.
        opt.step(&mut [p.as_mut_slice()], &[&[0.0]]);
        assert!((p[0] - after_one).abs() > 1e-3, "momentum step {}", p[0] - after_one);
        assert!(p[0] < after_one);
        assert_eq!(opt.updates(), 2);
    }

    /// Instance-separable corpus: the label depends only on the sign of
    /// the first vector component.
    fn separable_fixture(n: usize) -> (Dataset, EmbeddingStore) {
        let mut gen = crate::rng::seeded(5);
        let mut store = EmbeddingStore::new(4).unwrap();
        let mut matrix = AnnotationMatrix::new();
        let mut instances = Vec::new();
        let mut splits = BTreeMap::new();
        for i in 0..n {
            let id = alloc::format!("i{i:04}");
            let v: Vec<f32> = (0..4)
                .map(|_| crate::rng::standard_normal(&mut gen) as f32)
                .collect();
            let label = u8::from(v[0] > 0.0);
            store.insert(&id, v).unwrap();
            for a in ["a00", "a01"] {
                matrix.insert(&id, a, label).unwrap();
            }
            let split = match i % 10 {
                8 => Split::Val,
                9 => Split::Test,
                _ => Split::Train,
            };
            splits.insert(id.clone(), split);
            instances.push(Instance {
                id,
                text: String::new(),
            });
        }
        let dataset = Dataset::new(
            instances,
            ["a00", "a01"]
                .iter()
                .map(|a| Annotator {
                    id: a.to_string(),
                    aux_text_ids: vec![],
                })
                .collect(),
            matrix,
            Some(splits),
            BTreeMap::new(),
        )
        .unwrap();
        (dataset, store)
    }

    fn fit(
        strategy: Strategy,
        hyper: &Hyperparams,
        n: usize,
    ) -> (ModelParams, TrainHistory, Dataset, EmbeddingStore) {
        let (dataset, store) = separable_fixture(n);
        let table = build_table(
            strategy,
            &dataset,
            &store,
            8,
            &AuthorshipConfig::default(),
            2,
        )
        .unwrap();
        let params = crate::model::init_model(&table, 4, 16, 3).unwrap();
        let data = TrainingData::new(&dataset, &store).unwrap();
        let (best, history) = train(params, &data, hyper).unwrap();
        (best, history, dataset, store)
    }

    #[test]
    fn training_learns_a_separable_concept() {
        let hyper = Hyperparams {
            learning_rate: 0.01,
            epochs: 30,
            patience: 5,
            seed: 4,
            ..Hyperparams::default()
        };
        let (best, history, dataset, store) = fit(Strategy::None, &hyper, 200);
        let last = history.epochs.last().unwrap();
        assert!(
            history.epochs[0].train_loss > last.train_loss || last.train_loss < 0.1,
            "loss should drop"
        );
        let best_val = history
            .epochs
            .iter()
            .map(|e| e.val_f1)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(best_val > 0.9, "best val F1 {best_val}");

        let bundle = evaluate(&best, &dataset, &store, Split::Test, TieRule::PositiveWins)
            .unwrap();
        assert!(bundle.f1_individual > 0.9, "test F1 {}", bundle.f1_individual);
    }

    #[test]
    fn selected_epoch_is_the_earliest_maximum() {
        let hyper = Hyperparams {
            learning_rate: 0.01,
            epochs: 25,
            patience: 3,
            seed: 9,
            ..Hyperparams::default()
        };
        let (_, history, _, _) = fit(Strategy::None, &hyper, 120);
        let best = history
            .epochs
            .iter()
            .map(|e| e.val_f1)
            .fold(f64::NEG_INFINITY, f64::max);
        let earliest = history
            .epochs
            .iter()
            .find(|e| e.val_f1 == best)
            .unwrap()
            .epoch;
        assert_eq!(history.selected_epoch, earliest);
        // If training stopped early, it did so exactly patience epochs
        // after the selected one.
        if history.epochs.len() < hyper.epochs {
            assert_eq!(
                history.epochs.last().unwrap().epoch,
                history.selected_epoch + hyper.patience
            );
        }
    }

    #[test]
    fn adam_update_count_matches_batch_schedule() {
        let hyper = Hyperparams {
            learning_rate: 0.01,
            epochs: 4,
            batch_size: 16,
            patience: 10,
            seed: 1,
            ..Hyperparams::default()
        };
        let (_, history, dataset, store) = fit(Strategy::None, &hyper, 100);
        let data = TrainingData::new(&dataset, &store).unwrap();
        let per_epoch = data.train_examples().len().div_ceil(16) as u64;
        assert_eq!(
            history.adam_updates,
            per_epoch * history.epochs.len() as u64
        );
    }

    #[test]
    fn multi_task_updates_count_instance_batches() {
        let hyper = Hyperparams {
            learning_rate: 0.01,
            epochs: 3,
            batch_size: 8,
            patience: 10,
            seed: 1,
            ..Hyperparams::default()
        };
        let (_, history, dataset, store) = fit(Strategy::MultiTask, &hyper, 60);
        let data = TrainingData::new(&dataset, &store).unwrap();
        let distinct: alloc::collections::BTreeSet<usize> = data
            .train_examples()
            .iter()
            .map(|e| e.x_index)
            .collect();
        let per_epoch = distinct.len().div_ceil(8) as u64;
        assert_eq!(
            history.adam_updates,
            per_epoch * history.epochs.len() as u64
        );
    }

    #[test]
    fn training_is_seed_deterministic() {
        let hyper = Hyperparams {
            learning_rate: 0.01,
            epochs: 5,
            seed: 77,
            ..Hyperparams::default()
        };
        let (m1, h1, _, _) = fit(Strategy::UserToken, &hyper, 80);
        let (m2, h2, _, _) = fit(Strategy::UserToken, &hyper, 80);
        assert_eq!(m1, m2);
        assert_eq!(h1, h2);
        let other = Hyperparams {
            seed: 78,
            ..hyper
        };
        let (_, h3, _, _) = fit(Strategy::UserToken, &other, 80);
        assert_ne!(h1, h3);
    }

    #[test]
    fn training_data_excludes_test_labels() {
        let (dataset, store) = separable_fixture(50);
        let data = TrainingData::new(&dataset, &store).unwrap();
        let n_test = dataset.split_instance_ids(Split::Test).len();
        assert!(n_test > 0);
        let total = dataset.matrix().len();
        let held = data.train_examples().len() + data.val_examples().len();
        assert_eq!(total - held, 2 * n_test);
        // No example can reference a test instance vector slot.
        let n_vecs = data.xs().len();
        assert_eq!(
            n_vecs,
            dataset.instances().len() - n_test
        );
    }

    #[test]
    fn training_requires_splits_and_nonempty_partitions() {
        let (dataset, store) = separable_fixture(50);
        let unsplit = Dataset::new(
            dataset.instances().values().cloned().collect(),
            dataset.annotators().values().cloned().collect(),
            dataset.matrix().clone(),
            None,
            BTreeMap::new(),
        )
        .unwrap();
        assert!(TrainingData::new(&unsplit, &store).is_err());

        let mut all_train: BTreeMap<String, Split> = BTreeMap::new();
        for id in dataset.instances().keys() {
            all_train.insert(id.clone(), Split::Train);
        }
        let no_val = dataset.with_splits(all_train).unwrap();
        assert_eq!(
            TrainingData::new(&no_val, &store).unwrap_err(),
            CoreError::EmptySplit("val")
        );
    }

    #[test]
    fn evaluate_reports_all_rows_of_the_split() {
        let hyper = Hyperparams {
            learning_rate: 0.01,
            epochs: 3,
            seed: 2,
            ..Hyperparams::default()
        };
        let (best, _, dataset, store) = fit(Strategy::None, &hyper, 100);
        let bundle = evaluate(&best, &dataset, &store, Split::Test, TieRule::PositiveWins)
            .unwrap();
        let expected_rows = dataset.split_matrix(Split::Test).unwrap().len();
        assert_eq!(bundle.rows.len(), expected_rows);
        for r in &bundle.rows {
            assert!(r.prob > 0.0 && r.prob < 1.0);
            assert_eq!(dataset.split_of(&r.instance_id), Some(Split::Test));
        }
        assert!((0.0..=1.0).contains(&bundle.f1_majority));
        assert!((0.0..=1.0).contains(&bundle.accuracy));
    }

    #[test]
    fn evaluate_rejects_missing_embeddings() {
        let hyper = Hyperparams {
            learning_rate: 0.01,
            epochs: 2,
            seed: 2,
            ..Hyperparams::default()
        };
        let (best, _, dataset, _) = fit(Strategy::None, &hyper, 50);
        let empty = EmbeddingStore::new(4).unwrap();
        assert!(matches!(
            evaluate(&best, &dataset, &empty, Split::Test, TieRule::PositiveWins).unwrap_err(),
            CoreError::MissingEmbedding(_)
        ));
    }
}
