//! Annotation classifier with exact gradients.
//!
//! One architecture serves every strategy: the instance vector, plus any
//! annotator slots the strategy injects, feeds an affine layer into a
//! tanh hidden layer and a single logit head. The multi-task strategy
//! replaces the shared head with one logit head per annotator. Training
//! minimizes binary cross-entropy computed from the logit via softplus,
//! so no probability is ever materialized inside the loss and extreme
//! logits stay finite.
//!
//! Gradients are derived by hand and returned densely per tensor;
//! [`ModelParams::trainable_names`] lists exactly the tensors training
//! may update. Corpus-derived annotator representations live in
//! `fixed_vecs`; they are initialization values and train like any other
//! parameter once injected.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::math;
use crate::repr::{AnnotatorTable, Strategy};
use crate::rng;

/// Output of a single forward pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    /// Positive-class probability, clamped into the open interval (0, 1).
    pub probability: f64,
    /// Hard label: 1 when the logit is non-negative.
    pub label: u8,
    pub logit: f64,
}

/// One training example: an instance vector index, an annotator index,
/// and that annotator's label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Example {
    pub x_index: usize,
    pub annotator: usize,
    pub label: u8,
}

/// All tensor names a model can carry, in serialization order.
pub const TENSOR_NAMES: [&str; 8] = [
    "w1", "b1", "w2", "b2", "user_vecs", "fixed_vecs", "mt_w", "mt_b",
];

/// Model parameters plus the metadata needed to interpret them.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    strategy: Strategy,
    instance_dim: usize,
    user_dim: usize,
    fixed_dim: usize,
    hidden: usize,
    annotator_ids: Vec<String>,
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
    user_vecs: Vec<f64>,
    fixed_vecs: Vec<f64>,
    mt_w: Vec<f64>,
    mt_b: Vec<f64>,
}

/// Shape and identity metadata of a model, used for serialization.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelMeta {
    pub strategy: Strategy,
    pub instance_dim: usize,
    pub user_dim: usize,
    pub fixed_dim: usize,
    pub hidden: usize,
    pub annotator_ids: Vec<String>,
}

/// Dense gradients for the trainable tensors; unused tensors stay empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
    pub user_vecs: Vec<f64>,
    pub fixed_vecs: Vec<f64>,
    pub mt_w: Vec<f64>,
    pub mt_b: Vec<f64>,
}

impl Gradients {
    pub fn zeros_like(params: &ModelParams) -> Gradients {
        Gradients {
            w1: vec![0.0; params.w1.len()],
            b1: vec![0.0; params.b1.len()],
            w2: vec![0.0; params.w2.len()],
            b2: vec![0.0; params.b2.len()],
            user_vecs: vec![0.0; params.user_vecs.len()],
            fixed_vecs: vec![0.0; params.fixed_vecs.len()],
            mt_w: vec![0.0; params.mt_w.len()],
            mt_b: vec![0.0; params.mt_b.len()],
        }
    }

    pub fn tensor(&self, name: &str) -> Option<&[f64]> {
        match name {
            "w1" => Some(&self.w1),
            "b1" => Some(&self.b1),
            "w2" => Some(&self.w2),
            "b2" => Some(&self.b2),
            "user_vecs" => Some(&self.user_vecs),
            "fixed_vecs" => Some(&self.fixed_vecs),
            "mt_w" => Some(&self.mt_w),
            "mt_b" => Some(&self.mt_b),
            _ => None,
        }
    }
}

/// Initializes a model for the strategy captured in `table`.
///
/// Trunk and head weights are drawn from N(0, 1/fan_in); biases start at
/// zero. Annotator vectors start from the table's initialization values:
/// random draws for the user slot, corpus-derived vectors for the fixed
/// slot. Draw order is fixed (trunk weights, then head weights), so one
/// seed always produces one parameter vector.
pub fn init_model(
    table: &AnnotatorTable,
    instance_dim: usize,
    hidden: usize,
    seed: u64,
) -> Result<ModelParams, CoreError> {
    if instance_dim == 0 {
        return Err(CoreError::InvalidConfig(
            "instance dimension must be positive".to_string(),
        ));
    }
    if hidden == 0 {
        return Err(CoreError::InvalidConfig(
            "hidden width must be positive".to_string(),
        ));
    }
    let k = table.len();
    if k == 0 {
        return Err(CoreError::InvalidData("no annotators".to_string()));
    }
    if table.user_init.len() != k * table.user_dim
        || table.fixed_init.len() != k * table.fixed_dim
    {
        return Err(CoreError::InvalidData(
            "annotator table shape is inconsistent".to_string(),
        ));
    }
    if !table.annotator_ids.windows(2).all(|w| w[0] < w[1]) {
        return Err(CoreError::InvalidData(
            "annotator ids must be sorted and unique".to_string(),
        ));
    }

    let strategy = table.strategy;
    let input_dim = instance_dim + table.user_dim + table.fixed_dim;
    let mut gen = rng::seeded(seed);
    let trunk_scale = 1.0 / math::sqrt(input_dim as f64);
    let head_scale = 1.0 / math::sqrt(hidden as f64);

    let w1: Vec<f64> = (0..hidden * input_dim)
        .map(|_| trunk_scale * rng::standard_normal(&mut gen))
        .collect();
    let b1 = vec![0.0; hidden];
    let (w2, b2, mt_w, mt_b) = if strategy.is_multi_task() {
        let mt_w: Vec<f64> = (0..k * hidden)
            .map(|_| head_scale * rng::standard_normal(&mut gen))
            .collect();
        (Vec::new(), Vec::new(), mt_w, vec![0.0; k])
    } else {
        let w2: Vec<f64> = (0..hidden)
            .map(|_| head_scale * rng::standard_normal(&mut gen))
            .collect();
        (w2, vec![0.0], Vec::new(), Vec::new())
    };

    Ok(ModelParams {
        strategy,
        instance_dim,
        user_dim: table.user_dim,
        fixed_dim: table.fixed_dim,
        hidden,
        annotator_ids: table.annotator_ids.clone(),
        w1,
        b1,
        w2,
        b2,
        user_vecs: table.user_init.clone(),
        fixed_vecs: table.fixed_init.clone(),
        mt_w,
        mt_b,
    })
}

impl ModelParams {
    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn instance_dim(&self) -> usize {
        self.instance_dim
    }

    pub fn user_dim(&self) -> usize {
        self.user_dim
    }

    pub fn fixed_dim(&self) -> usize {
        self.fixed_dim
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn input_dim(&self) -> usize {
        self.instance_dim + self.user_dim + self.fixed_dim
    }

    pub fn annotator_ids(&self) -> &[String] {
        &self.annotator_ids
    }

    pub fn num_annotators(&self) -> usize {
        self.annotator_ids.len()
    }

    pub fn annotator_index(&self, annotator_id: &str) -> Option<usize> {
        self.annotator_ids
            .binary_search_by(|probe| probe.as_str().cmp(annotator_id))
            .ok()
    }

    pub fn meta(&self) -> ModelMeta {
        ModelMeta {
            strategy: self.strategy,
            instance_dim: self.instance_dim,
            user_dim: self.user_dim,
            fixed_dim: self.fixed_dim,
            hidden: self.hidden,
            annotator_ids: self.annotator_ids.clone(),
        }
    }

    /// All tensors by name, including empty ones.
    pub fn tensors(&self) -> [(&'static str, &[f64]); 8] {
        [
            ("w1", self.w1.as_slice()),
            ("b1", self.b1.as_slice()),
            ("w2", self.w2.as_slice()),
            ("b2", self.b2.as_slice()),
            ("user_vecs", self.user_vecs.as_slice()),
            ("fixed_vecs", self.fixed_vecs.as_slice()),
            ("mt_w", self.mt_w.as_slice()),
            ("mt_b", self.mt_b.as_slice()),
        ]
    }

    pub fn tensor(&self, name: &str) -> Option<&[f64]> {
        self.tensors()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| t)
    }

    pub fn tensor_mut(&mut self, name: &str) -> Option<&mut Vec<f64>> {
        match name {
            "w1" => Some(&mut self.w1),
            "b1" => Some(&mut self.b1),
            "w2" => Some(&mut self.w2),
            "b2" => Some(&mut self.b2),
            "user_vecs" => Some(&mut self.user_vecs),
            "fixed_vecs" => Some(&mut self.fixed_vecs),
            "mt_w" => Some(&mut self.mt_w),
            "mt_b" => Some(&mut self.mt_b),
            _ => None,
        }
    }

    /// Mutable views of all tensors at once, in [`TENSOR_NAMES`] order.
    pub fn tensors_mut(&mut self) -> [(&'static str, &mut Vec<f64>); 8] {
        [
            ("w1", &mut self.w1),
            ("b1", &mut self.b1),
            ("w2", &mut self.w2),
            ("b2", &mut self.b2),
            ("user_vecs", &mut self.user_vecs),
            ("fixed_vecs", &mut self.fixed_vecs),
            ("mt_w", &mut self.mt_w),
            ("mt_b", &mut self.mt_b),
        ]
    }

    /// Names of non-empty tensors, all of which training updates. The
    /// corpus-derived `fixed_vecs` count: they are initializations, not
    /// constants.
    pub fn trainable_names(&self) -> Vec<&'static str> {
        let mut names = Vec::new();
        for (name, t) in self.tensors() {
            if !t.is_empty() {
                names.push(name);
            }
        }
        names
    }

    /// Rebuilds a model from serialized parts, validating every shape.
    pub fn from_parts(
        meta: ModelMeta,
        mut tensors: BTreeMap<String, Vec<f64>>,
    ) -> Result<Self, CoreError> {
        let k = meta.annotator_ids.len();
        if k == 0 {
            return Err(CoreError::InvalidData("no annotators".to_string()));
        }
        if !meta.annotator_ids.windows(2).all(|w| w[0] < w[1]) {
            return Err(CoreError::InvalidData(
                "annotator ids must be sorted and unique".to_string(),
            ));
        }
        if meta.instance_dim == 0 || meta.hidden == 0 {
            return Err(CoreError::InvalidData("degenerate model shape".to_string()));
        }
        let input_dim = meta.instance_dim + meta.user_dim + meta.fixed_dim;
        let multi = meta.strategy.is_multi_task();
        if multi && (meta.user_dim != 0 || meta.fixed_dim != 0) {
            return Err(CoreError::InvalidData(
                "multi-task models take no annotator slots".to_string(),
            ));
        }
        let expected: [(&str, usize); 8] = [
            ("w1", meta.hidden * input_dim),
            ("b1", meta.hidden),
            ("w2", if multi { 0 } else { meta.hidden }),
            ("b2", if multi { 0 } else { 1 }),
            ("user_vecs", k * meta.user_dim),
            ("fixed_vecs", k * meta.fixed_dim),
            ("mt_w", if multi { k * meta.hidden } else { 0 }),
            ("mt_b", if multi { k } else { 0 }),
        ];
        let mut out: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for (name, len) in expected {
            let t = tensors.remove(name).unwrap_or_default();
            if t.len() != len {
                return Err(CoreError::DimensionMismatch {
                    what: "model tensor",
                    expected: len,
                    got: t.len(),
                });
            }
            out.insert(name, t);
        }
        if let Some(extra) = tensors.keys().next() {
            return Err(CoreError::InvalidData(alloc::format!(
                "unexpected tensor '{extra}'"
            )));
        }
        Ok(ModelParams {
            strategy: meta.strategy,
            instance_dim: meta.instance_dim,
            user_dim: meta.user_dim,
            fixed_dim: meta.fixed_dim,
            hidden: meta.hidden,
            annotator_ids: meta.annotator_ids,
            w1: out.remove("w1").unwrap(),
            b1: out.remove("b1").unwrap(),
            w2: out.remove("w2").unwrap(),
            b2: out.remove("b2").unwrap(),
            user_vecs: out.remove("user_vecs").unwrap(),
            fixed_vecs: out.remove("fixed_vecs").unwrap(),
            mt_w: out.remove("mt_w").unwrap(),
            mt_b: out.remove("mt_b").unwrap(),
        })
    }

    /// Concatenates the model input for one example.
    fn build_input(&self, x: &[f64], annotator: usize, buf: &mut Vec<f64>) {
        buf.clear();
        buf.extend_from_slice(x);
        if self.user_dim > 0 {
            let base = annotator * self.user_dim;
            buf.extend_from_slice(&self.user_vecs[base..base + self.user_dim]);
        }
        if self.fixed_dim > 0 {
            let base = annotator * self.fixed_dim;
            buf.extend_from_slice(&self.fixed_vecs[base..base + self.fixed_dim]);
        }
    }

    fn hidden_activations(&self, input: &[f64], a1: &mut Vec<f64>) {
        let d = input.len();
        a1.clear();
        for row in 0..self.hidden {
            let mut z = self.b1[row];
            let base = row * d;
            for (col, &v) in input.iter().enumerate() {
                z += self.w1[base + col] * v;
            }
            a1.push(math::tanh(z));
        }
    }

    fn head_logit(&self, a1: &[f64], annotator: usize) -> f64 {
        if self.strategy.is_multi_task() {
            let base = annotator * self.hidden;
            let mut z = self.mt_b[annotator];
            for (col, &v) in a1.iter().enumerate() {
                z += self.mt_w[base + col] * v;
            }
            z
        } else {
            let mut z = self.b2[0];
            for (col, &v) in a1.iter().enumerate() {
                z += self.w2[col] * v;
            }
            z
        }
    }

    fn logit_for(&self, x: &[f64], annotator: usize) -> f64 {
        let mut input = Vec::with_capacity(self.input_dim());
        self.build_input(x, annotator, &mut input);
        let mut a1 = Vec::with_capacity(self.hidden);
        self.hidden_activations(&input, &mut a1);
        self.head_logit(&a1, annotator)
    }

    /// Predicts the probability that `annotator_id` labels the instance
    /// positive. The annotator must be known unless the strategy is
    /// annotator-blind.
    pub fn forward(&self, x: &[f64], annotator_id: &str) -> Result<Prediction, CoreError> {
        let annotator = if self.strategy == Strategy::None {
            0
        } else {
            self.annotator_index(annotator_id)
                .ok_or_else(|| CoreError::UnknownAnnotator(annotator_id.to_string()))?
        };
        self.forward_indexed(x, annotator)
    }

    /// [`Self::forward`] addressed by annotator index instead of id.
    pub fn forward_indexed(&self, x: &[f64], annotator: usize) -> Result<Prediction, CoreError> {
        if x.len() != self.instance_dim {
            return Err(CoreError::DimensionMismatch {
                what: "instance vector",
                expected: self.instance_dim,
                got: x.len(),
            });
        }
        let annotator = if self.strategy == Strategy::None {
            0
        } else if annotator < self.annotator_ids.len() {
            annotator
        } else {
            return Err(CoreError::InvalidData(alloc::format!(
                "annotator index {annotator} out of range"
            )));
        };
        let logit = self.logit_for(x, annotator);
        Ok(Prediction {
            probability: math::sigmoid(logit)
                .clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0),
            label: u8::from(logit >= 0.0),
            logit,
        })
    }

    /// Mean binary cross-entropy over a batch, with exact gradients.
    ///
    /// Per example, the loss term is `softplus(z) - y * z`. Single-head
    /// strategies average over examples; the multi-task strategy sums
    /// each instance's annotator terms and averages over distinct
    /// instances. Gradients cover exactly [`Self::trainable_names`].
    pub fn loss_and_gradients(
        &self,
        xs: &[Vec<f64>],
        batch: &[Example],
    ) -> Result<(f64, Gradients), CoreError> {
        if batch.is_empty() {
            return Err(CoreError::TooFewObservations {
                what: "loss batch",
                required: 1,
                got: 0,
            });
        }
        for ex in batch {
            if ex.x_index >= xs.len() {
                return Err(CoreError::InvalidData(alloc::format!(
                    "example instance index {} out of range",
                    ex.x_index
                )));
            }
            if xs[ex.x_index].len() != self.instance_dim {
                return Err(CoreError::DimensionMismatch {
                    what: "instance vector",
                    expected: self.instance_dim,
                    got: xs[ex.x_index].len(),
                });
            }
            if ex.label > 1 {
                return Err(CoreError::InvalidLabel {
                    instance: alloc::format!("#{}", ex.x_index),
                    label: ex.label,
                });
            }
            if self.strategy != Strategy::None && ex.annotator >= self.num_annotators() {
                return Err(CoreError::InvalidData(alloc::format!(
                    "example annotator index {} out of range",
                    ex.annotator
                )));
            }
        }

        let denom = if self.strategy.is_multi_task() {
            let distinct: BTreeSet<usize> = batch.iter().map(|e| e.x_index).collect();
            distinct.len() as f64
        } else {
            batch.len() as f64
        };

        let mut grads = Gradients::zeros_like(self);
        let mut loss = 0.0;
        let input_dim = self.input_dim();
        let mut input: Vec<f64> = Vec::with_capacity(input_dim);
        let mut a1: Vec<f64> = Vec::with_capacity(self.hidden);
        let mut da1 = vec![0.0f64; self.hidden];

        for ex in batch {
            let annotator = if self.strategy == Strategy::None {
                0
            } else {
                ex.annotator
            };
            self.build_input(&xs[ex.x_index], annotator, &mut input);
            self.hidden_activations(&input, &mut a1);
            let z = self.head_logit(&a1, annotator);
            let y = ex.label as f64;
            loss += math::softplus(z) - y * z;

            let dz = (math::sigmoid(z) - y) / denom;

            // Head gradients and the pull on hidden activations.
            if self.strategy.is_multi_task() {
                let base = annotator * self.hidden;
                grads.mt_b[annotator] += dz;
                for col in 0..self.hidden {
                    grads.mt_w[base + col] += dz * a1[col];
                    da1[col] = dz * self.mt_w[base + col];
                }
            } else {
                grads.b2[0] += dz;
                for col in 0..self.hidden {
                    grads.w2[col] += dz * a1[col];
                    da1[col] = dz * self.w2[col];
                }
            }

            // Trunk gradients; da1 is rewritten in place to the
            // pre-activation pull, reused by the slot gradients below.
            for row in 0..self.hidden {
                let dz1 = da1[row] * (1.0 - a1[row] * a1[row]);
                da1[row] = dz1;
                grads.b1[row] += dz1;
                let base = row * input_dim;
                for (col, &v) in input.iter().enumerate() {
                    grads.w1[base + col] += dz1 * v;
                }
            }

            // Pull on this annotator's input slots through the trunk.
            if self.user_dim > 0 {
                let offset = self.instance_dim;
                let vbase = annotator * self.user_dim;
                for u in 0..self.user_dim {
                    let mut acc = 0.0;
                    for (row, &d) in da1.iter().enumerate() {
                        acc += d * self.w1[row * input_dim + offset + u];
                    }
                    grads.user_vecs[vbase + u] += acc;
                }
            }
            if self.fixed_dim > 0 {
                let offset = self.instance_dim + self.user_dim;
                let vbase = annotator * self.fixed_dim;
                for f in 0..self.fixed_dim {
                    let mut acc = 0.0;
                    for (row, &d) in da1.iter().enumerate() {
                        acc += d * self.w1[row * input_dim + offset + f];
                    }
                    grads.fixed_vecs[vbase + f] += acc;
                }
            }
        }
        Ok((loss / denom, grads))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repr::AnnotatorTable;

    fn table(strategy: Strategy, k: usize, user_dim: usize, fixed_dim: usize) -> AnnotatorTable {
        let ids: Vec<String> = (0..k).map(|i| alloc::format!("a{i:02}")).collect();
        AnnotatorTable {
            strategy,
            annotator_ids: ids,
            user_dim,
            fixed_dim,
            user_init: crate::repr::init_user_tokens(
                &(0..k).map(|i| alloc::format!("a{i:02}")).collect::<Vec<_>>(),
                user_dim,
                41,
            ),
            fixed_init: (0..k * fixed_dim).map(|i| (i as f64) * 0.1 - 0.3).collect(),
        }
    }

    #[test]
    fn init_shapes_follow_strategy() {
        let cases = [
            (Strategy::None, 0usize, 0usize),
            (Strategy::UserToken, 4, 0),
            (Strategy::Composite, 0, 6),
            (Strategy::CompositeUser, 4, 6),
            (Strategy::MultiTask, 0, 0),
        ];
        for (strategy, ud, fd) in cases {
            let t = table(strategy, 3, ud, fd);
            let m = init_model(&t, 5, 7, 1).unwrap();
            assert_eq!(m.input_dim(), 5 + ud + fd);
            assert_eq!(m.tensor("w1").unwrap().len(), 7 * (5 + ud + fd));
            assert_eq!(m.tensor("b1").unwrap().len(), 7);
            if strategy.is_multi_task() {
                assert_eq!(m.tensor("mt_w").unwrap().len(), 3 * 7);
                assert_eq!(m.tensor("mt_b").unwrap().len(), 3);
                assert!(m.tensor("w2").unwrap().is_empty());
            } else {
                assert_eq!(m.tensor("w2").unwrap().len(), 7);
                assert_eq!(m.tensor("b2").unwrap().len(), 1);
                assert!(m.tensor("mt_w").unwrap().is_empty());
            }
            assert_eq!(m.tensor("user_vecs").unwrap().len(), 3 * ud);
            assert_eq!(m.tensor("fixed_vecs").unwrap().len(), 3 * fd);
        }
    }

    #[test]
    fn init_is_seed_deterministic() {
        let t = table(Strategy::UserToken, 4, 3, 0);
        let a = init_model(&t, 6, 8, 99).unwrap();
        let b = init_model(&t, 6, 8, 99).unwrap();
        assert_eq!(a, b);
        let c = init_model(&t, 6, 8, 100).unwrap();
        assert_ne!(a, c);
    }

    fn hand_model() -> ModelParams {
        let meta = ModelMeta {
            strategy: Strategy::None,
            instance_dim: 2,
            user_dim: 0,
            fixed_dim: 0,
            hidden: 2,
            annotator_ids: vec!["a00".to_string()],
        };
        let mut tensors = BTreeMap::new();
        tensors.insert("w1".to_string(), vec![1.0, 0.0, 0.0, 1.0]);
        tensors.insert("b1".to_string(), vec![0.1, -0.2]);
        tensors.insert("w2".to_string(), vec![0.5, -1.0]);
        tensors.insert("b2".to_string(), vec![0.25]);
        ModelParams::from_parts(meta, tensors).unwrap()
    }

    #[test]
    fn forward_matches_hand_computation() {
        let m = hand_model();
        let p = m.forward(&[0.3, 0.6], "whoever").unwrap();
        let t = (0.4f64).tanh();
        let z = 0.5 * t - 1.0 * t + 0.25;
        assert_eq!(p.logit, z);
        assert_eq!(p.label, 1);
        let want = 1.0 / (1.0 + (-z).exp());
        assert!((p.probability - want).abs() < 1e-15);
    }

    #[test]
    fn probability_stays_inside_open_interval() {
        let mut m = hand_model();
        *m.tensor_mut("b2").unwrap() = vec![1e4];
        let p = m.forward(&[0.0, 0.0], "x").unwrap();
        assert!(p.probability < 1.0);
        *m.tensor_mut("b2").unwrap() = vec![-1e4];
        let p = m.forward(&[0.0, 0.0], "x").unwrap();
        assert!(p.probability > 0.0);
    }

    #[test]
    fn annotator_slots_change_predictions() {
        let t = table(Strategy::UserToken, 3, 4, 0);
        let mut m = init_model(&t, 3, 6, 2).unwrap();
        // Make user vectors clearly distinct.
        let uv = m.tensor_mut("user_vecs").unwrap();
        for (i, v) in uv.iter_mut().enumerate() {
            *v = if i < 4 { 1.0 } else { -1.0 };
        }
        let x = [0.2, -0.4, 0.6];
        let p0 = m.forward(&x, "a00").unwrap();
        let p1 = m.forward(&x, "a01").unwrap();
        assert_ne!(p0.logit, p1.logit);
        assert!(m.forward(&x, "stranger").is_err());
    }

    #[test]
    fn multi_task_heads_are_per_annotator() {
        let t = table(Strategy::MultiTask, 3, 0, 0);
        let m = init_model(&t, 4, 5, 3).unwrap();
        let x = [0.1, 0.2, 0.3, 0.4];
        let p0 = m.forward(&x, "a00").unwrap();
        let p1 = m.forward(&x, "a01").unwrap();
        assert_ne!(p0.logit, p1.logit);
    }

    #[test]
    fn loss_matches_handwritten_bce() {
        let m = hand_model();
        let xs = vec![vec![0.3, 0.6]];
        let batch = [Example {
            x_index: 0,
            annotator: 0,
            label: 1,
        }];
        let (loss, _) = m.loss_and_gradients(&xs, &batch).unwrap();
        let z = m.forward(&[0.3, 0.6], "x").unwrap().logit;
        let want = (1.0 + z.exp()).ln() - z;
        assert!((loss - want).abs() < 1e-15);
    }

    #[test]
    fn multi_task_loss_averages_over_instances_not_examples() {
        let t = table(Strategy::MultiTask, 3, 0, 0);
        let m = init_model(&t, 2, 4, 5).unwrap();
        let xs = vec![vec![0.5, -0.2], vec![-0.7, 0.9]];
        // Instance 0 has two annotators, instance 1 has one.
        let batch = [
            Example { x_index: 0, annotator: 0, label: 1 },
            Example { x_index: 0, annotator: 1, label: 0 },
            Example { x_index: 1, annotator: 2, label: 1 },
        ];
        let (loss, _) = m.loss_and_gradients(&xs, &batch).unwrap();
        let mut sum = 0.0;
        for ex in &batch {
            let id = m.annotator_ids()[ex.annotator].clone();
            let z = m.forward(&xs[ex.x_index], &id).unwrap().logit;
            sum += (1.0 + z.exp()).ln() - ex.label as f64 * z;
        }
        assert!((loss - sum / 2.0).abs() < 1e-12, "two distinct instances");
    }

    fn fd_check(m: &mut ModelParams, xs: &[Vec<f64>], batch: &[Example]) {
        let (_, grads) = m.loss_and_gradients(xs, batch).unwrap();
        let h = 1e-5;
        for name in m.trainable_names() {
            let len = m.tensor(name).unwrap().len();
            for k in 0..len {
                let orig = m.tensor(name).unwrap()[k];
                m.tensor_mut(name).unwrap()[k] = orig + h;
                let (lp, _) = m.loss_and_gradients(xs, batch).unwrap();
                m.tensor_mut(name).unwrap()[k] = orig - h;
                let (lm, _) = m.loss_and_gradients(xs, batch).unwrap();
                m.tensor_mut(name).unwrap()[k] = orig;
                let fd = (lp - lm) / (2.0 * h);
                let g = grads.tensor(name).unwrap()[k];
                let scale = fd.abs().max(g.abs()).max(1e-6);
                assert!(
                    (fd - g).abs() <= 1e-4 * scale,
                    "{name}[{k}]: fd {fd} vs analytic {g}"
                );
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences_for_every_strategy_family() {
        let mut gen = crate::rng::seeded(7);
        let mut xs = Vec::new();
        for _ in 0..4 {
            xs.push(
                (0..3)
                    .map(|_| crate::rng::standard_normal(&mut gen))
                    .collect::<Vec<f64>>(),
            );
        }
        let batch: Vec<Example> = [
            (0usize, 0usize, 1u8),
            (1, 1, 0),
            (2, 2, 1),
            (0, 1, 0),
            (3, 0, 1),
        ]
        .iter()
        .map(|&(x, a, l)| Example {
            x_index: x,
            annotator: a,
            label: l,
        })
        .collect();

        for (strategy, ud, fd) in [
            (Strategy::None, 0usize, 0usize),
            (Strategy::UserToken, 3, 0),
            (Strategy::Composite, 0, 5),
            (Strategy::CompositeUser, 3, 5),
            (Strategy::MultiTask, 0, 0),
        ] {
            let t = table(strategy, 3, ud, fd);
            let mut m = init_model(&t, 3, 4, 11).unwrap();
            fd_check(&mut m, &xs, &batch);
        }
    }

    #[test]
    fn from_parts_validates_shapes() {
        let m = hand_model();
        let mut tensors: BTreeMap<String, Vec<f64>> = m
            .tensors()
            .into_iter()
            .filter(|(_, t)| !t.is_empty())
            .map(|(n, t)| (n.to_string(), t.to_vec()))
            .collect();
        tensors.get_mut("w1").unwrap().pop();
        assert!(matches!(
            ModelParams::from_parts(m.meta(), tensors).unwrap_err(),
            CoreError::DimensionMismatch { .. }
        ));

        let mut good: BTreeMap<String, Vec<f64>> = m
            .tensors()
            .into_iter()
            .filter(|(_, t)| !t.is_empty())
            .map(|(n, t)| (n.to_string(), t.to_vec()))
            .collect();
        good.insert("mystery".to_string(), vec![1.0]);
        assert!(ModelParams::from_parts(m.meta(), good).is_err());

        let rebuilt = ModelParams::from_parts(
            m.meta(),
            m.tensors()
                .into_iter()
                .map(|(n, t)| (n.to_string(), t.to_vec()))
                .collect(),
        )
        .unwrap();
        assert_eq!(rebuilt, m);
    }

    #[test]
    fn rejects_mismatched_input_dimension() {
        let m = hand_model();
        assert!(matches!(
            m.forward(&[1.0], "x").unwrap_err(),
            CoreError::DimensionMismatch { .. }
        ));
        let xs = vec![vec![1.0]];
        let batch = [Example { x_index: 0, annotator: 0, label: 0 }];
        assert!(m.loss_and_gradients(&xs, &batch).is_err());
    }
}
