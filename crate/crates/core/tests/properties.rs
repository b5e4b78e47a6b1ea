//! Property tests for the library's structural invariants.

use std::collections::BTreeMap;

use annomod_core::corpus::{
    compute_stats, krippendorff_alpha, split_dataset, subsample_annotations, AnnotationMatrix,
    Annotator, Dataset, Instance, Split,
};
use annomod_core::encoder::{hash_encode, HashEncoderConfig};
use annomod_core::metrics::{accuracy, betainc, macro_f1, pearson};
use annomod_core::model::{init_model, Example};
use annomod_core::repr::{AnnotatorTable, Strategy};
use annomod_core::trainer::AdamOptimizer;
use proptest::prelude::*;

fn dataset_from_matrix(matrix: AnnotationMatrix) -> Dataset {
    let instances: Vec<Instance> = matrix
        .instance_ids()
        .map(|id| Instance {
            id: id.to_string(),
            text: String::new(),
        })
        .collect();
    let mut annotator_ids: Vec<&str> = matrix.iter().map(|(_, a, _)| a).collect();
    annotator_ids.sort_unstable();
    annotator_ids.dedup();
    let annotators: Vec<Annotator> = annotator_ids
        .into_iter()
        .map(|id| Annotator {
            id: id.to_string(),
            aux_text_ids: vec![],
        })
        .collect();
    Dataset::new(instances, annotators, matrix, None, BTreeMap::new()).unwrap()
}

/// Sparse random matrix: duplicate (instance, annotator) pairs are
/// dropped rather than rejected.
fn matrix_from_entries(entries: &[(u8, u8, bool)]) -> AnnotationMatrix {
    let mut matrix = AnnotationMatrix::new();
    for &(i, a, l) in entries {
        let _ = matrix.insert(
            &format!("i{:02}", i % 20),
            &format!("a{}", a % 8),
            u8::from(l),
        );
    }
    matrix
}

proptest! {
    #[test]
    fn hash_vectors_are_unit_or_zero(
        text in "[a-zA-Z0-9 ,.!?']{0,120}",
        dim in 8usize..48,
        seed: u64,
    ) {
        let cfg = HashEncoderConfig { dim, seed, ..HashEncoderConfig::default() };
        let v = hash_encode(&text, &cfg);
        prop_assert_eq!(v.len(), dim);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!(norm == 0.0 || (norm - 1.0).abs() < 1e-9, "norm {}", norm);
        prop_assert_eq!(norm == 0.0, text.split_whitespace().next().is_none());
    }

    #[test]
    fn hash_encoding_is_seed_stable(text in "[a-z ]{1,60}", seed: u64) {
        let cfg = HashEncoderConfig { dim: 16, seed, ..HashEncoderConfig::default() };
        prop_assert_eq!(hash_encode(&text, &cfg), hash_encode(&text, &cfg));
    }

    #[test]
    fn macro_f1_is_bounded_and_class_symmetric(
        pairs in prop::collection::vec((0u8..2, 0u8..2), 1..200),
    ) {
        let preds: Vec<u8> = pairs.iter().map(|p| p.0).collect();
        let golds: Vec<u8> = pairs.iter().map(|p| p.1).collect();
        let f1 = macro_f1(&preds, &golds).unwrap();
        prop_assert!((0.0..=1.0).contains(&f1));
        // Macro averaging makes the score invariant to renaming classes.
        let flip = |v: &[u8]| v.iter().map(|&x| 1 - x).collect::<Vec<u8>>();
        let flipped = macro_f1(&flip(&preds), &flip(&golds)).unwrap();
        prop_assert!((f1 - flipped).abs() < 1e-12);
        let acc = accuracy(&preds, &golds).unwrap();
        prop_assert!((0.0..=1.0).contains(&acc));
        if preds == golds {
            prop_assert_eq!(f1, 1.0);
        }
    }

    #[test]
    fn alpha_never_exceeds_one(
        entries in prop::collection::vec((any::<u8>(), any::<u8>(), any::<bool>()), 1..160),
    ) {
        let matrix = matrix_from_entries(&entries);
        if let Ok(alpha) = krippendorff_alpha(&matrix) {
            prop_assert!(alpha.is_finite());
            prop_assert!(alpha <= 1.0 + 1e-12, "alpha {}", alpha);
        }
    }

    #[test]
    fn corpus_stats_count_exactly(
        entries in prop::collection::vec((any::<u8>(), any::<u8>(), any::<bool>()), 1..160),
    ) {
        let matrix = matrix_from_entries(&entries);
        let dataset = dataset_from_matrix(matrix.clone());
        let stats = compute_stats(&dataset).unwrap();
        prop_assert_eq!(stats.num_annotations, matrix.len());
        prop_assert_eq!(stats.num_instances, dataset.instances().len());
        let mean_total = stats.ann_per_annotator_mean * stats.num_annotators as f64;
        prop_assert!((mean_total - matrix.len() as f64).abs() < 1e-9);
    }

    #[test]
    fn betainc_stays_in_unit_interval(
        a in 0.1f64..40.0,
        b in 0.1f64..40.0,
        x in 0.0f64..=1.0,
    ) {
        let v = betainc(a, b, x).unwrap();
        prop_assert!((0.0..=1.0).contains(&v), "I({},{},{}) = {}", a, b, x, v);
        let complement = betainc(b, a, 1.0 - x).unwrap();
        prop_assert!((v + complement - 1.0).abs() < 1e-9);
    }

    #[test]
    fn betainc_is_monotone_in_x(
        a in 0.2f64..20.0,
        b in 0.2f64..20.0,
        x1 in 0.0f64..=1.0,
        x2 in 0.0f64..=1.0,
    ) {
        let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
        let vlo = betainc(a, b, lo).unwrap();
        let vhi = betainc(a, b, hi).unwrap();
        prop_assert!(vlo <= vhi + 1e-12);
    }

    #[test]
    fn pearson_estimates_are_bounded(
        points in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 3..60),
    ) {
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        if let Ok((r, p)) = pearson(&xs, &ys) {
            prop_assert!((-1.0..=1.0).contains(&r));
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn adam_first_step_is_sign_following(
        magnitude in 1e-6f64..1e6,
        negative: bool,
        lr in 1e-5f64..1.0,
    ) {
        let g = if negative { -magnitude } else { magnitude };
        let mut opt = AdamOptimizer::new(lr, 0.9, 0.999, 1e-8, &[1]);
        let mut p = vec![0.0f64];
        opt.step(&mut [p.as_mut_slice()], &[&[g]]);
        let want = -lr * g / (g.abs() + 1e-8);
        prop_assert!((p[0] - want).abs() <= 1e-12 * want.abs() + 1e-300);
    }

    #[test]
    fn subsampling_everything_is_identity(
        entries in prop::collection::vec((any::<u8>(), any::<u8>(), any::<bool>()), 1..120),
        seed: u64,
    ) {
        let matrix = matrix_from_entries(&entries);
        let dataset = dataset_from_matrix(matrix);
        let full = subsample_annotations(&dataset, 1.0, seed).unwrap();
        prop_assert_eq!(full.matrix(), dataset.matrix());
        prop_assert_eq!(full.instances(), dataset.instances());
    }
}

fn line_dataset(n: usize) -> Dataset {
    let mut matrix = AnnotationMatrix::new();
    for i in 0..n {
        matrix
            .insert(&format!("i{:03}", i), "a0", (i % 2) as u8)
            .unwrap();
    }
    dataset_from_matrix(matrix)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn splits_partition_with_rounded_sizes(
        n in 10usize..80,
        ratio_idx in 0usize..3,
        seed: u64,
    ) {
        let ratios = [
            [0.8, 0.1, 0.1],
            [0.6, 0.2, 0.2],
            [1.0 / 3.0, 1.0 / 3.0, 1.0 - 2.0 / 3.0],
        ][ratio_idx];
        let dataset = line_dataset(n);
        let split = split_dataset(&dataset, ratios, seed).unwrap();
        let assignment = split.splits().unwrap();
        prop_assert_eq!(assignment.len(), n);

        let count = |s: Split| assignment.values().filter(|&&v| v == s).count();
        let n_train = ((ratios[0] * n as f64) + 0.5) as usize;
        let n_train = n_train.min(n);
        let n_val = (((ratios[1] * n as f64) + 0.5) as usize).min(n - n_train);
        prop_assert_eq!(count(Split::Train), n_train);
        prop_assert_eq!(count(Split::Val), n_val);
        prop_assert_eq!(count(Split::Test), n - n_train - n_val);

        let again = split_dataset(&dataset, ratios, seed).unwrap();
        prop_assert_eq!(again.splits().unwrap(), assignment);
    }
}

fn table_for(strategy: Strategy, k: usize) -> AnnotatorTable {
    let user_dim = if strategy.uses_user_slot() { 2 } else { 0 };
    let fixed_dim = if strategy.uses_fixed_slot() { 2 } else { 0 };
    AnnotatorTable {
        strategy,
        annotator_ids: (0..k).map(|i| format!("a{}", i)).collect(),
        user_dim,
        fixed_dim,
        user_init: (0..k * user_dim).map(|i| 0.01 * (i as f64 + 1.0)).collect(),
        fixed_init: (0..k * fixed_dim).map(|i| 0.1 * (i as f64) - 0.2).collect(),
    }
}

fn strategy_from(idx: usize) -> Strategy {
    Strategy::ALL[idx % Strategy::ALL.len()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn predictions_are_calibrated_probabilities(
        strategy_idx in 0usize..7,
        x in prop::collection::vec(-10.0f64..10.0, 3),
        annotator in 0usize..2,
        seed: u64,
    ) {
        let strategy = strategy_from(strategy_idx);
        let table = table_for(strategy, 2);
        let params = init_model(&table, 3, 4, seed).unwrap();
        let p = params.forward_indexed(&x, annotator).unwrap();
        prop_assert!(p.probability > 0.0 && p.probability < 1.0);
        prop_assert_eq!(p.label, u8::from(p.logit >= 0.0));
        let by_id = params
            .forward(&x, &format!("a{}", annotator))
            .unwrap();
        prop_assert_eq!(p, by_id);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Light finite-difference audit of the analytic gradients.
    #[test]
    fn gradients_match_finite_differences(
        strategy_idx in 0usize..7,
        seed: u64,
        labels in prop::collection::vec(0u8..2, 4),
    ) {
        let strategy = strategy_from(strategy_idx);
        let table = table_for(strategy, 2);
        let params = init_model(&table, 3, 4, seed).unwrap();
        let xs: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| ((i * 3 + j) as f64).sin()).collect())
            .collect();
        let batch: Vec<Example> = labels
            .iter()
            .enumerate()
            .map(|(i, &label)| Example {
                x_index: i % 3,
                annotator: i % 2,
                label,
            })
            .collect();
        let (_, grads) = params.loss_and_gradients(&xs, &batch).unwrap();

        let h = 1e-5;
        for name in params.trainable_names() {
            let g = grads.tensor(name).unwrap();
            let len = g.len();
            for idx in [0, len / 2, len - 1] {
                let mut plus = params.clone();
                plus.tensor_mut(name).unwrap()[idx] += h;
                let (lp, _) = plus.loss_and_gradients(&xs, &batch).unwrap();
                let mut minus = params.clone();
                minus.tensor_mut(name).unwrap()[idx] -= h;
                let (lm, _) = minus.loss_and_gradients(&xs, &batch).unwrap();
                let fd = (lp - lm) / (2.0 * h);
                let scale = fd.abs().max(g[idx].abs()).max(1e-6);
                prop_assert!(
                    (fd - g[idx]).abs() / scale < 1e-4,
                    "{} [{}]: fd {} vs grad {}",
                    name, idx, fd, g[idx]
                );
            }
        }
    }
}
