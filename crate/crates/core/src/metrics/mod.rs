//! Classification and correlation metrics.
//!
//! The central score is two-class macro-averaged F1 computed over pooled
//! per-annotation predictions. A class absent from both golds and
//! predictions scores F1 1.0; a class absent from golds but predicted
//! scores 0.0. Majority F1 compares modal predicted labels with modal
//! gold labels per instance under a tie rule. Pearson correlation comes
//! with a two-tailed p-value from the exact t-distribution identity.

mod special;

pub use special::{betainc, ln_gamma};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{majority_labels, AnnotationMatrix, TieRule};
use crate::error::CoreError;
use crate::math;

/// One per-annotation prediction, as written to prediction dumps.
#[derive(Debug, Clone, PartialEq)]
pub struct PredRow {
    pub instance_id: String,
    pub annotator_id: String,
    pub gold: u8,
    pub prob: f64,
    pub pred: u8,
}

fn check_labels(preds: &[u8], golds: &[u8], what: &'static str) -> Result<(), CoreError> {
    if preds.len() != golds.len() {
        return Err(CoreError::LengthMismatch {
            what: "predictions",
            expected: golds.len(),
            got: preds.len(),
        });
    }
    if preds.is_empty() {
        return Err(CoreError::TooFewObservations {
            what,
            required: 1,
            got: 0,
        });
    }
    Ok(())
}

/// Two-class macro-averaged F1.
///
/// Labels must be binary. For each class, F1 is `2tp / (2tp + fp + fn)`;
/// when the class never occurs in the golds, F1 is 1.0 if it is never
/// predicted and 0.0 otherwise. The result is the unweighted mean of both
/// class scores.
pub fn macro_f1(preds: &[u8], golds: &[u8]) -> Result<f64, CoreError> {
    check_labels(preds, golds, "macro F1")?;
    let mut sum = 0.0;
    for class in [0u8, 1u8] {
        let mut tp = 0usize;
        let mut fp = 0usize;
        let mut fn_ = 0usize;
        for (&p, &g) in preds.iter().zip(golds) {
            if p > 1 || g > 1 {
                return Err(CoreError::InvalidLabel {
                    instance: String::new(),
                    label: p.max(g),
                });
            }
            match (p == class, g == class) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => {}
            }
        }
        let f1 = if tp + fn_ == 0 {
            if fp == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            2.0 * tp as f64 / (2.0 * tp as f64 + fp as f64 + fn_ as f64)
        };
        sum += f1;
    }
    Ok(sum / 2.0)
}

/// Plain accuracy over label pairs.
pub fn accuracy(preds: &[u8], golds: &[u8]) -> Result<f64, CoreError> {
    check_labels(preds, golds, "accuracy")?;
    let hits = preds.iter().zip(golds).filter(|(p, g)| p == g).count();
    Ok(hits as f64 / preds.len() as f64)
}

/// Mean of per-annotator macro F1 scores, each annotator weighted
/// equally regardless of annotation count.
pub fn per_annotator_macro_f1(rows: &[PredRow]) -> Result<f64, CoreError> {
    if rows.is_empty() {
        return Err(CoreError::TooFewObservations {
            what: "per-annotator macro F1",
            required: 1,
            got: 0,
        });
    }
    let mut grouped: BTreeMap<&str, (Vec<u8>, Vec<u8>)> = BTreeMap::new();
    for row in rows {
        let entry = grouped.entry(row.annotator_id.as_str()).or_default();
        entry.0.push(row.pred);
        entry.1.push(row.gold);
    }
    let mut sum = 0.0;
    let k = grouped.len();
    for (preds, golds) in grouped.values() {
        sum += macro_f1(preds, golds)?;
    }
    Ok(sum / k as f64)
}

/// Macro F1 between modal predicted and modal gold labels per instance.
///
/// `gold_matrix` must hold exactly the annotations the rows predict:
/// every (instance, annotator) pair must appear on both sides with equal
/// gold labels, otherwise the dump cannot be trusted and an error is
/// returned. Ties on either side resolve through `tie`.
pub fn majority_f1(
    rows: &[PredRow],
    gold_matrix: &AnnotationMatrix,
    tie: TieRule,
) -> Result<f64, CoreError> {
    if rows.is_empty() {
        return Err(CoreError::TooFewObservations {
            what: "majority F1",
            required: 1,
            got: 0,
        });
    }
    let mut seen: BTreeSet<(&str, &str)> = BTreeSet::new();
    let mut pred_matrix = AnnotationMatrix::new();
    for row in rows {
        match gold_matrix.get(&row.instance_id, &row.annotator_id) {
            None => {
                return Err(CoreError::DumpMismatch(alloc::format!(
                    "row ({}, {}) has no gold annotation",
                    row.instance_id, row.annotator_id
                )))
            }
            Some(g) if g != row.gold => {
                return Err(CoreError::DumpMismatch(alloc::format!(
                    "row ({}, {}) gold {} disagrees with matrix {}",
                    row.instance_id, row.annotator_id, row.gold, g
                )))
            }
            Some(_) => {}
        }
        pred_matrix.insert(&row.instance_id, &row.annotator_id, row.pred)?;
        seen.insert((row.instance_id.as_str(), row.annotator_id.as_str()));
    }
    if seen.len() != gold_matrix.len() {
        return Err(CoreError::DumpMismatch(alloc::format!(
            "dump covers {} of {} gold annotations",
            seen.len(),
            gold_matrix.len()
        )));
    }

    let gold_modal = majority_labels(gold_matrix, tie);
    let pred_modal = majority_labels(&pred_matrix, tie);
    let mut preds = Vec::with_capacity(gold_modal.len());
    let mut golds = Vec::with_capacity(gold_modal.len());
    for (instance, g) in &gold_modal {
        preds.push(pred_modal[instance]);
        golds.push(*g);
    }
    macro_f1(&preds, &golds)
}

/// Pearson correlation with a two-tailed p-value.
///
/// Needs at least three pairs and nonzero variance on both sides. The
/// p-value uses `t = r sqrt((n-2) / (1-r^2))` and the incomplete-beta
/// form of the t-distribution tail; a perfectly linear relation gives
/// p = 0.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<(f64, f64), CoreError> {
    if xs.len() != ys.len() {
        return Err(CoreError::LengthMismatch {
            what: "correlation input",
            expected: xs.len(),
            got: ys.len(),
        });
    }
    let n = xs.len();
    if n < 3 {
        return Err(CoreError::TooFewObservations {
            what: "correlation",
            required: 3,
            got: n,
        });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(CoreError::InvalidData(
            "non-finite correlation input".into(),
        ));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(CoreError::ZeroVariance("correlation input"));
    }
    let r = (sxy / math::sqrt(sxx * syy)).clamp(-1.0, 1.0);

    let df = nf - 2.0;
    let r2 = r * r;
    let p = if r2 >= 1.0 {
        0.0
    } else {
        let t2 = r2 * df / (1.0 - r2);
        betainc(df / 2.0, 0.5, df / (df + t2))?
    };
    Ok((r, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn macro_f1_hand_example() {
        // All-positive predictions against golds (1, 1, 0, 0):
        // class 1 scores 2/3, class 0 scores 0, mean is 1/3.
        let f1 = macro_f1(&[1, 1, 1, 1], &[1, 1, 0, 0]).unwrap();
        assert!((f1 - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn absent_class_rule() {
        // Class 0 absent from golds and predictions: counts as 1.0.
        assert_eq!(macro_f1(&[1, 1], &[1, 1]).unwrap(), 1.0);
        // Class 0 absent from golds but predicted: counts as 0.0.
        let f1 = macro_f1(&[1, 0], &[1, 1]).unwrap();
        assert!((f1 - (2.0 / 3.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn perfect_and_inverted_predictions() {
        assert_eq!(macro_f1(&[0, 1, 0, 1], &[0, 1, 0, 1]).unwrap(), 1.0);
        assert_eq!(macro_f1(&[1, 0, 1, 0], &[0, 1, 0, 1]).unwrap(), 0.0);
    }

    #[test]
    fn macro_f1_rejects_bad_input() {
        assert!(macro_f1(&[], &[]).is_err());
        assert!(macro_f1(&[1], &[1, 0]).is_err());
        assert!(macro_f1(&[2], &[1]).is_err());
    }

    #[test]
    fn accuracy_counts_hits() {
        assert_eq!(accuracy(&[1, 0, 1, 1], &[1, 1, 1, 0]).unwrap(), 0.5);
    }

    fn row(i: &str, a: &str, gold: u8, pred: u8) -> PredRow {
        PredRow {
            instance_id: i.to_string(),
            annotator_id: a.to_string(),
            gold,
            prob: if pred == 1 { 0.9 } else { 0.1 },
            pred,
        }
    }

    #[test]
    fn per_annotator_mean_weights_annotators_equally() {
        // a1 is perfect on 4 rows, a2 is always wrong on 1 row.
        let rows = vec![
            row("i1", "a1", 1, 1),
            row("i2", "a1", 0, 0),
            row("i3", "a1", 1, 1),
            row("i4", "a1", 0, 0),
            row("i1", "a2", 1, 0),
        ];
        let got = per_annotator_macro_f1(&rows).unwrap();
        assert!((got - 0.5).abs() < 1e-15, "got {got}");
    }

    fn matrix(entries: &[(&str, &str, u8)]) -> AnnotationMatrix {
        let mut m = AnnotationMatrix::new();
        for &(i, a, l) in entries {
            m.insert(i, a, l).unwrap();
        }
        m
    }

    #[test]
    fn majority_f1_compares_modal_labels() {
        let gold = matrix(&[
            ("i1", "a1", 1),
            ("i1", "a2", 1),
            ("i1", "a3", 0),
            ("i2", "a1", 0),
            ("i2", "a2", 0),
        ]);
        // Predictions flip a3 on i1 (modal pred still 1) and both on i2
        // (modal pred becomes 1, gold modal is 0).
        let rows = vec![
            row("i1", "a1", 1, 1),
            row("i1", "a2", 1, 1),
            row("i1", "a3", 0, 1),
            row("i2", "a1", 0, 1),
            row("i2", "a2", 0, 1),
        ];
        let got = majority_f1(&rows, &gold, TieRule::PositiveWins).unwrap();
        // Modal pairs: i1 (pred 1, gold 1), i2 (pred 1, gold 0).
        let expect = macro_f1(&[1, 1], &[1, 0]).unwrap();
        assert_eq!(got, expect);
    }

    #[test]
    fn majority_f1_applies_the_tie_rule() {
        let gold = matrix(&[("i1", "a1", 1), ("i1", "a2", 0)]);
        let rows = vec![row("i1", "a1", 1, 1), row("i1", "a2", 0, 0)];
        // Tie on both sides; both resolve the same way, so F1 is 1.
        assert_eq!(
            majority_f1(&rows, &gold, TieRule::PositiveWins).unwrap(),
            1.0
        );
        assert_eq!(
            majority_f1(&rows, &gold, TieRule::NegativeWins).unwrap(),
            1.0
        );
    }

    #[test]
    fn majority_f1_rejects_uncovered_or_inconsistent_dumps() {
        let gold = matrix(&[("i1", "a1", 1), ("i1", "a2", 0)]);
        let partial = vec![row("i1", "a1", 1, 1)];
        assert!(matches!(
            majority_f1(&partial, &gold, TieRule::PositiveWins).unwrap_err(),
            CoreError::DumpMismatch(_)
        ));
        let wrong_gold = vec![row("i1", "a1", 0, 1), row("i1", "a2", 0, 0)];
        assert!(matches!(
            majority_f1(&wrong_gold, &gold, TieRule::PositiveWins).unwrap_err(),
            CoreError::DumpMismatch(_)
        ));
        let stray = vec![
            row("i1", "a1", 1, 1),
            row("i1", "a2", 0, 0),
            row("i9", "a1", 1, 1),
        ];
        assert!(matches!(
            majority_f1(&stray, &gold, TieRule::PositiveWins).unwrap_err(),
            CoreError::DumpMismatch(_)
        ));
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn pearson_reference_values() {
        let xs: Vec<f64> = (1..=10).map(|v| v as f64).collect();
        let ys = vec![2.1, 1.8, 3.9, 3.2, 5.5, 4.9, 7.3, 6.1, 8.8, 9.4];
        let (r, p) = pearson(&xs, &ys).unwrap();
        assert!((r - 0.954_746_984_428_874_4).abs() < 1e-12, "r {r}");
        let want_p = 1.736_947_972_469_192_9e-5;
        assert!((p - want_p).abs() < 1e-9 * want_p.max(1e-12), "p {p}");
    }

    #[test]
    fn pearson_is_scale_and_shift_invariant() {
        let xs = vec![0.4, 1.9, 2.2, 3.3, 4.8, 5.1];
        let ys = vec![1.1, 0.7, 2.9, 2.1, 3.8, 3.0];
        let (r1, p1) = pearson(&xs, &ys).unwrap();
        let scaled: Vec<f64> = xs.iter().map(|x| 7.0 * x - 3.0).collect();
        let (r2, p2) = pearson(&scaled, &ys).unwrap();
        assert!((r1 - r2).abs() < 1e-12);
        assert!((p1 - p2).abs() < 1e-12);
        let (r3, _) = pearson(&ys, &xs).unwrap();
        assert!((r1 - r3).abs() < 1e-12);
    }

    #[test]
    fn perfectly_linear_data_has_zero_p() {
        let xs = vec![1.0, 2.0, 3.0, 4.0];
        let ys = vec![3.0, 5.0, 7.0, 9.0];
        let (r, p) = pearson(&xs, &ys).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        assert_eq!(p, 0.0);
        let neg: Vec<f64> = ys.iter().map(|y| -y).collect();
        let (r, _) = pearson(&xs, &neg).unwrap();
        assert!((r + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_rejects_degenerate_input() {
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0, 2.0]).unwrap_err(),
            CoreError::TooFewObservations { .. }
        ));
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap_err(),
            CoreError::ZeroVariance(_)
        ));
        assert!(pearson(&[1.0, 2.0, f64::NAN], &[1.0, 2.0, 3.0]).is_err());
    }
}
