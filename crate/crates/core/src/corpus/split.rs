//! Seeded train/val/test splitting with annotator coverage repair.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::{AnnotationMatrix, Dataset, Split};
use crate::error::CoreError;
use crate::math;
use crate::rng;

const REPAIR_PASSES: usize = 10;
const COVERAGE_MIN_ANNOTATIONS: usize = 3;

/// Splits instances into train/val/test by the given ratios.
///
/// Instances are shuffled with a ChaCha20 stream seeded by `seed`, then
/// cut into contiguous blocks sized by rounding `ratio * n`. A bounded
/// greedy repair follows: annotators holding at least three annotations
/// should appear in every non-empty split, and the repair swaps
/// low-degree instances between splits (preserving split sizes exactly)
/// until coverage holds or ten passes complete. Coverage is best effort;
/// block sizes are never changed by repair.
pub fn split_dataset(
    dataset: &Dataset,
    ratios: [f64; 3],
    seed: u64,
) -> Result<Dataset, CoreError> {
    for r in ratios {
        if !r.is_finite() || !(0.0..=1.0).contains(&r) {
            return Err(CoreError::InvalidConfig(alloc::format!(
                "split ratio {r} outside [0, 1]"
            )));
        }
    }
    let sum: f64 = ratios.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(CoreError::InvalidConfig(alloc::format!(
            "split ratios sum to {sum}, expected 1"
        )));
    }
    let n = dataset.instances().len();
    if n < 10 {
        return Err(CoreError::TooFewObservations {
            what: "split",
            required: 10,
            got: n,
        });
    }

    let mut ids: Vec<&String> = dataset.instances().keys().collect();
    let mut gen = rng::seeded(seed);
    rng::shuffle(&mut gen, &mut ids);

    let n_train = math::round_nonneg(ratios[0] * n as f64).min(n);
    let n_val = math::round_nonneg(ratios[1] * n as f64).min(n - n_train);
    let sizes = [n_train, n_val, n - n_train - n_val];

    let mut assignment: BTreeMap<String, Split> = BTreeMap::new();
    for (pos, id) in ids.iter().enumerate() {
        let split = if pos < sizes[0] {
            Split::Train
        } else if pos < sizes[0] + sizes[1] {
            Split::Val
        } else {
            Split::Test
        };
        assignment.insert((*id).clone(), split);
    }

    repair_coverage(dataset, &mut assignment, &sizes);
    dataset.with_splits(assignment)
}

fn split_index(s: Split) -> usize {
    match s {
        Split::Train => 0,
        Split::Val => 1,
        Split::Test => 2,
    }
}

/// Swaps instances between splits so that every annotator with at least
/// [`COVERAGE_MIN_ANNOTATIONS`] annotations reaches all non-empty splits,
/// as far as safe swaps exist within the pass budget.
fn repair_coverage(
    dataset: &Dataset,
    assignment: &mut BTreeMap<String, Split>,
    sizes: &[usize; 3],
) {
    let matrix = dataset.matrix();
    let eligible: Vec<String> = matrix
        .annotator_counts()
        .into_iter()
        .filter(|(_, c)| *c >= COVERAGE_MIN_ANNOTATIONS)
        .map(|(a, _)| a)
        .collect();
    if eligible.is_empty() {
        return;
    }

    // Per-annotator instance counts in each split, for eligible annotators.
    let mut counts: BTreeMap<&str, [usize; 3]> = BTreeMap::new();
    for a in &eligible {
        counts.insert(a.as_str(), [0; 3]);
    }
    for (i, a, _) in matrix.iter() {
        if let Some(c) = counts.get_mut(a) {
            c[split_index(assignment[i])] += 1;
        }
    }

    for _ in 0..REPAIR_PASSES {
        let mut changed = false;
        for a in &eligible {
            for target in Split::ALL {
                let t = split_index(target);
                if sizes[t] == 0 || counts[a.as_str()][t] > 0 {
                    continue;
                }
                if try_swap_into(a, target, matrix, assignment, &mut counts) {
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// Attempts one size-preserving swap that gives annotator `a` presence in
/// `target` without uncovering any other eligible annotator. Candidates
/// are scanned lowest degree first so dense instances stay put.
fn try_swap_into(
    a: &str,
    target: Split,
    matrix: &AnnotationMatrix,
    assignment: &mut BTreeMap<String, Split>,
    counts: &mut BTreeMap<&str, [usize; 3]>,
) -> bool {
    let t = split_index(target);

    // Instances of `a` that may leave their split: the donor split must
    // retain a presence for `a` and for every other eligible annotator on
    // the instance (unless the incoming partner restores it).
    let mut movable: Vec<(usize, String, Split)> = Vec::new();
    for (i, who, _) in matrix.iter() {
        if who != a {
            continue;
        }
        let donor = assignment[i];
        if donor == target {
            continue;
        }
        if counts[a][split_index(donor)] < 2 {
            continue;
        }
        movable.push((matrix.degree(i), i.to_string(), donor));
    }
    movable.sort_unstable();

    let mut partners: Vec<(usize, String)> = assignment
        .iter()
        .filter(|(_, &s)| s == target)
        .map(|(i, _)| (matrix.degree(i), i.clone()))
        .collect();
    partners.sort_unstable();

    for (_, outgoing, donor) in &movable {
        let d = split_index(*donor);
        for (_, partner) in &partners {
            let partner_restores = |b: &str| matrix.get(partner, b).is_some();
            let outgoing_restores = |b: &str| matrix.get(outgoing, b).is_some();

            let donor_safe = matrix.labels_of(outgoing).all(|(b, _)| {
                counts
                    .get(b)
                    .is_none_or(|c| c[d] >= 2 || partner_restores(b))
            });
            if !donor_safe {
                continue;
            }
            let target_safe = matrix.labels_of(partner).all(|(b, _)| {
                counts
                    .get(b)
                    .is_none_or(|c| c[t] >= 2 || outgoing_restores(b))
            });
            if !target_safe {
                continue;
            }

            for (b, _) in matrix.labels_of(outgoing) {
                if let Some(c) = counts.get_mut(b) {
                    c[d] -= 1;
                    c[t] += 1;
                }
            }
            for (b, _) in matrix.labels_of(partner) {
                if let Some(c) = counts.get_mut(b) {
                    c[t] -= 1;
                    c[d] += 1;
                }
            }
            assignment.insert(outgoing.clone(), target);
            assignment.insert(partner.clone(), *donor);
            return true;
        }
    }
    false
}
