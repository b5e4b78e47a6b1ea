//! Majority label derivation.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};

use crate::corpus::{AnnotationMatrix, TieRule};

/// Modal label per instance under the given tie rule. Instances without
/// annotations are omitted.
pub fn majority_labels(matrix: &AnnotationMatrix, tie: TieRule) -> BTreeMap<String, u8> {
    let mut out = BTreeMap::new();
    for instance in matrix.instance_ids() {
        let ones = matrix.labels_of(instance).filter(|&(_, l)| l == 1).count();
        let zeros = matrix.degree(instance) - ones;
        if ones + zeros == 0 {
            continue;
        }
        out.insert(instance.to_string(), tie.resolve(ones, zeros));
    }
    out
}
