//! Krippendorff's alpha for nominal binary data with missing annotations.

use crate::corpus::AnnotationMatrix;
use crate::error::CoreError;

/// Chance-corrected inter-annotator agreement.
///
/// Uses the coincidence-matrix formulation: each instance annotated by
/// `m >= 2` annotators contributes its ordered label pairs with weight
/// `1 / (m - 1)`; instances with fewer than two annotations are excluded.
/// With observed disagreement `D_o` and expected disagreement `D_e`,
/// alpha is `1 - D_o / D_e`.
///
/// Unanimous agreement over a corpus that contains both label values
/// yields exactly `1.0`. When every pairable annotation carries the same
/// value, `D_e` is zero and agreement is undefined, which is reported as
/// an error rather than a number.
pub fn krippendorff_alpha(matrix: &AnnotationMatrix) -> Result<f64, CoreError> {
    // Coincidence mass by label pair: o[v][u] over v, u in {0, 1}.
    let mut o = [[0.0f64; 2]; 2];
    let mut pairable = false;
    for instance in matrix.instance_ids() {
        let m = matrix.degree(instance);
        if m < 2 {
            continue;
        }
        pairable = true;
        let ones = matrix
            .labels_of(instance)
            .filter(|&(_, l)| l == 1)
            .count() as f64;
        let zeros = m as f64 - ones;
        let w = 1.0 / (m as f64 - 1.0);
        o[0][0] += zeros * (zeros - 1.0) * w;
        o[1][1] += ones * (ones - 1.0) * w;
        o[0][1] += zeros * ones * w;
        o[1][0] += ones * zeros * w;
    }
    if !pairable {
        return Err(CoreError::NoPairableInstances);
    }

    let n0 = o[0][0] + o[0][1];
    let n1 = o[1][0] + o[1][1];
    let n = n0 + n1;
    let d_e = 2.0 * n0 * n1 / (n * (n - 1.0));
    if d_e == 0.0 {
        return Err(CoreError::AgreementUndefined);
    }
    let d_o = (o[0][1] + o[1][0]) / n;
    Ok(1.0 - d_o / d_e)
}
