//! Error type shared by all modules.

use alloc::string::String;
use thiserror::Error;

/// Errors produced by corpus handling, modeling, and the experiment
/// harness. Variants carry enough context to report the offending entity.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    /// A configuration value is out of range or inconsistent.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// Input data violates a structural requirement.
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// The same (instance, annotator) pair was annotated twice.
    #[error("duplicate annotation for instance '{instance}' by annotator '{annotator}'")]
    DuplicateAnnotation { instance: String, annotator: String },

    /// An id refers to an entity that does not exist.
    #[error("{kind} '{id}' is referenced but not defined")]
    DanglingReference { kind: &'static str, id: String },

    /// A label outside {0, 1}.
    #[error("label {label} for instance '{instance}' is not binary")]
    InvalidLabel { instance: String, label: u8 },

    /// The annotation matrix is empty.
    #[error("no annotations present")]
    NoAnnotations,

    /// No instance carries two or more annotations, so chance-corrected
    /// agreement has no pairable values.
    #[error("no instance has two or more annotations")]
    NoPairableInstances,

    /// Every pairable annotation holds the same value; expected
    /// disagreement is zero and alpha is undefined.
    #[error("agreement is undefined: all pairable annotations are identical")]
    AgreementUndefined,

    /// An annotator id absent from the model's annotator set.
    #[error("unknown annotator '{0}'")]
    UnknownAnnotator(String),

    /// A vector length does not match the expected dimension.
    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// No embedding is available for an instance or auxiliary text and
    /// no text fallback exists.
    #[error("no embedding available for '{0}' and no text to encode")]
    MissingEmbedding(String),

    /// Two parallel sequences differ in length.
    #[error("length mismatch: {what} has {got} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// A computation needs variation that the input lacks.
    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),

    /// Fewer observations than the computation requires.
    #[error("{what} requires at least {required} observations, got {got}")]
    TooFewObservations {
        what: &'static str,
        required: usize,
        got: usize,
    },

    /// A split has no usable examples.
    #[error("split '{0}' is empty")]
    EmptySplit(&'static str),

    /// Training produced a non-finite loss.
    #[error("training diverged: loss became non-finite at update {update}")]
    NonFiniteLoss { update: u64 },

    /// A prediction dump does not cover the evaluated pairs.
    #[error("prediction dump does not match gold pairs: {0}")]
    DumpMismatch(String),
}
