//! Corpora with per-annotator labels.
//!
//! The central type is [`Dataset`]: instances, annotators, a sparse binary
//! [`AnnotationMatrix`], optional instance-level splits, and optional
//! auxiliary texts written by annotators. Datasets validate all
//! cross-references on construction and are immutable afterwards; every
//! transformation (splitting, subsampling) builds a new dataset.

mod alpha;
mod majority;
mod split;
mod stats;
mod subsample;
mod synth;
mod types;

pub use alpha::krippendorff_alpha;
pub use majority::majority_labels;
pub use split::split_dataset;
pub use stats::{compute_stats, CorpusStats};
pub use subsample::{subsample_annotations, subsample_annotators, SubsampleMode};
pub use synth::{generate_synthetic, SynthConfig};
pub use types::{AnnotationMatrix, Annotator, Dataset, Instance, Split, TieRule};
