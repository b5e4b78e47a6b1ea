//! File formats: dataset interchange JSON lines, binary embeddings and
//! checkpoints, the trial ledger, and prediction dumps.

pub mod checkpoint;
pub mod dataset;
pub mod dump;
pub mod embedding;
pub mod ledger;
