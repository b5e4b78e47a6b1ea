//! Annotator-aware modeling for subjective binary classification.
//!
//! Subjective labeling tasks rarely come with a single ground truth: the
//! same text can legitimately receive different labels from different
//! annotators. This crate keeps every individual annotation instead of
//! collapsing them into a majority vote, and provides:
//!
//! - corpus containers for sparse binary annotation matrices, with
//!   agreement statistics (Krippendorff's alpha), majority derivation,
//!   annotator-coverage-aware splitting, seeded subsampling, and a
//!   synthetic corpus generator with planted contrarian annotators
//!   ([`corpus`]);
//! - pluggable instance encoding: an embedding store for precomputed
//!   vectors plus a seeded signed-hashing text encoder ([`encoder`]);
//! - annotator representation strategies, from trainable user tokens to
//!   composite label-history embeddings and authorship-based profiles
//!   ([`repr`]);
//! - a small feed-forward classifier over fixed instance vectors with
//!   exact, hand-derived gradients for every strategy ([`model`]);
//! - a deterministic Adam trainer with early stopping on validation
//!   macro-F1, and evaluation that keeps per-annotation predictions
//!   ([`trainer`], [`metrics`]);
//! - a seeded scaling-study harness that subsamples annotators or
//!   annotations, retrains, and correlates improvement over the shared
//!   baseline with corpus size measures ([`scaling`]).
//!
//! Everything is deterministic given explicit seeds: collections iterate
//! in sorted order, randomness flows through seeded ChaCha20 streams, and
//! repeated runs produce bit-identical results regardless of parallelism
//! in the caller.
//!
//! The crate is `no_std`-compatible (with `alloc`); the default `std`
//! feature only switches float intrinsics and the error trait impl.
#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod corpus;
pub mod encoder;
pub mod error;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod repr;
pub mod rng;
pub mod scaling;
pub mod trainer;

mod math;

pub use error::CoreError;
