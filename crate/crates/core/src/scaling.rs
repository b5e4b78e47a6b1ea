//! Scaling-study harness: subsampled trials over annotator-count and
//! annotation-fraction grids, and the correlation analysis between
//! improvement over the annotator-blind baseline and annotation volume.
//!
//! Every random choice in a trial is derived from the master seed and a
//! textual tag, so trials can run in any order, in parallel, or be
//! recomputed individually with identical results. Subsample and split
//! tags deliberately omit the strategy name: all strategies at one
//! (dataset, scale point, run) cell see the same data.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::{
    compute_stats, split_dataset, subsample_annotations, subsample_annotators, Dataset,
    SubsampleMode, TieRule,
};
use crate::encoder::EmbeddingStore;
use crate::error::CoreError;
use crate::metrics::{pearson, PredRow};
use crate::pipeline::{run_strategy, StrategySpec};
use crate::repr::{AuthorshipConfig, Strategy};
use crate::rng;
use crate::trainer::{Hyperparams, TrainHistory};

/// One point on a scaling grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalePoint {
    /// Keep `k` randomly chosen annotators, all their annotations.
    Annotators(usize),
    /// Keep `annotators` annotators, then a percentage of each retained
    /// annotator's annotations.
    AnnotationFraction { annotators: usize, fraction_pct: u32 },
}

impl ScalePoint {
    /// Stable tag used in trial ids and seed derivation.
    pub fn tag(&self) -> String {
        match self {
            ScalePoint::Annotators(k) => format!("ann:k{k}"),
            ScalePoint::AnnotationFraction {
                annotators,
                fraction_pct,
            } => format!("frac:k{annotators}:f{fraction_pct}"),
        }
    }

    /// Fraction of annotations kept, in (0, 1].
    pub fn fraction(&self) -> f64 {
        match self {
            ScalePoint::Annotators(_) => 1.0,
            ScalePoint::AnnotationFraction { fraction_pct, .. } => {
                f64::from(*fraction_pct) / 100.0
            }
        }
    }
}

/// Annotator counts studied for a corpus with `total` annotators.
///
/// Small corpora are swept exhaustively from 2. Larger ones use a grid
/// that is dense while annotators are few and opens up as they grow:
/// every 2 up to 18, every 4 up to 82, then every 100.
pub fn annotator_count_schedule(total: usize) -> Vec<usize> {
    if total < 2 {
        return Vec::new();
    }
    if total <= 8 {
        return (2..=total).collect();
    }
    let mut points = Vec::new();
    let mut k = 6;
    while k <= total.min(18) {
        points.push(k);
        k += 2;
    }
    k = 22;
    while k <= total.min(82) {
        points.push(k);
        k += 4;
    }
    k = 100;
    while k <= total {
        points.push(k);
        k += 100;
    }
    points
}

/// Annotation percentages studied: 10% through 100% in steps of 10.
pub fn fraction_schedule() -> Vec<u32> {
    (1..=10).map(|i| i * 10).collect()
}

/// Canonical trial identifier. Strategy-independent parts (dataset,
/// scale tag, run) prefix the strategy so twin trials sort together.
pub fn trial_id(dataset_name: &str, scale: &ScalePoint, strategy: Strategy, run: u32) -> String {
    format!(
        "{dataset_name}:{}:{}:r{run}",
        scale.tag(),
        strategy.as_str()
    )
}

/// Order-independent fingerprint of exactly which annotations and split
/// assignments a trial saw.
pub fn subsample_fingerprint(dataset: &Dataset) -> String {
    let mut h = rng::fnv1a64(b"subsample-v1");
    for id in dataset.annotators().keys() {
        h = rng::fnv1a64_update(h, id.as_bytes());
        h = rng::fnv1a64_update(h, &[0x1e]);
    }
    h = rng::fnv1a64_update(h, &[0x1d]);
    for (instance, annotator, label) in dataset.matrix().iter() {
        h = rng::fnv1a64_update(h, instance.as_bytes());
        h = rng::fnv1a64_update(h, &[0x1f]);
        h = rng::fnv1a64_update(h, annotator.as_bytes());
        h = rng::fnv1a64_update(h, &[0x1f, label, 0x1e]);
    }
    h = rng::fnv1a64_update(h, &[0x1d]);
    if let Some(splits) = dataset.splits() {
        for (id, split) in splits {
            h = rng::fnv1a64_update(h, id.as_bytes());
            h = rng::fnv1a64_update(h, &[0x1f]);
            h = rng::fnv1a64_update(h, split.as_str().as_bytes());
            h = rng::fnv1a64_update(h, &[0x1e]);
        }
    }
    rng::hex16(h)
}

/// One trial of the scaling study.
#[derive(Debug, Clone)]
pub struct TrialConfig<'a> {
    pub dataset_name: &'a str,
    /// Full corpus; the trial subsamples and re-splits it.
    pub dataset: &'a Dataset,
    pub store: &'a EmbeddingStore,
    pub strategy: Strategy,
    pub scale: ScalePoint,
    /// Repetition index; varies subsample, split, and training seeds.
    pub run: u32,
    pub master_seed: u64,
    pub split_ratios: [f64; 3],
    pub user_dim: usize,
    pub hidden: usize,
    /// Template hyperparameters; the seed field is overridden per trial.
    pub hyper: Hyperparams,
    pub tie: TieRule,
    pub authorship: AuthorshipConfig,
}

/// Everything a ledger row needs, plus the test predictions backing it.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub trial_id: String,
    pub dataset: String,
    pub strategy: Strategy,
    pub run: u32,
    pub num_annotators: usize,
    pub num_instances: usize,
    pub num_annotations: usize,
    pub ann_per_annotator: f64,
    /// Chance-corrected agreement of the subsample; absent when
    /// undefined (no pairable instances or no expected disagreement).
    pub alpha: Option<f64>,
    pub frac: f64,
    /// Training seed of the strategy run.
    pub seed: u64,
    pub subsample_hash: String,
    pub f1_individual: f64,
    pub f1_majority: f64,
    pub f1_baseline_individual: f64,
    pub rel_improvement_pct: f64,
    pub test_rows: Vec<PredRow>,
    pub history: TrainHistory,
}

fn spec_for(cfg: &TrialConfig, strategy: Strategy) -> StrategySpec {
    let id = trial_id(cfg.dataset_name, &cfg.scale, strategy, cfg.run);
    let mut hyper = cfg.hyper.clone();
    hyper.seed = rng::derive_seed(cfg.master_seed, &format!("{id}:train"));
    StrategySpec {
        strategy,
        user_dim: cfg.user_dim,
        hidden: cfg.hidden,
        hyper,
        table_seed: rng::derive_seed(cfg.master_seed, &format!("{id}:table")),
        model_seed: rng::derive_seed(cfg.master_seed, &format!("{id}:model")),
        tie: cfg.tie,
        authorship: cfg.authorship.clone(),
    }
}

/// Runs one subsample-train-evaluate trial.
///
/// The baseline column repeats the trial's own score for the baseline
/// strategy (relative improvement exactly zero); any other strategy
/// retrains its baseline twin with the twin's seeds, so the column
/// matches the twin trial bit for bit.
pub fn run_single_trial(cfg: &TrialConfig) -> Result<TrialRecord, CoreError> {
    let total = cfg.dataset.annotators().len();
    let cell = format!("{}:{}:r{}", cfg.dataset_name, cfg.scale.tag(), cfg.run);

    let subsampled = match cfg.scale {
        ScalePoint::Annotators(k) => {
            if k < 2 {
                return Err(CoreError::InvalidConfig(
                    "annotator scale points need at least 2 annotators".to_string(),
                ));
            }
            subsample_annotators(
                cfg.dataset,
                k,
                SubsampleMode::Random,
                rng::derive_seed(cfg.master_seed, &format!("{cell}:sub:annotators")),
            )?
        }
        ScalePoint::AnnotationFraction {
            annotators,
            fraction_pct,
        } => {
            if fraction_pct == 0 || fraction_pct > 100 {
                return Err(CoreError::InvalidConfig(format!(
                    "fraction percentage {fraction_pct} outside 1..=100"
                )));
            }
            let roster = if annotators == total {
                cfg.dataset.clone()
            } else {
                subsample_annotators(
                    cfg.dataset,
                    annotators,
                    SubsampleMode::Random,
                    rng::derive_seed(cfg.master_seed, &format!("{cell}:sub:annotators")),
                )?
            };
            subsample_annotations(
                &roster,
                f64::from(fraction_pct) / 100.0,
                rng::derive_seed(cfg.master_seed, &format!("{cell}:sub:fraction")),
            )?
        }
    };

    let subsampled = split_dataset(
        &subsampled,
        cfg.split_ratios,
        rng::derive_seed(cfg.master_seed, &format!("{cell}:split")),
    )?;

    let stats = compute_stats(&subsampled)?;
    let subsample_hash = subsample_fingerprint(&subsampled);

    let spec = spec_for(cfg, cfg.strategy);
    let out = run_strategy(&subsampled, cfg.store, &spec)?;
    let f1 = out.test.f1_individual;

    let baseline_f1 = if cfg.strategy == Strategy::None {
        f1
    } else {
        let twin = spec_for(cfg, Strategy::None);
        run_strategy(&subsampled, cfg.store, &twin)?.test.f1_individual
    };
    let rel_improvement_pct = if baseline_f1 > 0.0 {
        (f1 - baseline_f1) / baseline_f1 * 100.0
    } else if f1 == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };

    Ok(TrialRecord {
        trial_id: trial_id(cfg.dataset_name, &cfg.scale, cfg.strategy, cfg.run),
        dataset: cfg.dataset_name.to_string(),
        strategy: cfg.strategy,
        run: cfg.run,
        num_annotators: stats.num_annotators,
        num_instances: stats.num_instances,
        num_annotations: stats.num_annotations,
        ann_per_annotator: stats.ann_per_annotator_mean,
        alpha: stats.alpha,
        frac: cfg.scale.fraction(),
        seed: spec.hyper.seed,
        subsample_hash,
        f1_individual: f1,
        f1_majority: out.test.f1_majority,
        f1_baseline_individual: baseline_f1,
        rel_improvement_pct,
        test_rows: out.test.rows,
        history: out.history,
    })
}

/// The ledger columns the correlation analysis reads.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingPoint {
    pub dataset: String,
    pub strategy: Strategy,
    pub num_annotators: usize,
    pub num_instances: usize,
    pub num_annotations: usize,
    pub ann_per_annotator: f64,
    pub rel_improvement_pct: f64,
}

impl From<&TrialRecord> for ScalingPoint {
    fn from(r: &TrialRecord) -> Self {
        ScalingPoint {
            dataset: r.dataset.clone(),
            strategy: r.strategy,
            num_annotators: r.num_annotators,
            num_instances: r.num_instances,
            num_annotations: r.num_annotations,
            ann_per_annotator: r.ann_per_annotator,
            rel_improvement_pct: r.rel_improvement_pct,
        }
    }
}

/// Corpus quantity regressed against relative improvement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Predictor {
    Instances,
    Annotators,
    #[default]
    AnnotationsPerAnnotator,
}

impl Predictor {
    pub fn name(self) -> &'static str {
        match self {
            Predictor::Instances => "instances",
            Predictor::Annotators => "annotators",
            Predictor::AnnotationsPerAnnotator => "annotations_per_annotator",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "instances" => Some(Predictor::Instances),
            "annotators" => Some(Predictor::Annotators),
            "annotations_per_annotator" => Some(Predictor::AnnotationsPerAnnotator),
            _ => None,
        }
    }

    fn value(self, p: &ScalingPoint) -> f64 {
        match self {
            Predictor::Instances => p.num_instances as f64,
            Predictor::Annotators => p.num_annotators as f64,
            Predictor::AnnotationsPerAnnotator => p.ann_per_annotator,
        }
    }
}

/// Correlation result for one partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PartitionOutcome {
    Estimate { r: f64, p: f64, n: usize },
    /// Fewer than three usable points.
    Insufficient { n: usize },
    /// One of the variables is constant.
    ZeroVariance { n: usize },
}

/// Correlations between the chosen predictor and relative improvement,
/// split into small and large annotator pools.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub predictor: Predictor,
    pub threshold: usize,
    /// Pools with at most `threshold` annotators.
    pub small: PartitionOutcome,
    /// Pools with more than `threshold` annotators.
    pub large: PartitionOutcome,
    /// Points that survived filtering and sampling.
    pub used_points: usize,
}

#[derive(Debug, Clone)]
pub struct CorrelateConfig {
    /// Quantity on the x axis.
    pub predictor: Predictor,
    /// Annotator-pool size separating the two partitions.
    pub threshold: usize,
    /// Cap on points taken per dataset; 0 keeps all.
    pub max_per_dataset: usize,
    /// Seeds the per-dataset sampling when capped.
    pub seed: u64,
}

impl Default for CorrelateConfig {
    fn default() -> Self {
        CorrelateConfig {
            predictor: Predictor::AnnotationsPerAnnotator,
            threshold: 18,
            max_per_dataset: 0,
            seed: 0,
        }
    }
}

fn partition_outcome(xs: &[f64], ys: &[f64]) -> PartitionOutcome {
    let n = xs.len();
    if n < 3 {
        return PartitionOutcome::Insufficient { n };
    }
    match pearson(xs, ys) {
        Ok((r, p)) => PartitionOutcome::Estimate { r, p, n },
        Err(CoreError::ZeroVariance(_)) => PartitionOutcome::ZeroVariance { n },
        Err(_) => PartitionOutcome::Insufficient { n },
    }
}

/// Correlates the configured predictor with relative improvement.
///
/// Baseline rows and rows with non-finite values are dropped. When a
/// per-dataset cap is set, each dataset's rows are sampled with a seed
/// derived from the dataset name, so the selection is reproducible and
/// independent of row order within a dataset is not required (rows are
/// taken in the order given after a deterministic index sample).
pub fn correlate(points: &[ScalingPoint], cfg: &CorrelateConfig) -> CorrelationReport {
    use alloc::collections::BTreeMap;

    let usable: Vec<&ScalingPoint> = points
        .iter()
        .filter(|p| {
            p.strategy != Strategy::None
                && p.rel_improvement_pct.is_finite()
                && cfg.predictor.value(p).is_finite()
        })
        .collect();

    let mut by_dataset: BTreeMap<&str, Vec<&ScalingPoint>> = BTreeMap::new();
    for p in &usable {
        by_dataset.entry(p.dataset.as_str()).or_default().push(p);
    }

    let mut small_x = Vec::new();
    let mut small_y = Vec::new();
    let mut large_x = Vec::new();
    let mut large_y = Vec::new();
    let mut used = 0usize;
    for (dataset, mut rows) in by_dataset {
        if cfg.max_per_dataset > 0 && rows.len() > cfg.max_per_dataset {
            let mut gen = rng::seeded(rng::derive_seed(cfg.seed, dataset));
            let mut picked = rng::sample_indices(&mut gen, rows.len(), cfg.max_per_dataset);
            picked.sort_unstable();
            rows = picked.into_iter().map(|i| rows[i]).collect();
        }
        for p in rows {
            used += 1;
            if p.num_annotators <= cfg.threshold {
                small_x.push(cfg.predictor.value(p));
                small_y.push(p.rel_improvement_pct);
            } else {
                large_x.push(cfg.predictor.value(p));
                large_y.push(p.rel_improvement_pct);
            }
        }
    }

    CorrelationReport {
        predictor: cfg.predictor,
        threshold: cfg.threshold,
        small: partition_outcome(&small_x, &small_y),
        large: partition_outcome(&large_x, &large_y),
        used_points: used,
    }
}
