//! `scale`: run a seeded scaling sweep over corpora, strategies, and
//! repetitions, appending one ledger row per trial.
//!
//! Trials execute in parallel; the ledger writer is the only shared
//! mutable state. Row content depends only on the grid and master seed,
//! so ledgers from different parallelism degrees are equal up to row
//! order. Trial ids already present in the ledger are skipped, making an
//! interrupted sweep resumable.

use crate::commands::{build_store, ensure_dir};
use crate::config::{
    parse_tie_rule, ScaleConfig, DEFAULT_HIDDEN, DEFAULT_SPLIT_RATIOS, DEFAULT_USER_DIM,
};
use crate::error::CliError;
use crate::formats::dataset::load_dataset;
use crate::formats::dump::write_dump;
use crate::formats::ledger::{completed_trial_ids, LedgerWriter};
use annomod_core::corpus::Dataset;
use annomod_core::encoder::EmbeddingStore;
use annomod_core::repr::Strategy;
use annomod_core::scaling::{
    annotator_count_schedule, fraction_schedule, run_single_trial, trial_id, ScalePoint,
    TrialConfig,
};
use rayon::prelude::*;
use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Mutex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Annotators,
    Annotations,
}

struct Corpus {
    name: String,
    dataset: Dataset,
    store: EmbeddingStore,
}

struct Pending {
    corpus: usize,
    scale: ScalePoint,
    strategy: Strategy,
    run: u32,
    id: String,
}

/// File-system-safe name for a trial's archived prediction dump.
pub fn dump_file_name(trial_id: &str) -> String {
    format!("{}.csv", trial_id.replace(':', "_"))
}

fn scale_points(
    kind: GridKind,
    cfg: &ScaleConfig,
    corpus: &Corpus,
) -> Result<Vec<ScalePoint>, CliError> {
    let total = corpus.dataset.annotators().len();
    match kind {
        GridKind::Annotators => {
            let counts = annotator_count_schedule(total);
            if counts.is_empty() {
                return Err(CliError::Data(format!(
                    "corpus '{}' has {total} annotators; the annotator grid needs at least 2",
                    corpus.name
                )));
            }
            Ok(counts.into_iter().map(ScalePoint::Annotators).collect())
        }
        GridKind::Annotations => {
            let counts = match &cfg.fixed_annotator_counts {
                Some(counts) if !counts.is_empty() => counts.clone(),
                _ => vec![total],
            };
            let mut points = Vec::new();
            for &k in &counts {
                if k < 2 || k > total {
                    return Err(CliError::Usage(format!(
                        "fixed annotator count {k} outside 2..={total} for corpus '{}'",
                        corpus.name
                    )));
                }
                for pct in fraction_schedule() {
                    points.push(ScalePoint::AnnotationFraction {
                        annotators: k,
                        fraction_pct: pct,
                    });
                }
            }
            Ok(points)
        }
    }
}

pub fn run(
    kind: GridKind,
    config_path: &Path,
    out_override: Option<&Path>,
    parallelism: usize,
) -> Result<(), CliError> {
    let cfg = ScaleConfig::load(config_path)?;
    let out_dir = out_override.unwrap_or(&cfg.output_dir).to_path_buf();
    let strategies = cfg.strategies()?;
    {
        let unique: BTreeSet<_> = strategies.iter().collect();
        if unique.len() != strategies.len() {
            return Err(CliError::Usage("duplicate strategy in list".to_string()));
        }
    }
    if cfg.corpora.is_empty() {
        return Err(CliError::Usage("no corpora configured".to_string()));
    }
    let runs = cfg.runs.unwrap_or(5);
    if runs == 0 {
        return Err(CliError::Usage("runs must be at least 1".to_string()));
    }
    let tie = parse_tie_rule(cfg.tie_rule.as_deref().unwrap_or("positive"))?;
    let hyper = cfg.hyperparams.to_core();
    let authorship = cfg.authorship.to_core();
    let split_ratios = cfg.split_ratios.unwrap_or(DEFAULT_SPLIT_RATIOS);
    let master_seed = cfg.master_seed.unwrap_or(0);

    let mut corpora = Vec::with_capacity(cfg.corpora.len());
    let mut names = BTreeSet::new();
    for c in &cfg.corpora {
        if !names.insert(c.name.clone()) {
            return Err(CliError::Usage(format!("duplicate corpus name '{}'", c.name)));
        }
        let dataset = load_dataset(&c.dataset, c.aux_texts.as_deref(), None)?;
        let store = build_store(&dataset, &c.embeddings)?;
        corpora.push(Corpus {
            name: c.name.clone(),
            dataset,
            store,
        });
    }

    let mut grid = Vec::new();
    for (ci, corpus) in corpora.iter().enumerate() {
        for scale in scale_points(kind, &cfg, corpus)? {
            for &strategy in &strategies {
                for run in 0..runs {
                    grid.push(Pending {
                        corpus: ci,
                        scale,
                        strategy,
                        run,
                        id: trial_id(&corpus.name, &scale, strategy, run),
                    });
                }
            }
        }
    }

    ensure_dir(&out_dir)?;
    let dumps_dir = out_dir.join("dumps");
    ensure_dir(&dumps_dir)?;
    let ledger_path = out_dir.join("ledger.csv");
    let done = completed_trial_ids(&ledger_path)?;
    let total = grid.len();
    let pending: Vec<Pending> = grid.into_iter().filter(|p| !done.contains(&p.id)).collect();
    let skipped = total - pending.len();

    let writer = Mutex::new(LedgerWriter::open(&ledger_path)?);
    let harness_errors: Mutex<Vec<CliError>> = Mutex::new(Vec::new());
    let failures = Mutex::new(0usize);

    let execute = |p: &Pending| {
        let corpus = &corpora[p.corpus];
        let trial = TrialConfig {
            dataset_name: &corpus.name,
            dataset: &corpus.dataset,
            store: &corpus.store,
            strategy: p.strategy,
            scale: p.scale,
            run: p.run,
            master_seed,
            split_ratios,
            user_dim: cfg.user_dim.unwrap_or(DEFAULT_USER_DIM),
            hidden: cfg.hidden.unwrap_or(DEFAULT_HIDDEN),
            hyper: hyper.clone(),
            tie,
            authorship: authorship.clone(),
        };
        let outcome = run_single_trial(&trial);
        let mut harness_failure = None;
        match outcome {
            Ok(record) => {
                let dump_path = dumps_dir.join(dump_file_name(&record.trial_id));
                if let Err(e) = write_dump(&record.test_rows, &dump_path) {
                    harness_failure = Some(e);
                } else if let Err(e) = writer.lock().unwrap().append_ok(&record) {
                    harness_failure = Some(e);
                }
            }
            Err(e) => {
                *failures.lock().unwrap() += 1;
                if let Err(we) = writer.lock().unwrap().append_failed(
                    &p.id,
                    &corpora[p.corpus].name,
                    p.strategy,
                    p.run,
                    &e.to_string(),
                ) {
                    harness_failure = Some(we);
                }
            }
        }
        if let Some(e) = harness_failure {
            harness_errors.lock().unwrap().push(e);
        }
    };

    if parallelism > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallelism)
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
        pool.install(|| pending.par_iter().for_each(execute));
    } else {
        pending.par_iter().for_each(execute);
    }

    writer.lock().unwrap().flush()?;
    if let Some(e) = harness_errors.into_inner().unwrap().into_iter().next() {
        return Err(e);
    }

    println!(
        "grid {total} trials: {skipped} already in ledger, {} executed, {} failed; ledger at {}",
        pending.len(),
        failures.into_inner().unwrap(),
        ledger_path.display()
    );
    Ok(())
}
