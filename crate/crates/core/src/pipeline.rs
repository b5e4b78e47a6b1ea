//! One-call strategy runs: representation table, model init, training,
//! and evaluation on the validation and test splits.

use crate::corpus::{Dataset, Split, TieRule};
use crate::encoder::EmbeddingStore;
use crate::error::CoreError;
use crate::model::{init_model, ModelParams};
use crate::repr::{build_table, AuthorshipConfig, Strategy};
use crate::trainer::{evaluate, train, Hyperparams, MetricsBundle, TrainHistory, TrainingData};

/// Everything needed to train one strategy on a split dataset.
#[derive(Debug, Clone)]
pub struct StrategySpec {
    pub strategy: Strategy,
    /// Width of trainable per-annotator vectors, where the strategy uses
    /// them.
    pub user_dim: usize,
    pub hidden: usize,
    pub hyper: Hyperparams,
    /// Seeds representation-table randomness (user-token init, the
    /// authorship classifier).
    pub table_seed: u64,
    /// Seeds model weight initialization.
    pub model_seed: u64,
    pub tie: TieRule,
    pub authorship: AuthorshipConfig,
}

impl Default for StrategySpec {
    fn default() -> Self {
        StrategySpec {
            strategy: Strategy::None,
            user_dim: 8,
            hidden: 64,
            hyper: Hyperparams::default(),
            table_seed: 0,
            model_seed: 0,
            tie: TieRule::PositiveWins,
            authorship: AuthorshipConfig::default(),
        }
    }
}

/// A finished run: best-epoch parameters, the training trace, and
/// metrics on both held-out splits.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub params: ModelParams,
    pub history: TrainHistory,
    pub val: MetricsBundle,
    pub test: MetricsBundle,
}

/// Builds representations, trains, and evaluates one strategy.
///
/// The dataset must carry splits; the store must cover every instance
/// plus any auxiliary texts the strategy reads.
pub fn run_strategy(
    dataset: &Dataset,
    store: &EmbeddingStore,
    spec: &StrategySpec,
) -> Result<RunOutput, CoreError> {
    spec.hyper.validate()?;
    let table = build_table(
        spec.strategy,
        dataset,
        store,
        spec.user_dim,
        &spec.authorship,
        spec.table_seed,
    )?;
    let params = init_model(&table, store.dim(), spec.hidden, spec.model_seed)?;
    let data = TrainingData::new(dataset, store)?;
    let (best, history) = train(params, &data, &spec.hyper)?;
    let val = evaluate(&best, dataset, store, Split::Val, spec.tie)?;
    let test = evaluate(&best, dataset, store, Split::Test, spec.tie)?;
    Ok(RunOutput {
        params: best,
        history,
        val,
        test,
    })
}
