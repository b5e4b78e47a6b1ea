//! JSON run configurations. Unknown keys are rejected everywhere so a
//! typo in a sweep definition fails loudly instead of silently using a
//! default.

use crate::error::{read_err, CliError};
use annomod_core::corpus::{SynthConfig, TieRule};
use annomod_core::encoder::HashEncoderConfig;
use annomod_core::repr::{AuthorshipConfig, Strategy};
use annomod_core::trainer::Hyperparams;
use serde::Deserialize;
use std::path::{Path, PathBuf};

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| read_err(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Where instance vectors come from. Exactly one source per run.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum EmbeddingSource {
    /// Precomputed binary embedding file; must cover every id.
    File(PathBuf),
    /// Built-in hashing encoder over the dataset's own texts.
    Hasher(HasherSettings),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HasherSettings {
    pub dim: Option<usize>,
    pub seed: Option<u64>,
    /// Subset of {1, 2}.
    pub ngram_orders: Option<Vec<u8>>,
}

impl HasherSettings {
    pub fn to_core(&self) -> HashEncoderConfig {
        let mut c = HashEncoderConfig::default();
        if let Some(v) = self.dim {
            c.dim = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = &self.ngram_orders {
            c.ngram_orders = v.clone();
        }
        c
    }
}

/// Optimizer overrides; unset fields keep library defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperSettings {
    pub learning_rate: Option<f64>,
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub patience: Option<usize>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
}

impl HyperSettings {
    pub fn to_core(&self) -> Hyperparams {
        let mut h = Hyperparams::default();
        if let Some(v) = self.learning_rate {
            h.learning_rate = v;
        }
        if let Some(v) = self.epochs {
            h.epochs = v;
        }
        if let Some(v) = self.batch_size {
            h.batch_size = v;
        }
        if let Some(v) = self.patience {
            h.patience = v;
        }
        if let Some(v) = self.beta1 {
            h.beta1 = v;
        }
        if let Some(v) = self.beta2 {
            h.beta2 = v;
        }
        if let Some(v) = self.epsilon {
            h.epsilon = v;
        }
        if let Some(v) = self.seed {
            h.seed = v;
        }
        h
    }
}

/// Authorship-profile classifier overrides.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuthorshipSettings {
    pub hidden: Option<usize>,
    pub epochs: Option<usize>,
    pub learning_rate: Option<f64>,
    pub batch_size: Option<usize>,
}

impl AuthorshipSettings {
    pub fn to_core(&self) -> AuthorshipConfig {
        let mut c = AuthorshipConfig::default();
        if let Some(v) = self.hidden {
            c.hidden = v;
        }
        if let Some(v) = self.epochs {
            c.epochs = v;
        }
        if let Some(v) = self.learning_rate {
            c.learning_rate = v;
        }
        if let Some(v) = self.batch_size {
            c.batch_size = v;
        }
        c
    }
}

pub fn parse_tie_rule(s: &str) -> Result<TieRule, CliError> {
    TieRule::parse(s).map_err(CliError::from)
}

pub fn parse_strategy(s: &str) -> Result<Strategy, CliError> {
    Strategy::parse(s).map_err(CliError::from)
}

/// Configuration for `train` and `eval`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub dataset: PathBuf,
    pub aux_texts: Option<PathBuf>,
    /// Split sidecar; when absent the dataset is split by
    /// `split_ratios` and `split_seed`.
    pub splits: Option<PathBuf>,
    pub embeddings: EmbeddingSource,
    pub strategy: String,
    pub user_dim: Option<usize>,
    pub hidden: Option<usize>,
    #[serde(default)]
    pub hyperparams: HyperSettings,
    pub split_ratios: Option<[f64; 3]>,
    pub split_seed: Option<u64>,
    pub table_seed: Option<u64>,
    pub model_seed: Option<u64>,
    /// "positive" (default) or "negative".
    pub tie_rule: Option<String>,
    #[serde(default)]
    pub authorship: AuthorshipSettings,
    pub output_dir: PathBuf,
}

impl TrainConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        load_json(path)
    }
}

/// Configuration for `synth`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthFileConfig {
    pub num_annotators: usize,
    pub num_instances: usize,
    pub embedding_dim: usize,
    pub contrarian_fraction: Option<f64>,
    pub noise_rate: Option<f64>,
    pub annotations_per_instance: usize,
    pub seed: Option<u64>,
    pub output_dir: PathBuf,
}

impl SynthFileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        load_json(path)
    }

    pub fn to_core(&self) -> SynthConfig {
        SynthConfig {
            num_annotators: self.num_annotators,
            num_instances: self.num_instances,
            embedding_dim: self.embedding_dim,
            contrarian_fraction: self.contrarian_fraction.unwrap_or(0.0),
            noise_rate: self.noise_rate.unwrap_or(0.0),
            annotations_per_instance: self.annotations_per_instance,
            seed: self.seed.unwrap_or(0),
        }
    }
}

/// One corpus entering a scaling sweep. Splits are not accepted here:
/// every trial derives its own split from the master seed.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleCorpus {
    pub name: String,
    pub dataset: PathBuf,
    pub aux_texts: Option<PathBuf>,
    pub embeddings: EmbeddingSource,
}

/// Configuration for `scale`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleConfig {
    pub corpora: Vec<ScaleCorpus>,
    /// Defaults to the five strategies that need no auxiliary texts.
    pub strategies: Option<Vec<String>>,
    pub runs: Option<u32>,
    pub master_seed: Option<u64>,
    pub split_ratios: Option<[f64; 3]>,
    pub user_dim: Option<usize>,
    pub hidden: Option<usize>,
    #[serde(default)]
    pub hyperparams: HyperSettings,
    pub tie_rule: Option<String>,
    #[serde(default)]
    pub authorship: AuthorshipSettings,
    /// Annotator-pool sizes for the annotation-fraction grid; empty
    /// means the full roster of each corpus.
    pub fixed_annotator_counts: Option<Vec<usize>>,
    pub output_dir: PathBuf,
}

impl ScaleConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        load_json(path)
    }

    pub fn strategies(&self) -> Result<Vec<Strategy>, CliError> {
        match &self.strategies {
            None => Ok(vec![
                Strategy::None,
                Strategy::UserToken,
                Strategy::Composite,
                Strategy::CompositeUser,
                Strategy::MultiTask,
            ]),
            Some(names) => {
                if names.is_empty() {
                    return Err(CliError::Usage("strategies list is empty".to_string()));
                }
                names.iter().map(|s| parse_strategy(s)).collect()
            }
        }
    }
}

pub const DEFAULT_SPLIT_RATIOS: [f64; 3] = [0.8, 0.1, 0.1];
pub const DEFAULT_USER_DIM: usize = 8;
pub const DEFAULT_HIDDEN: usize = 64;
