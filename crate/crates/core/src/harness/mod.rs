//! Experiment driver: configuration, multi-seed campaigns, evaluation
//! reports, checkpoints and SVG export.

mod campaign;
mod checkpoint;
mod config;
mod metrics;
pub mod plot;

pub use campaign::{
    eval_seed, evaluate_base, evaluate_checkpoint, episode_seed, read_curve, train_campaign, write_curve,
    CurveRow, Manifest, SeedRun, SeedSummary,
};
pub use checkpoint::{decode_f64s, encode_f64s, Checkpoint, TensorRecord, SCHEMA_VERSION};
pub use config::{parse_seed_list, RunConfig, FULL_BUDGET_EPISODES};
pub use metrics::{MeanStd, MetricsReport, SeedMetrics};

use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("checkpoint schema version mismatch: expected {expected}, found {}", found.map_or("none".to_string(), |v| v.to_string()))]
    Schema { expected: u32, found: Option<u32> },
    #[error("invalid checkpoint: {0}")]
    Checkpoint(String),
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("output directory {0} already exists (pass --force to overwrite)")]
    OutputExists(PathBuf),
    #[error("episode grids differ: {0}")]
    MismatchedCurves(String),
    #[error(transparent)]
    Sim(#[from] crate::sim::SimError),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn csv(path: &Path, e: impl std::fmt::Display) -> Self {
        HarnessError::Csv {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config { .. } | HarnessError::Sim(_) | HarnessError::OutputExists(_) => 2,
            HarnessError::Io { .. } | HarnessError::Csv { .. } | HarnessError::MismatchedCurves(_) => 3,
            HarnessError::Schema { .. } | HarnessError::Checkpoint(_) => 4,
        }
    }
}
