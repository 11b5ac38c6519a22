//! Data ingestion, synthetic features and the two benchmarks.

mod binbench;
mod dataset;
mod synth;
mod vaultbench;

pub use binbench::{run_binarisation_benchmark, BinarisationGrid, BinarisationReport, BinarisationRow};
pub use dataset::{export_features, ingest_features, read_features, write_features, Dataset, Role};
pub use synth::{generate_synthetic, SynthConfig};
pub use vaultbench::{
    expected_set_size, run_vault_benchmark, CostEntry, DecoderSpec, ExperimentConfig, NonMatedPairing, OutputPaths,
    Protection, RecordFile, SetSizeStats, VaultBenchReport, VaultSection,
};

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::decoders::DecodeError;
use crate::feature_pipeline::PipelineError;
use crate::security::SecurityError;
use crate::vault::VaultError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: line {line}: {message}", file.display())]
    ParseIn {
        file: PathBuf,
        line: u64,
        message: String,
    },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("configuration: {0}")]
    Config(String),
    #[error("protocol: {0}")]
    Protocol(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Vault(#[from] VaultError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Security(#[from] SecurityError),
}

impl HarnessError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Attaches a file name to a parse error.
    pub(crate) fn in_file(self, path: &Path) -> Self {
        match self {
            HarnessError::Parse { line, message } => HarnessError::ParseIn {
                file: path.to_path_buf(),
                line,
                message,
            },
            e => e,
        }
    }

    /// Line number of a parse error.
    pub fn line(&self) -> Option<u64> {
        match self {
            HarnessError::Parse { line, .. } | HarnessError::ParseIn { line, .. } => Some(*line),
            _ => None,
        }
    }
}
