//! Experiment runners and their on-disk outputs.
//!
//! 1. comparison of DLA recall against the LSTM baseline on a labeled set,
//! 2. skip-sequence sweep,
//! 3. learning-extent sweep.

mod config;
mod experiments;
mod trend;

pub use config::{DatasetSource, ExperimentConfig};
pub use experiments::{
    parse_matrix_csv, run_experiment1, run_experiment2, run_experiment3, sweep_point,
    write_experiment1, write_sweep, Exp1Report, SweepOutcome, SweepReport, SweepRow,
};
pub use trend::TrendSeries;

use thiserror::Error;

use crate::classifier::ClassifierError;
use crate::dataset::DatasetError;
use crate::dla::DlaError;
use crate::lstm::LstmError;
use crate::representation::RepresentationError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Representation(#[from] RepresentationError),
    #[error(transparent)]
    Dla(#[from] DlaError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Lstm(#[from] LstmError),
}

impl HarnessError {
    /// 2 for I/O failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io { .. }
            | Self::Dataset(DatasetError::Io { .. })
            | Self::Lstm(LstmError::Io(_)) => 2,
            _ => 1,
        }
    }
}
