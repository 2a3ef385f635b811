use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::fitts::FittsError;
use crate::friction::FrictionError;
use crate::latency::LatencyError;
use crate::recording::{PointingLogError, RecordingError};
use crate::report::ReportError;
use crate::stats::StatsError;
use crate::swipe::SwipeError;
use crate::synth::SynthError;

/// Any failure of a pipeline stage.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Recording(#[from] RecordingError),
    #[error(transparent)]
    PointingLog(#[from] PointingLogError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Swipe(#[from] SwipeError),
    #[error(transparent)]
    Friction(#[from] FrictionError),
    #[error(transparent)]
    Latency(#[from] LatencyError),
    #[error(transparent)]
    Fitts(#[from] FittsError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}")]
    Input(String),
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn json(path: &Path, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.to_path_buf(),
            source,
        }
    }

    /// True for malformed or missing inputs, false for analysis failures.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Recording(_)
                | Error::PointingLog(_)
                | Error::Synth(_)
                | Error::Io { .. }
                | Error::Json { .. }
                | Error::Input(_)
        )
    }
}
