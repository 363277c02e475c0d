use std::path::PathBuf;

use finder_core::{EpisodeError, GenerationError, ScenarioError, TourError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("no episodes to aggregate")]
    Empty,
    #[error("paired samples differ in length: {0} vs {1}")]
    Unpaired(usize, usize),
    #[error("invalid config: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("world {0} has no spawn cell that reaches every target")]
    NoSpawn(u64),
    #[error("thread pool: {0}")]
    Pool(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Generation(#[from] GenerationError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Episode(#[from] EpisodeError),
    #[error(transparent)]
    Tour(#[from] TourError),
}

impl BenchError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io { path: path.into(), source }
    }
}
