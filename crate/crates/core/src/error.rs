use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is disconnected: no path between nodes {0} and {1}")]
    Disconnected(usize, usize),

    #[error("no graph with n={n}, p={p} met the constraints after {attempts} samples")]
    GenerationExhausted { n: usize, p: f64, attempts: usize },

    #[error("invalid drawing: {0}")]
    InvalidDrawing(String),

    #[error("degenerate drawing: all nodes coincide")]
    DegenerateDrawing,

    #[error("empty input to isotonic regression")]
    EmptyRegression,

    #[error("graph has no edges")]
    NoEdges,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("hill climb did not converge after {iterations} iterations (best ksm {best_ksm:.4}, target {target:.2})")]
    NonConvergence {
        target: f64,
        best_ksm: f64,
        iterations: u64,
    },

    #[error("scheduling failed: {0}")]
    Schedule(String),

    #[error("trial index mismatch: plan {plan} vs response {response}")]
    TrialMismatch { plan: u32, response: u32 },

    #[error("expected {expected} records, got {got}")]
    RecordCount { expected: usize, got: usize },

    #[error("incomplete session log for {participant}: missing trials {missing:?}")]
    IncompleteLog {
        participant: String,
        missing: Vec<u32>,
    },

    #[error("participant {0} has no response time under the outlier threshold")]
    NoInlierTimes(String),

    #[error("statistics: {0}")]
    Statistics(String),

    #[error("malformed log: {0}")]
    Log(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) trait IoContext<T> {
    fn at(self, path: impl Into<PathBuf>) -> Result<T>;
}

impl<T> IoContext<T> for std::io::Result<T> {
    fn at(self, path: impl Into<PathBuf>) -> Result<T> {
        self.map_err(|source| Error::Io {
            path: path.into(),
            source,
        })
    }
}
