use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("network is empty: {0}")]
    EmptyNetwork(&'static str),

    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),

    #[error("edge `{edge}` references unknown node `{node}`")]
    DanglingEndpoint { edge: String, node: String },

    #[error("edge `{0}` is a self-loop")]
    SelfLoop(String),

    #[error("edge `{edge}` has invalid {field}: {value}")]
    InvalidEdgeAttribute {
        edge: String,
        field: &'static str,
        value: f64,
    },

    #[error("node `{0}` has non-finite coordinates")]
    NonFiniteCoordinate(String),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("density field does not match the network: {0}")]
    DensityMismatch(String),

    #[error("edge key sets differ: {0}")]
    EdgeKeyMismatch(String),

    #[error("no facilities of category `{0}`")]
    EmptyCategory(String),

    #[error("tract `{tract}` has invalid geometry: {reason}")]
    InvalidTract { tract: String, reason: String },

    #[error("invalid boundary polygon: {0}")]
    InvalidBoundary(String),

    #[error("no network node lies inside the study boundary")]
    NoSitesInBoundary,

    #[error("total population is zero")]
    ZeroPopulation,

    #[error("trip record {row}: {reason}")]
    InvalidTrip { row: usize, reason: String },

    #[error("summary rows do not match: {0}")]
    SummaryMismatch(String),

    #[error("{path}: record {record}: {reason}")]
    Parse {
        path: String,
        record: usize,
        reason: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

impl Error {
    /// Process exit status for this class of failure. Zero is never used.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter { .. } => 2,
            Error::Io { .. } => 3,
            Error::Parse { .. } => 4,
            Error::EmptyNetwork(_)
            | Error::DuplicateNode(_)
            | Error::DanglingEndpoint { .. }
            | Error::SelfLoop(_)
            | Error::InvalidEdgeAttribute { .. }
            | Error::NonFiniteCoordinate(_) => 5,
            Error::InvalidTract { .. } | Error::InvalidBoundary(_) | Error::NoSitesInBoundary => 6,
            Error::DensityMismatch(_) | Error::EdgeKeyMismatch(_) | Error::EmptyCategory(_) | Error::ZeroPopulation => 7,
            Error::InvalidTrip { .. } | Error::SummaryMismatch(_) => 8,
        }
    }
}
