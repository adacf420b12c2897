use thiserror::Error;

/// Errors raised by grid construction, metric evaluation, normalisation and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("coordinate {coord} out of range for dims {dims}")]
    OutOfRange { coord: String, dims: String },

    #[error("metric {metric} is not supported on a {kind} lattice")]
    UnsupportedMetric { metric: String, kind: String },

    #[error("{0}")]
    UnsupportedCombination(String),

    #[error("distance domain is empty for {0}")]
    EmptyDomain(String),

    #[error("distance m={m} outside the valid domain 1..={m_max}")]
    DistanceOutOfDomain { m: u32, m_max: u32 },

    #[error("PCF undefined: zero expected pairs (need at least 2 agents, have {n})")]
    TooFewAgents { n: u64 },

    #[error("site count Z={z} below minimum of 2")]
    TooFewSites { z: u64 },

    #[error("agent count N={n} exceeds site count Z={z}")]
    TooManyAgents { n: u64, z: u64 },

    #[error("profiles disagree on {0}; cannot average")]
    ProfileMismatch(String),

    #[error("graph input invalid: {0}")]
    InvalidGraph(String),

    #[error("distance matrix for Z={z} vertices exceeds the materialisation cap of {cap}")]
    MatrixTooLarge { z: usize, cap: usize },

    #[error("oracle sweep size {z} exceeds the configured cap {cap}")]
    OracleCapExceeded { z: u64, cap: u64 },

    #[error("{0}")]
    InvalidParameter(String),

    #[error("segregation stalled at density {achieved:.6} above target {target:.6}")]
    SegregationStalled { achieved: f64, target: f64 },

    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
