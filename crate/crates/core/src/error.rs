use thiserror::Error;

/// Errors produced by the exact engine, the limit chains and the certificates.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid boundary measure: {0}")]
    InvalidMeasure(String),

    #[error("inadmissible model: {0}")]
    Inadmissible(String),

    #[error("zero total mass: {0}")]
    ZeroMass(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("could not parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("quadrature did not stabilize after {nodes} nodes (last change {last_change:e})")]
    Quadrature { nodes: usize, last_change: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("unknown {kind} {name:?}; available: {available}")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
