use thiserror::Error;

use crate::structure::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("invalid structure: {}", join_violations(.0))]
    InvalidStructure(Vec<Violation>),

    #[error("relation `{0}` is already part of the signature")]
    NameClash(String),

    #[error("invalid subset: {0}")]
    InvalidSubset(String),

    #[error("pebble index {pebble} out of range 1..={k}")]
    PebbleOutOfRange { pebble: usize, k: usize },

    #[error("bounded fragment needs {requested} plays, cap is {cap}")]
    SizeCap { requested: String, cap: usize },

    #[error("structure has {size} elements, limit is {limit}")]
    SizeLimit { size: usize, limit: usize },

    #[error("invalid play: {0}")]
    InvalidPlay(String),

    #[error("invalid traversal: {0}")]
    InvalidTraversal(String),

    #[error("invalid coalgebra: {0}")]
    InvalidCoalgebra(String),

    #[error("formula error: {0}")]
    Formula(String),

    #[error("unbound variable x{0}")]
    UnboundVariable(usize),

    #[error("strategy is not winning: {0}")]
    NotWinning(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}
