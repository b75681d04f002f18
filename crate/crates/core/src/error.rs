use crate::bitstream::Encoding;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("value {value} is outside the {encoding} range")]
    OutOfRange { value: f64, encoding: Encoding },

    #[error("stream length must be at least 1")]
    ZeroLength,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("encoding mismatch: expected {expected}, found {found}")]
    EncodingMismatch { expected: Encoding, found: Encoding },

    #[error("{0} requires at least one input")]
    Empty(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("chunk length {chunk} does not divide {m} bits")]
    ChunkMismatch { m: usize, chunk: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("required stream length M = {m} exceeds the simulation limit {limit}; use a larger epsilon or delta")]
    Infeasible { m: u64, limit: u64 },

    #[error("schema error at {field}: {message}")]
    Schema { field: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }
}
