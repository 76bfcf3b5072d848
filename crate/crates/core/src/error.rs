use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A point lies outside the strategy set of a player.
    #[error("player {player}, dimension {dim}: value {value} outside [{lower}, {upper}]")]
    OutOfBox { player: usize, dim: usize, value: f64, lower: f64, upper: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no bracket for the Minkowski functional after {doublings} doublings; body looks unbounded")]
    UnboundedBody { doublings: u32 },

    #[error("degenerate domain: {0}")]
    Degenerate(String),

    #[error("size limit exceeded: {0}")]
    TooLarge(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// A document could not be parsed or serialized.
    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
