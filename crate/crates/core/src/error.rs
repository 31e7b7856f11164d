use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported feature at line {line}: {message}")]
    UnsupportedFeature { line: usize, message: String },

    #[error("empty stream: at least one labelled instance is required")]
    EmptyStream,

    #[error("empty prediction log")]
    EmptyLog,

    #[error("labels have zero variance (only one class occurs)")]
    ZeroVariance,

    #[error("autocorrelation needs binary labels, found {0} classes")]
    NotBinary(usize),

    #[error("max lag {max_lag} must be smaller than the stream length {n}")]
    LagTooLarge { max_lag: usize, n: usize },

    #[error("alarm probability {0} is outside [0, 1]")]
    InvalidRho(f64),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("classifier is bound to a different schema than the dataset")]
    SchemaMismatch,

    #[error("true labels disagree with the dataset at index {0}")]
    LabelMismatch(usize),

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
