use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate sphere normalization (norm {norm:e})")]
    DegenerateRetraction { norm: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported domain for {op}: {hint}")]
    UnsupportedDomain { op: &'static str, hint: &'static str },

    #[error("partition supports overlap: lambda*tau = {lambda_tau} >= d*/2 = {half_sep}")]
    OverlappingSupports { lambda_tau: f64, half_sep: f64 },

    #[error("every particle fell below the weight floor {floor}")]
    AllBelowFloor { floor: f64 },

    #[error("step {k} failed: {source}")]
    Step {
        k: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config error at `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            msg: msg.into(),
        }
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
