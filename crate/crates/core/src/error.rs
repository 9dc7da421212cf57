use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole at {var} = 0")]
    Pole { var: &'static str },
    #[error("base variable mismatch")]
    BaseVarMismatch,
    #[error("unknown table entry {table}/{entry}")]
    UnknownEntry { table: String, entry: String },
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("maximum step count {0} exceeded")]
    MaxSteps(usize),
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("blow-up: |v| exceeded 1e150 at t = {t}")]
    BlowUp { t: f64 },
    #[error("root residual too large: {0:e}")]
    RootResidual(f64),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("rank deficient least-squares system")]
    RankDeficient,
    #[error("profile has non-positive value at r = {r}")]
    NonPositive { r: f64 },
    #[error("window exhausted: {0}")]
    WindowExhausted(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
