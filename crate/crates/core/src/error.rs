use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    /// The state exceeded the blow-up threshold or became non-finite.
    #[error("blow-up at t = {t} (grid index {index}, |u| = {magnitude})")]
    BlowUp { t: f64, index: usize, magnitude: f64 },

    #[error("step failed at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },

    #[error("no quasi-stationary state: {0}")]
    NoQss(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("outside domain: {0}")]
    Domain(String),

    #[error("not bursting: {0}")]
    NotBursting(String),

    #[error("no invading front: {0}")]
    NoFront(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
