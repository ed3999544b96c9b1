use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (e.g. r <= 0).
    #[error("domain error: {0}")]
    Domain(String),

    /// Bad or missing configuration. The message names the offending key.
    #[error("configuration error: {0}")]
    Config(String),

    /// The scaling x = gamma2^(1/4) r needs a confining oscillator term.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// gamma_{-2} + 1/4 < 0: the angular index j would be complex.
    #[error("non-physical configuration: j^2 = {j_squared} < 0 (complex angular index)")]
    ComplexIndex { j_squared: f64 },

    #[error("inconsistent configuration: {0}")]
    Inconsistent(String),

    #[error("no admissible truncation root for n = {n}: {reason}")]
    NoTruncationRoot { n: u32, reason: String },

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("potential is not confining: {0}")]
    NonConfining(String),

    #[error("eigensolver did not converge: {0}")]
    NotConverged(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that stem from the physical parameters rather than the
    /// numerics (these map to the configuration exit code in the CLI).
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Config(_)
                | Error::UnsupportedRegime(_)
                | Error::ComplexIndex { .. }
                | Error::Inconsistent(_)
                | Error::NoTruncationRoot { .. }
                | Error::OutOfRange(_)
                | Error::NonConfining(_)
                | Error::Json(_)
        )
    }
}
