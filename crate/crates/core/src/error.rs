use std::path::PathBuf;

/// Errors raised by the simulator and the analysis routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// A sweep configuration could not be read or is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),
    /// Reading or writing a file failed.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// An evaluator produced a value that valid inputs can never produce.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure_param {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::Error::Parameter(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure_param;
