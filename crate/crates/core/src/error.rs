use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A caller-supplied argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// The data cannot support the requested computation (e.g. an empty class).
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    /// Boosting could not produce a single usable round.
    #[error("training failed: {0}")]
    Training(String),
    /// An invariant that the algorithm guarantees was broken.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
