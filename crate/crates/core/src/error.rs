use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    Domain(String),
    /// The first-order system has no interior solution (e.g. the prize is too small).
    NoInteriorCandidate(String),
    /// The requested sampling mode has no structural representation for this CSF.
    UnsupportedMode(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn no_interior(msg: impl Into<String>) -> Self {
        Error::NoInteriorCandidate(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::NoInteriorCandidate(m) => write!(f, "no interior candidate: {m}"),
            Error::UnsupportedMode(m) => write!(f, "unsupported mode: {m}"),
        }
    }
}

impl core::error::Error for Error {}
