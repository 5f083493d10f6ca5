use alloc::string::String;
use core::fmt;

/// Failure kinds. Precondition, format and resource errors are the caller's
/// fault; `Internal` means a verified identity failed and indicates a bug.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    Precondition(String),
    Format(String),
    Resource(String),
    Internal(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Precondition(_) => "precondition",
            Error::Format(_) => "format",
            Error::Resource(_) => "resource",
            Error::Internal(_) => "internal",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Error::Precondition(m) | Error::Format(m) | Error::Resource(m) | Error::Internal(m) => m,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.kind(), self.message())
    }
}

macro_rules! pre {
    ($($t:tt)*) => { $crate::error::Error::Precondition(alloc::format!($($t)*)) };
}
#[allow(unused_macros)]
macro_rules! internal {
    ($($t:tt)*) => { $crate::error::Error::Internal(alloc::format!($($t)*)) };
}
#[allow(unused_macros)]
macro_rules! ensure_internal {
    ($cond:expr, $($t:tt)*) => {
        if !$cond {
            return Err($crate::error::Error::Internal(alloc::format!($($t)*)));
        }
    };
}
#[allow(unused_imports)]
pub(crate) use {ensure_internal, internal, pre};

impl core::error::Error for Error {}
