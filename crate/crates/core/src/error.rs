use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Malformed or out-of-contract input.
    Input(String),
    /// A precondition of an operation does not hold for otherwise valid input.
    Precondition(String),
    /// Transition matrix is not primitive.
    NotIrreducible,
    /// A limit did not settle within the iteration budget.
    Convergence {
        what: String,
        /// The sequence computed before giving up.
        partial: Vec<f64>,
    },
    /// A finite model degenerated (cycles among annuli, all-zero vectors, ...).
    Degenerate(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    /// True for errors caused by the caller's input (as opposed to numerical
    /// or model degeneracy).
    pub fn is_input(&self) -> bool {
        matches!(self, Error::Input(_) | Error::Precondition(_))
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Input(m) => write!(f, "input error: {m}"),
            Error::Precondition(m) => write!(f, "precondition failed: {m}"),
            Error::NotIrreducible => write!(
                f,
                "not irreducible: train track for a fully irreducible map expected"
            ),
            Error::Convergence { what, partial } => write!(
                f,
                "no convergence for {what} after {} terms (last {:?})",
                partial.len(),
                partial.last()
            ),
            Error::Degenerate(m) => write!(f, "degenerate: {m}"),
        }
    }
}

impl core::error::Error for Error {}
