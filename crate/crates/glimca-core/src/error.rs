//! Error type shared across the crate.

use alloc::string::String;
use core::fmt;

/// Everything that can go wrong in the core library.
///
/// Budget overruns get their own variant so callers can distinguish "the
/// answer is no" from "the computation was too large to attempt".
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Error {
    /// Alphabet construction rejected the symbol list.
    BadAlphabet(String),
    /// A word or symbol does not belong to the expected alphabet.
    UnknownSymbol(String),
    /// A rule table or window has the wrong length for its radius.
    WindowLen { expected: usize, got: usize },
    /// A dense rule table would exceed the hard size cap.
    TableTooLarge { needed: u128, cap: u64 },
    /// A word is too short to determine the requested image cells.
    WordTooShort { needed: usize, got: usize },
    /// An enumeration or simulation would exceed the configured budget.
    BudgetExceeded { needed: u128, cap: u64 },
    /// The requested window of coordinates is empty or inverted.
    BadWindow { lo: i64, hi: i64 },
    /// An operation that needs a nonempty subshift got an empty one.
    EmptySubshift,
    /// A width or horizon parameter is out of the supported range.
    BadParameter(String),
    /// Turing machine validation or construction failed.
    BadMachine(String),
    /// The machine head tried to move left off the end of the tape.
    LeftEdgeFault { step: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::BadAlphabet(msg) => write!(f, "bad alphabet: {msg}"),
            Error::UnknownSymbol(name) => write!(f, "unknown symbol: {name:?}"),
            Error::WindowLen { expected, got } => {
                write!(f, "window length mismatch: expected {expected}, got {got}")
            }
            Error::TableTooLarge { needed, cap } => {
                write!(f, "rule table needs {needed} entries, cap is {cap}")
            }
            Error::WordTooShort { needed, got } => {
                write!(f, "word too short: need at least {needed} cells, got {got}")
            }
            Error::BudgetExceeded { needed, cap } => {
                write!(f, "budget exceeded: needs {needed} units, cap is {cap}")
            }
            Error::BadWindow { lo, hi } => write!(f, "bad coordinate window [{lo}, {hi}]"),
            Error::EmptySubshift => write!(f, "subshift is empty"),
            Error::BadParameter(msg) => write!(f, "bad parameter: {msg}"),
            Error::BadMachine(msg) => write!(f, "bad machine: {msg}"),
            Error::LeftEdgeFault { step } => {
                write!(f, "head moved left off the tape at step {step}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
