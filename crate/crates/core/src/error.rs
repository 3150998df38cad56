use alloc::string::String;
use core::fmt;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The integer is not a supported prime.
    InvalidPrime(u32),
    /// A p-adic valuation of zero was requested.
    ZeroValuation,
    /// A degree window with `from > to`, or otherwise unusable bounds.
    InvalidWindow { from: i64, to: i64 },
    /// A computation needed data outside the realized window.
    WindowTooSmall(String),
    /// A monomial string could not be parsed.
    Parse(String),
    /// Two `q` factors were multiplied together.
    QSquared,
    /// A chart failed a structural check (missing tower, v-incompatible edge, ...).
    MalformedChart(String),
    /// A differential was supposed to hit a class that is not on the current page.
    MissingTarget(String),
    /// A differential family produced a non-matching pattern (two sources on one target, ...).
    InconsistentDifferentials(String),
    /// Integer arithmetic would overflow the fixed-width representation.
    Overflow(String),
    /// A derived quantity violated a structural constraint (negative count, d^2 != 0, ...).
    Integrity(String),
    /// The requested computation is not available for this prime.
    Unsupported(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidPrime(p) => write!(f, "{p} is not a supported prime"),
            Error::ZeroValuation => write!(f, "p-adic valuation of zero is undefined"),
            Error::InvalidWindow { from, to } => write!(f, "invalid degree window {from}..{to}"),
            Error::WindowTooSmall(m) => write!(f, "window too small: {m}"),
            Error::Parse(m) => write!(f, "cannot parse monomial: {m}"),
            Error::QSquared => write!(f, "q squares to zero"),
            Error::MalformedChart(m) => write!(f, "malformed chart: {m}"),
            Error::MissingTarget(m) => write!(f, "differential target missing: {m}"),
            Error::InconsistentDifferentials(m) => write!(f, "inconsistent differentials: {m}"),
            Error::Overflow(m) => write!(f, "arithmetic overflow: {m}"),
            Error::Integrity(m) => write!(f, "integrity check failed: {m}"),
            Error::Unsupported(m) => write!(f, "unsupported: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
