use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input was NaN or infinite.
    NonFinite(&'static str),
    /// A parameter fell outside its admissible range.
    OutOfRange { name: &'static str, value: f64, expected: &'static str },
    /// Grid axes are not strictly increasing with uniform spacing.
    NonUniformAxis(&'static str),
    /// Shape mismatch or too few points for the requested operation.
    BadShape(String),
    /// Data carries no information for the fit (e.g. a flat trace).
    DegenerateData(String),
    /// The exponential fit found a non-negative slope.
    NoDecay,
    /// A linear system was singular.
    Singular,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFinite(name) => write!(f, "{name} must be finite"),
            Error::OutOfRange { name, value, expected } => {
                write!(f, "{name} = {value} out of range, expected {expected}")
            }
            Error::NonUniformAxis(name) => {
                write!(f, "axis {name} must be strictly increasing and uniformly spaced")
            }
            Error::BadShape(msg) => write!(f, "bad shape: {msg}"),
            Error::DegenerateData(msg) => write!(f, "degenerate data: {msg}"),
            Error::NoDecay => f.write_str("no decay detected"),
            Error::Singular => f.write_str("singular linear system"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn finite(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(name))
    }
}

pub(crate) fn positive(name: &'static str, v: f64) -> Result<f64> {
    finite(name, v)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::OutOfRange { name, value: v, expected: "> 0" })
    }
}

pub(crate) fn non_negative(name: &'static str, v: f64) -> Result<f64> {
    finite(name, v)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::OutOfRange { name, value: v, expected: ">= 0" })
    }
}
