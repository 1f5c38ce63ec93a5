use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Gamma pole at {0}")]
    Pole(String),
    #[error("Pochhammer ratio undefined: {0}")]
    UndefinedPochhammer(String),
    #[error("series diverges: {0}")]
    Divergent(String),
    #[error("parameter outside domain: {0}")]
    Domain(String),
    #[error("precision exhausted: {needed} digits needed, cap is {cap}")]
    PrecisionExhausted { needed: u32, cap: u32 },
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("index out of range: {0}")]
    Range(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("cannot parse {0:?}")]
    Parse(String),
}

impl Error {
    /// Numeric failures (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::PrecisionExhausted { .. } | Error::NonConvergence(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
