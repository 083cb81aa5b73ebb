use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: bad generator index, bad weight, unparseable word, ...
    #[error("input error: {0}")]
    Input(String),

    /// An operation precondition does not hold for the given data.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Non-finite or otherwise unusable floating point result.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Enumeration or search exceeded a configured cap.
    #[error("resource cap exceeded: {what} (cap {cap})")]
    ResourceCap { what: String, cap: usize },

    /// Word-length search ran out of cost budget before reaching the target.
    #[error("search exhausted: {target} not reached within cost radius {radius}")]
    SearchExhausted { target: String, radius: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn cap(what: impl Into<String>, cap: usize) -> Self {
        Error::ResourceCap {
            what: what.into(),
            cap,
        }
    }
}
