use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("degree {0} is outside 1..=32")]
    Degree(usize),

    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("images do not form a bijection on 0..{0}")]
    NotBijection(usize),

    #[error("empty generator list")]
    NoGenerators,

    /// A computation would exceed its configured budget. `flag` names the
    /// command-line option that raises the limit.
    #[error("{what} needs {required}, budget is {allowed} (raise {flag})")]
    Budget {
        what: &'static str,
        required: u128,
        allowed: u128,
        flag: &'static str,
    },

    #[error("catalog line {line}: {message}")]
    Catalog { line: usize, message: String },

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}
