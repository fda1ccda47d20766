use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical failure in `{name}`: {reason}")]
    Numeric { name: String, reason: String },

    #[error("degenerate operator `{0}`: no singular value above the numerical-rank threshold")]
    DegenerateOperator(String),

    #[error("wrong regime: {0}")]
    WrongRegime(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("while building `{context}`: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}
