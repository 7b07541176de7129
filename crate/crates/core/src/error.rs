use std::io;

use thiserror::Error;

use crate::table::ResponseTable;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular design: term `{term}` is linearly dependent on earlier terms")]
    SingularDesign { term: String },

    #[error("diagnostics undefined: {rows} rows leave no residual degrees of freedom for {params} parameters")]
    NoResidualDf { rows: usize, params: usize },

    #[error("too few rows: {rows} given, at least {needed} required")]
    TooFewRows { rows: usize, needed: usize },

    #[error("invalid pairing: {0}")]
    InvalidPairing(String),

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("resource exhausted at n = {n}: {message}")]
    ResourceExhausted { n: u64, message: String },

    #[error("experiment aborted at n = {n} after {} completed rows: {source}", partial.len())]
    Aborted {
        n: u64,
        partial: ResponseTable,
        #[source]
        source: Box<Error>,
    },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn parse(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
