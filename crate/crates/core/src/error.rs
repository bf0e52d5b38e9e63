use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("invalid automaton: {0}")]
    Schema(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("duplicate state `{0}`")]
    DuplicateState(String),

    #[error("automaton is not fork-acyclic: `{state}` forks into `{target}`, which it supports")]
    NotForkAcyclic { state: String, target: String },

    #[error("set is not support-closed: `{state}` is included but `{missing}` is not")]
    NotSupportClosed { state: String, missing: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
