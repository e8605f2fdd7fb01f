use thiserror::Error;

use crate::exprlang::{EvalError, ParseError};
use crate::jets::JetError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot parse {what}: {source}")]
    Parse {
        what: String,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("outside the chart domain: {0}")]
    ChartDomain(String),
    #[error("degenerate linear algebra: {0}")]
    Degenerate(String),
    #[error("immersion is not spacelike here: smallest induced-metric eigenvalue {eigenvalue:e}")]
    NotSpacelike { eigenvalue: f64 },
    #[error("normal frame construction failed: {0}")]
    Frame(String),
    #[error("unsupported normal-bundle signature: {0}")]
    UnsupportedSignature(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("configuration matches no threshold case: {0}")]
    Case(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
