use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: u64, modulus: u64 },

    #[error("curve has bad reduction at {0}")]
    BadReduction(u64),

    #[error("point is not on the curve")]
    NotOnCurve,

    #[error("prime {p} exceeds the enumeration bound {bound}")]
    BoundExceeded { p: u64, bound: u64 },

    #[error("psi is not defined at the point at infinity")]
    PsiAtIdentity,

    #[error("[{n}]P lands on the branch at infinity {branch}")]
    InfinityBranch { n: i64, branch: u8 },

    #[error("not an arithmetic progression of the expected square pattern: {0}")]
    NotSquarePattern(String),

    #[error("incompatible file: {0}")]
    Incompatible(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
