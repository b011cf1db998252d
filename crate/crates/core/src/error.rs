use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("space has no points")]
    EmptySpace,
    #[error("duplicate point name {0:?}")]
    DuplicatePointName(String),
    #[error("distance matrix is malformed: {0}")]
    MalformedMatrix(String),
    #[error("invalid rational {0:?} (expected \"a\" or \"a/b\" with b > 0)")]
    InvalidRational(String),
    #[error("distance matrix is not symmetric at ({0}, {1})")]
    NonSymmetric(usize, usize),
    #[error("diagonal entry ({0}, {0}) is not zero")]
    NonZeroDiagonal(usize),
    #[error("off-diagonal entry ({0}, {1}) is zero")]
    ZeroOffDiagonal(usize, usize),
    #[error("entry ({0}, {1}) is negative")]
    NegativeDistance(usize, usize),

    #[error("spectrum sizes differ: {source_len} vs {target_len}")]
    SpectrumSizeMismatch { source_len: usize, target_len: usize },
    #[error("target spectrum does not start at 0")]
    TargetNotStartingAtZero,
    #[error("target spectrum is not strictly increasing")]
    SpectrumNotIncreasing,

    #[error("space has {0} point(s); at least 2 are required")]
    SpaceTooSmall(usize),
    #[error("graph is not complete multipartite")]
    NotMultipartite,
    #[error("space is not ultrametric: d({x},{y}) > max(d({x},{z}), d({z},{y}))")]
    NotUltrametric { x: String, y: String, z: String },
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
    #[error("invalid representing tree: {0}")]
    InvalidTree(String),

    #[error("not a bijection: {0}")]
    NotABijection(String),
    #[error("not applicable: {0}")]
    Inapplicable(String),
    #[error("internal verification failed: {0}")]
    VerificationFailed(String),

    #[error("{n} points exceeds the oracle limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("infeasible generator constraints: {0}")]
    InfeasibleConstraints(String),

    #[error("invalid document: {0}")]
    Document(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Document(e.to_string())
    }
}
