use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is zero")]
    ZeroMatrix,
    #[error("not rank-one")]
    NotRankOne,
    #[error("matrix not in subspace (residual {residual:e})")]
    NotInSubspace { residual: f64 },
    #[error("degenerate chart at tau = {0}")]
    DegenerateChart(f64),
    #[error("zero direction")]
    ZeroDirection,
    #[error("singular parameter: denominator {0:e}")]
    SingularParameter(f64),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("malformed tree: {0}")]
    MalformedTree(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("empty direction dictionary")]
    EmptyDictionary,
    #[error("enumeration too large: {0}")]
    Explosion(String),
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("insufficient sweep rows: need {need}, got {got}")]
    InsufficientRows { need: usize, got: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
