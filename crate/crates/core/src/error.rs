use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("expected a positive argument, got {0}")]
    NonPositive(String),

    #[error("invalid classical pair: {0}")]
    InvalidPair(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("Clifford signature mismatch: Cl({0},{1}) vs Cl({2},{3})")]
    SignatureMismatch(usize, usize, usize, usize),

    #[error("family does not satisfy its relation: {0}")]
    UnverifiedFamily(String),

    #[error("{requested} exceeds the tabulated value {bound} for {pair}")]
    ExceedsTableBound {
        pair: String,
        requested: usize,
        bound: u64,
    },

    #[error("empty matrix family")]
    EmptyFamily,

    #[error("the origin is not a point of the punctured space")]
    OriginPoint,

    #[error("generator index {index} out of range ({len} generators)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("parse error: {0}")]
    Parse(String),
}
