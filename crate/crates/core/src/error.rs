use thiserror::Error;

/// Errors raised by the exact-arithmetic and geometry layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero in Q(zeta_{0})")]
    DivisionByZero(u32),

    #[error("galois exponent {j} is not a unit modulo {m}")]
    NotCoprime { j: i64, m: u32 },

    #[error("{d} does not divide the conductor {m}")]
    NotDivisor { d: u32, m: u32 },

    #[error("element is not real")]
    NotReal,

    #[error("symmetry parameter n must be at least 3 (got {0})")]
    InvalidSymmetry(u32),

    #[error("cross ratio needs pairwise distinct arguments")]
    RepeatedValue,

    #[error("cross ratio accepts at most one infinite argument")]
    TooManyInfinities,

    #[error("invalid quadruple index {0:?}")]
    InvalidQuadruple([u32; 4]),

    #[error("cross-ratio orbit undefined for 0 and 1")]
    DegenerateCrossRatio,

    #[error("zero vector does not define a direction")]
    ZeroDirection,

    #[error("polygon is degenerate")]
    DegeneratePolygon,

    #[error("set is not contained in the patch")]
    NotSubset,

    #[error("patch has {size} points, the limit is {limit}")]
    PatchTooLarge { size: usize, limit: usize },

    #[error("coefficient box has {candidates} candidates; try a radius of at most {suggested}")]
    CandidateExplosion { candidates: u128, suggested: String },

    #[error("witness has {got} slopes, expected {expected}")]
    SizeMismatch { got: usize, expected: usize },

    #[error("no valid two-colouring found")]
    NoColouring,

    #[error("search for n = {n} needs conductor {m} > 600; pass allow_large")]
    TooLarge { n: u32, m: u32 },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
