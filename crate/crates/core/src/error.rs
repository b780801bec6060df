use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension must be positive")]
    EmptyDimension,

    #[error("bracket index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("bracket ({j},{k},{l}) must satisfy j < k")]
    UnorderedPair { j: usize, k: usize, l: usize },

    #[error("duplicate bracket entry ({j},{k},{l})")]
    DuplicateEntry { j: usize, k: usize, l: usize },

    #[error("structure constant for ({j},{k},{l}) is zero")]
    ZeroCoefficient { j: usize, k: usize, l: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// `index` is 1-based.
    #[error("{what} entry {index} is not strictly positive ({value})")]
    NonPositive {
        what: &'static str,
        index: usize,
        value: f64,
    },

    #[error("algebra is not nilpotent: lower central series stabilizes at dimension {stable_dim}")]
    NotNilpotent { stable_dim: usize },

    #[error("algebra is abelian: no nonzero brackets")]
    AbelianAlgebra,

    #[error("operation requires exact (rational) structure constants and metric")]
    InexactInput,

    #[error("no positive solution of U v = lambda 1")]
    NoPositiveSolution {
        /// Basis of ker PU, scaled to integer vectors.
        kernel: Vec<Vec<i64>>,
    },

    #[error("step limit of {max_steps} exceeded at t = {t}")]
    StepLimitExceeded { max_steps: usize, t: f64 },

    #[error("step size underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64, state: Vec<f64> },

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("state is not a soliton (relative residual {residual})")]
    NotSoliton { residual: f64 },

    #[error("projective system needs m >= 2, got m = {m}")]
    ProjectiveTooSmall { m: usize },

    #[error("subset enumeration over {free} coordinates exceeds budget of {max}")]
    SubsetBudgetExceeded { free: usize, max: usize },

    #[error("Gram matrix must be square and nonempty")]
    BadGram,

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("catalog entry `{0}` has no bracket structure (Gram matrix only)")]
    GramOnly(String),
}
