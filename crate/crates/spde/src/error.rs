//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("spectral cutoff N must be at least 1")]
    EmptyLattice,

    #[error("mode (0,0) is excluded by the mean-zero frame")]
    ZeroMode,

    #[error("oversampling factor must be >= 1, got {0}")]
    BadOversample(f64),

    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),

    #[error("time must be strictly positive, got {0}")]
    NonPositiveTime(f64),

    #[error("projection cutoff {requested} exceeds lattice cutoff {actual}")]
    ProjectionCutoff { requested: u32, actual: u32 },

    #[error("physical grid has {actual} points, lattice expects {expected}")]
    GridSizeMismatch { expected: usize, actual: usize },

    #[error("coefficient vector has length {actual}, lattice has {expected} modes")]
    CoefficientLength { expected: usize, actual: usize },

    #[error("mode ({0}, {1}) is outside the lattice")]
    ModeOutOfRange(i32, i32),

    #[error("operands live on different lattices")]
    LatticeMismatch,

    #[error("coarse step count {coarse} does not divide fine step count {fine}")]
    NonDivisorSteps { coarse: usize, fine: usize },

    #[error("noise path is incompatible with the scheme config: {0}")]
    PathMismatch(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("trajectories share no grid times")]
    NoSharedTimes,

    #[error("degenerate fit input: {0}")]
    DegenerateFit(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("snapshot format error: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
