use thiserror::Error;

/// Errors produced while building grids, states and kinetic-energy functionals.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KineticError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field length {found} does not match grid node count {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("grid has {points} points along the differentiated axis, at least {required} required")]
    GridTooShort { points: usize, required: usize },

    #[error("operation requires a {expected} grid")]
    WrongGrid { expected: &'static str },

    #[error("wavefunction has zero norm")]
    ZeroNorm,

    #[error("invalid orbital: {0}")]
    InvalidOrbital(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid extent too small: norm defect {defect:e} exceeds {limit:e}")]
    InsufficientExtent { defect: f64, limit: f64 },

    #[error("time step {dt} outside the accepted range (0, {max}]")]
    UnstableStep { dt: f64, max: f64 },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T, E = KineticError> = std::result::Result<T, E>;
