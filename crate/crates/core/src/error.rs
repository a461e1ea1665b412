use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Operand shapes do not fit together.
    DimensionMismatch { expected: usize, found: usize },
    /// A tensor would exceed the configured dimension cap.
    DimensionCap { dim: usize, cap: usize },
    NotSquare { rows: usize, cols: usize },
    NotHermitian { deviation: f64 },
    NoConvergence { sweeps: usize },
    /// Twice-spin must be at least 1.
    InvalidSpin(u32),
    InvalidAngle { name: &'static str, value: f64 },
    TooFewParticles(usize),
    DirectionCount { expected: usize, found: usize },
    /// No closed form exists for this (mode, spin) combination.
    Unsupported(&'static str),
    /// Integer spins admit no violating configuration.
    IntegerSpin(u32),
    InvalidConfig(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::DimensionCap { dim, cap } => {
                write!(f, "dimension {dim} exceeds the oracle cap {cap}")
            }
            Error::NotSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}, not square"),
            Error::NotHermitian { deviation } => {
                write!(f, "matrix is not Hermitian (max deviation {deviation:e})")
            }
            Error::NoConvergence { sweeps } => {
                write!(f, "Jacobi iteration did not converge after {sweeps} sweeps")
            }
            Error::InvalidSpin(twice) => write!(f, "invalid spin: twice-spin {twice} must be >= 1"),
            Error::InvalidAngle { name, value } => write!(f, "invalid angle {name} = {value}"),
            Error::TooFewParticles(n) => write!(f, "need at least 2 particles, got {n}"),
            Error::DirectionCount { expected, found } => {
                write!(f, "expected {expected} measuring directions, got {found}")
            }
            Error::Unsupported(what) => write!(f, "unsupported combination: {what}"),
            Error::IntegerSpin(twice) => write!(
                f,
                "spin {} is an integer; the non-local part cancels and there is no violating configuration",
                twice / 2
            ),
            Error::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
        }
    }
}

impl core::error::Error for Error {}
