use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Which density-matrix invariant a candidate state broke, with its measured residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateViolation {
    /// Largest `|A[i][j] - conj(A[j][i])|`.
    Hermiticity { residual: f64 },
    /// `|Tr(A) - 1|`.
    Trace { residual: f64 },
    /// Most negative eigenvalue.
    Positivity { min_eigenvalue: f64 },
}

impl fmt::Display for StateViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateViolation::Hermiticity { residual } => {
                write!(f, "hermiticity violated (max deviation {residual:.3e})")
            }
            StateViolation::Trace { residual } => {
                write!(f, "trace invariant violated (|Tr - 1| = {residual:.3e})")
            }
            StateViolation::Positivity { min_eigenvalue } => {
                write!(f, "positivity violated (min eigenvalue {min_eigenvalue:.3e})")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid dimension {0}: factors need d >= 2 and states are ordered m <= n")]
    InvalidDimension(usize),

    #[error("operation requires a 2 x n state, got {m} x {n}")]
    WrongDimension { m: usize, n: usize },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("invalid state: {0}")]
    InvalidState(StateViolation),

    #[error("pure state has norm {norm}, expected 1")]
    NotNormalized { norm: f64 },

    #[error("Bloch coefficient has imaginary residue {residue:e}")]
    ImaginaryResidue { residue: f64 },

    #[error("negativity routes disagree: trace norm gives {trace_norm_route}, eigenvalue sum gives {eigen_route}")]
    NegativityMismatch { trace_norm_route: f64, eigen_route: f64 },

    #[error("partial transpose has {count} negative eigenvalues, above the cap {cap}")]
    CapViolation { count: usize, cap: usize },

    #[error("bound violated: {0}")]
    BoundViolation(String),

    #[error("parameters do not give a state (min eigenvalue {min_eigenvalue:.3e})")]
    NotAState { min_eigenvalue: f64 },

    #[error("parameter {param} = {value} outside the range of {family}")]
    OutOfRange { family: &'static str, param: &'static str, value: f64 },

    #[error("invalid family parameters: {0}")]
    InvalidParameters(String),

    #[error("unknown family `{0}` (expected rho1, rho2, rho3 or rho4)")]
    UnknownFamily(String),

    #[error("invalid sweep range: {0}")]
    InvalidRange(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Theorem-level failures (as opposed to bad input) signal a numerical fault.
    pub fn is_numerical_fault(&self) -> bool {
        matches!(
            self,
            Error::NegativityMismatch { .. }
                | Error::CapViolation { .. }
                | Error::BoundViolation(_)
                | Error::NoConvergence { .. }
        )
    }
}
