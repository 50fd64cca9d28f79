use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Which of the two augmented views a batch belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum View {
    A,
    B,
}

impl std::fmt::Display for View {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            View::A => f.write_str("A"),
            View::B => f.write_str("B"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not positive semidefinite: eigenvalue {min_eigenvalue:e} below bound {bound:e}")]
    NotPsd { min_eigenvalue: f64, bound: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("degenerate column: view {view}, dimension {dim} has zero batch variance")]
    DegenerateColumn { view: View, dim: usize },

    #[error("training diverged at step {step}: total loss {loss:e} (initial {initial:e})")]
    Divergence { step: usize, loss: f64, initial: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error in {source_name} at {location}: {message}")]
    Parse {
        source_name: String,
        location: String,
        message: String,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
