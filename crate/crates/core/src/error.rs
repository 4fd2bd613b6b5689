use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("state has no amplitude above the pruning threshold")]
    DegenerateState,
    #[error("matrix is not unitary: max |U^dag U - I| = {residual:e} exceeds {tol:e}")]
    NotUnitary { residual: f64, tol: f64 },
    #[error("matrix of size {size} exceeds the permanent limit of {max}")]
    TooLarge { size: usize, max: usize },
    #[error("mode index out of range: {0}")]
    Index(String),
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("numerical consistency violated: {0}")]
    Numerical(String),
    #[error("objective returned a non-finite value {value} at {point:?}")]
    NonFinite { value: f64, point: Vec<f64> },
}

pub type Result<T> = core::result::Result<T, Error>;
