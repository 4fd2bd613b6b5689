//! JSON representation of a mode unitary:
//! `{"dim": M, "rows": [[[re, im], ...], ...]}` with `rows[k][j] = U[k][j]`.

use fockmodes_core::transform::{validate_unitary, ModeUnitary};
use fockmodes_core::Error as CoreError;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Unitarity tolerance for matrices read from files.
pub const FILE_UNITARY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum UnitaryFileError {
    #[error("malformed unitary file: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("unitary file shape: {0}")]
    Shape(String),
    #[error("matrix is not unitary: residual {residual:e} exceeds {tol:e}")]
    NotUnitary { residual: f64, tol: f64 },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UnitaryDocument {
    dim: usize,
    rows: Vec<Vec<[f64; 2]>>,
}

pub fn parse_unitary(text: &str) -> Result<ModeUnitary, UnitaryFileError> {
    let doc: UnitaryDocument = serde_json::from_str(text)?;
    let dim = doc.dim;
    if dim == 0 {
        return Err(UnitaryFileError::Shape("dim must be positive".into()));
    }
    if doc.rows.len() != dim {
        return Err(UnitaryFileError::Shape(format!(
            "expected {dim} rows, found {}",
            doc.rows.len()
        )));
    }
    for (k, row) in doc.rows.iter().enumerate() {
        if row.len() != dim {
            return Err(UnitaryFileError::Shape(format!(
                "row {k} has {} entries, expected {dim}",
                row.len()
            )));
        }
    }
    let entries = DMatrix::from_fn(dim, dim, |k, j| {
        let [re, im] = doc.rows[k][j];
        Complex64::new(re, im)
    });
    validate_unitary(entries, FILE_UNITARY_TOLERANCE).map_err(|e| match e {
        CoreError::NotUnitary { residual, tol } => UnitaryFileError::NotUnitary { residual, tol },
        other => UnitaryFileError::Shape(other.to_string()),
    })
}

pub fn unitary_to_json(u: &ModeUnitary) -> String {
    let dim = u.dim();
    let doc = UnitaryDocument {
        dim,
        rows: (0..dim)
            .map(|k| (0..dim).map(|j| [u.get(k, j).re, u.get(k, j).im]).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("plain numbers serialize")
}
