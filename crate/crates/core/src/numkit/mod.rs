//! Dense complex linear algebra: column-major matrices, weighted least
//! squares by pivoted Householder QR, and Arnoldi orthogonalization of
//! Krylov-type basis sequences.

mod arnoldi;
mod lstsq;
mod matrix;

pub use arnoldi::{build_arnoldi, build_arnoldi_seeded, eval_arnoldi, ArnoldiBasis};
pub use lstsq::{lstsq, triangular_diagonal, LstsqSolution, RANK_TOL};
pub use matrix::{condition_bounds, dot, norm2, rms_norm, ComplexMatrix, Matrix, RealMatrix, Scalar};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("Arnoldi breakdown: {0}")]
    Breakdown(String),
}
