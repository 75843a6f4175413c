//! Design-matrix column families for reciprocal-log, polynomial, and
//! lightning-rational approximation, and the fitted approximant type.

mod approximant;
mod family;

use num_complex::Complex64;
use thiserror::Error;

pub use approximant::Approximant;
pub use family::{
    columns_confluent, columns_distinct, columns_pinned, columns_polynomial, columns_power, lightning_columns,
    lightning_distances, Block, BranchTerm, ColumnFamily, RotatedLog,
};

use crate::numkit::NumError;
use crate::poles::PoleError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("logarithm evaluated at its branch point {0}")]
    AtBranchPoint(Complex64),
    #[error("evaluation point coincides with pole {0}")]
    AtPole(Complex64),
    #[error("pole {0} lies inside the domain")]
    PoleInsideDomain(Complex64),
    #[error("{0}")]
    WrongFamily(String),
    #[error("coefficient vector has length {got}, expected {expected}")]
    CoefficientCount { got: usize, expected: usize },
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Pole(#[from] PoleError),
}
