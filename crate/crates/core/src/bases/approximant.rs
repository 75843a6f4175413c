use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numkit::ComplexMatrix;

use super::{BasisError, Block};

/// A fitted linear combination of column families.
///
/// Reciprocal-log approximants carry `LogDistinct`/`LogPower` blocks;
/// lightning approximants carry `Lightning` blocks. Both may carry a
/// `Polynomial` block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Approximant {
    pub blocks: Vec<Block>,
    /// One coefficient per column, in block order.
    pub coefficients: Vec<Complex64>,
    /// Degrees of freedom used by the fit (complex coefficients, or real
    /// unknowns for real-coefficient fits).
    pub dof: usize,
}

impl Approximant {
    pub fn new(blocks: Vec<Block>, coefficients: Vec<Complex64>, dof: usize) -> Result<Self, BasisError> {
        let expected: usize = blocks.iter().map(Block::ncols).sum();
        if coefficients.len() != expected {
            return Err(BasisError::CoefficientCount {
                got: coefficients.len(),
                expected,
            });
        }
        Ok(Self {
            blocks,
            coefficients,
            dof,
        })
    }

    /// A constant approximant `g ≡ c`.
    pub fn constant(c: Complex64) -> Self {
        Self {
            blocks: vec![Block::Polynomial {
                degree: 0,
                arnoldi: None,
                scales: vec![1.0],
            }],
            coefficients: vec![c],
            dof: 1,
        }
    }

    pub fn ncols(&self) -> usize {
        self.coefficients.len()
    }

    /// Full design matrix at `z`.
    pub fn design_matrix(&self, z: &[Complex64]) -> Result<ComplexMatrix, BasisError> {
        let parts = self
            .blocks
            .iter()
            .map(|b| b.columns(z))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ComplexMatrix::hstack(&parts)?)
    }

    pub fn evaluate(&self, z: &[Complex64]) -> Result<Vec<Complex64>, BasisError> {
        // Blocks are evaluated one at a time to avoid holding the full matrix.
        let mut out = vec![Complex64::new(0.0, 0.0); z.len()];
        let mut offset = 0;
        for b in &self.blocks {
            let a = b.columns(z)?;
            let c = &self.coefficients[offset..offset + a.cols()];
            for (j, &cj) in c.iter().enumerate() {
                for (o, &v) in out.iter_mut().zip(a.col(j)) {
                    *o += cj * v;
                }
            }
            offset += a.cols();
        }
        Ok(out)
    }

    pub fn evaluate_at(&self, z: Complex64) -> Result<Complex64, BasisError> {
        Ok(self.evaluate(&[z])?[0])
    }

    /// Coefficients with respect to the unscaled columns of each
    /// unit-normalized block. Arnoldi blocks are left unchanged since
    /// their columns have no raw counterpart.
    pub fn raw_coefficients(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.coefficients.len());
        let mut offset = 0;
        for b in &self.blocks {
            let n = b.ncols();
            let c = &self.coefficients[offset..offset + n];
            let scales = match b {
                Block::Polynomial { scales, .. }
                | Block::LogDistinct { scales, .. }
                | Block::LogPower { scales, .. }
                | Block::Lightning { scales, .. } => scales,
            };
            if scales.len() == n {
                out.extend(c.iter().zip(scales).map(|(v, s)| v / s));
            } else {
                out.extend_from_slice(c);
            }
            offset += n;
        }
        out
    }

    /// `α·self + β·other` for approximants sharing the same blocks.
    pub fn combine(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Result<Self, BasisError> {
        if self.coefficients.len() != other.coefficients.len() {
            return Err(BasisError::CoefficientCount {
                got: other.coefficients.len(),
                expected: self.coefficients.len(),
            });
        }
        let coefficients = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Ok(Self {
            blocks: self.blocks.clone(),
            coefficients,
            dof: self.dof,
        })
    }

    /// Branch points of all logarithmic blocks.
    pub fn branch_points(&self) -> Vec<Complex64> {
        self.blocks.iter().filter_map(Block::branch_point).collect()
    }

    /// Pole locations of all lightning blocks.
    pub fn lightning_poles(&self) -> Vec<Complex64> {
        self.blocks
            .iter()
            .flat_map(|b| match b {
                Block::Lightning { poles, .. } => poles.clone(),
                _ => Vec::new(),
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(s: &str) -> Result<Self, BasisError> {
        let a: Self = serde_json::from_str(s).map_err(|e| BasisError::WrongFamily(format!("bad approximant JSON: {e}")))?;
        Self::new(a.blocks, a.coefficients, a.dof)
    }
}
