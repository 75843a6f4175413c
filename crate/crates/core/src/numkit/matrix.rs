use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::NumError;

/// Field scalars the dense kernels are generic over: `f64` and `Complex64`.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    fn zero() -> Self;
    fn from_real(x: f64) -> Self;
    fn conj(self) -> Self;
    fn modulus(self) -> f64;
    fn modulus_sqr(self) -> f64;
    fn scale(self, s: f64) -> Self;
    fn is_finite(self) -> bool;
    /// Unit-modulus phase `x/|x|`, or one for zero.
    fn phase(self) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn modulus_sqr(self) -> f64 {
        self * self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn phase(self) -> Self {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn modulus_sqr(self) -> f64 {
        self.norm_sqr()
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
    fn phase(self) -> Self {
        let r = self.norm();
        if r == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            self / r
        }
    }
}

/// Dense column-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type ComplexMatrix = Matrix<Complex64>;
pub type RealMatrix = Matrix<f64>;

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::from_real(1.0);
        }
        m
    }

    /// Builds a matrix from column vectors of equal length.
    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Result<Self, NumError> {
        let mut data = Vec::with_capacity(rows * columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(NumError::DimensionMismatch(format!(
                    "column {j} has length {} but matrix has {rows} rows",
                    c.len()
                )));
            }
            data.extend_from_slice(c);
        }
        Ok(Self {
            rows,
            cols: columns.len(),
            data,
        })
    }

    /// Builds a matrix from row slices (test and small-problem convenience).
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, NumError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(nrows, ncols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != ncols {
                return Err(NumError::DimensionMismatch(format!(
                    "row {i} has length {} but expected {ncols}",
                    r.len()
                )));
            }
            for (j, &v) in r.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn push_column(&mut self, column: &[T]) -> Result<(), NumError> {
        if self.cols == 0 && self.rows == 0 {
            self.rows = column.len();
        }
        if column.len() != self.rows {
            return Err(NumError::DimensionMismatch(format!(
                "pushed column has length {} but matrix has {} rows",
                column.len(),
                self.rows
            )));
        }
        self.data.extend_from_slice(column);
        self.cols += 1;
        Ok(())
    }

    /// Horizontal concatenation.
    pub fn hstack(blocks: &[Matrix<T>]) -> Result<Self, NumError> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let mut out = Self::zeros(rows, 0);
        for b in blocks {
            if b.rows != rows {
                return Err(NumError::DimensionMismatch(format!(
                    "cannot stack blocks with {} and {} rows",
                    rows, b.rows
                )));
            }
            out.data.extend_from_slice(&b.data);
            out.cols += b.cols;
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>, NumError> {
        if x.len() != self.cols {
            return Err(NumError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        let mut y = vec![T::zero(); self.rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj == T::zero() {
                continue;
            }
            for (yi, &a) in y.iter_mut().zip(self.col(j)) {
                *yi += a * xj;
            }
        }
        Ok(y)
    }

    /// Conjugate-transpose product `Aᴴ·v`.
    pub fn adjoint_mul_vec(&self, v: &[T]) -> Result<Vec<T>, NumError> {
        if v.len() != self.rows {
            return Err(NumError::DimensionMismatch(format!(
                "vector of length {} against {} rows",
                v.len(),
                self.rows
            )));
        }
        Ok((0..self.cols)
            .map(|j| dot(self.col(j), v))
            .collect())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Largest column 2-norm (cheap scale estimate for tolerances).
    pub fn max_column_norm(&self) -> f64 {
        (0..self.cols)
            .map(|j| norm2(self.col(j)))
            .fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.modulus_sqr()).sum::<f64>().sqrt()
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[j * self.rows + i]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[j * self.rows + i]
    }
}

/// Hermitian dot product `Σ conj(u_i)·v_i`.
pub fn dot<T: Scalar>(u: &[T], v: &[T]) -> T {
    u.iter()
        .zip(v)
        .fold(T::zero(), |acc, (&a, &b)| acc + a.conj() * b)
}

/// Euclidean norm with scaling to avoid overflow.
pub fn norm2<T: Scalar>(v: &[T]) -> f64 {
    let big = v.iter().map(|x| x.modulus()).fold(0.0, f64::max);
    if big == 0.0 || !big.is_finite() {
        return big;
    }
    let s: f64 = v.iter().map(|x| (x.modulus() / big).powi(2)).sum();
    big * s.sqrt()
}

/// Discrete RMS norm `sqrt((1/len)·Σ|v_i|²)`, the normalization used for basis columns.
pub fn rms_norm<T: Scalar>(v: &[T]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    norm2(v) / (v.len() as f64).sqrt()
}

/// Bounds `(lower, upper)` on the 2-norm condition number of a full
/// column-rank matrix, from the triangular factor `R` of a pivoted QR:
/// `|R₀₀|/|Rₙₙ| ≤ κ ≤ ‖R‖_F·‖R⁻¹‖_F`.
pub fn condition_bounds<T: Scalar>(a: &Matrix<T>) -> (f64, f64) {
    super::lstsq::condition_bounds_from_r(a)
}
