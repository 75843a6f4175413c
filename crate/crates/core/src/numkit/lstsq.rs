use super::matrix::{norm2, Matrix, Scalar};
use super::NumError;

/// Relative threshold on `|R_kk| / |R_00|` below which the pivoted
/// triangular factor is treated as numerically rank deficient.
pub const RANK_TOL: f64 = 1e-13;

/// Result of a least-squares solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LstsqSolution<T> {
    pub x: Vec<T>,
    /// Numerical rank of the (weighted) design matrix.
    pub rank: usize,
    /// Set when `rank < cols`; the dropped directions carry zero coefficients.
    pub rank_deficient: bool,
}

/// Householder QR with column pivoting, stored compactly.
struct PivotedQr<T> {
    /// Upper triangle holds R; below-diagonal storage is discarded.
    r: Matrix<T>,
    /// Householder vectors, one per reflection (full length, zero above k).
    reflectors: Vec<(Vec<T>, f64)>,
    perm: Vec<usize>,
}

impl<T: Scalar> PivotedQr<T> {
    fn factor(mut a: Matrix<T>) -> Self {
        let m = a.rows();
        let n = a.cols();
        let steps = m.min(n);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut reflectors = Vec::with_capacity(steps);
        for k in 0..steps {
            // Pivot on the largest trailing column norm. Norms are recomputed
            // exactly: downdating loses all accuracy on the ill-conditioned
            // matrices this is used for.
            let (piv, _) = (k..n)
                .map(|j| (j, norm2(&a.col(j)[k..])))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if piv != k {
                for i in 0..m {
                    let tmp = a[(i, k)];
                    a[(i, k)] = a[(i, piv)];
                    a[(i, piv)] = tmp;
                }
                perm.swap(k, piv);
            }
            let alpha = norm2(&a.col(k)[k..]);
            let mut v = vec![T::zero(); m];
            if alpha == 0.0 {
                reflectors.push((v, 0.0));
                continue;
            }
            let x0 = a[(k, k)];
            let beta = -(x0.phase().scale(alpha));
            v[k..].copy_from_slice(&a.col(k)[k..]);
            v[k] -= beta;
            let vnorm2: f64 = v[k..].iter().map(|x| x.modulus_sqr()).sum();
            for j in k..n {
                apply_reflector(&v, vnorm2, k, a.col_mut(j));
            }
            // Exact values for the pivot column.
            a[(k, k)] = beta;
            for i in k + 1..m {
                a[(i, k)] = T::zero();
            }
            reflectors.push((v, vnorm2));
        }
        Self {
            r: a,
            reflectors,
            perm,
        }
    }

    fn apply_qh(&self, b: &mut [T]) {
        for (k, (v, vn)) in self.reflectors.iter().enumerate() {
            apply_reflector(v, *vn, k, b);
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.reflectors.len())
            .map(|k| self.r[(k, k)].modulus())
            .collect()
    }

    fn rank(&self) -> usize {
        let d = self.diagonal();
        let Some(&d0) = d.first() else { return 0 };
        if d0 == 0.0 {
            return 0;
        }
        d.iter().take_while(|&&x| x > RANK_TOL * d0).count()
    }
}

fn apply_reflector<T: Scalar>(v: &[T], vnorm2: f64, k: usize, y: &mut [T]) {
    if vnorm2 == 0.0 {
        return;
    }
    let mut s = T::zero();
    for i in k..y.len() {
        s += v[i].conj() * y[i];
    }
    let f = s.scale(2.0 / vnorm2);
    for i in k..y.len() {
        y[i] -= v[i] * f;
    }
}

/// Weighted linear least squares: minimizes `Σ w_i·|A_i·x − b_i|²`
/// (`w ≡ 1` when absent) by pivoted Householder QR.
///
/// Columns beyond the numerical rank get zero coefficients and the
/// solution is flagged rank deficient rather than rejected.
pub fn lstsq<T: Scalar>(
    a: &Matrix<T>,
    b: &[T],
    w: Option<&[f64]>,
) -> Result<LstsqSolution<T>, NumError> {
    let m = a.rows();
    let n = a.cols();
    if b.len() != m {
        return Err(NumError::DimensionMismatch(format!(
            "matrix has {m} rows but right-hand side has length {}",
            b.len()
        )));
    }
    let mut aw = a.clone();
    let mut bw = b.to_vec();
    if let Some(w) = w {
        if w.len() != m {
            return Err(NumError::DimensionMismatch(format!(
                "matrix has {m} rows but weight vector has length {}",
                w.len()
            )));
        }
        if let Some(bad) = w.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
            return Err(NumError::InvalidInput(format!("weight {bad} is not a finite nonnegative number")));
        }
        let positive = w.iter().filter(|&&x| x > 0.0).count();
        if positive < n {
            return Err(NumError::InvalidInput(format!(
                "only {positive} strictly positive weights for {n} unknowns"
            )));
        }
        for (i, &wi) in w.iter().enumerate() {
            let s = wi.sqrt();
            bw[i] = bw[i].scale(s);
            for j in 0..n {
                aw[(i, j)] = aw[(i, j)].scale(s);
            }
        }
    }
    if !aw.is_finite() || bw.iter().any(|v| !v.is_finite()) {
        return Err(NumError::InvalidInput("non-finite entries in least-squares data".into()));
    }

    let qr = PivotedQr::factor(aw);
    qr.apply_qh(&mut bw);
    let rank = qr.rank();
    // Back substitution on the leading rank×rank block.
    let mut y = vec![T::zero(); n];
    for i in (0..rank).rev() {
        let mut s = bw[i];
        for j in i + 1..rank {
            s -= qr.r[(i, j)] * y[j];
        }
        y[i] = s / qr.r[(i, i)];
    }
    let mut x = vec![T::zero(); n];
    for (k, &p) in qr.perm.iter().enumerate() {
        x[p] = y[k];
    }
    Ok(LstsqSolution {
        x,
        rank,
        rank_deficient: rank < n,
    })
}

/// Moduli of the diagonal of the pivoted triangular factor.
pub fn triangular_diagonal<T: Scalar>(a: &Matrix<T>) -> Vec<f64> {
    PivotedQr::factor(a.clone()).diagonal()
}

pub(super) fn condition_bounds_from_r<T: Scalar>(a: &Matrix<T>) -> (f64, f64) {
    let qr = PivotedQr::factor(a.clone());
    let n = a.cols().min(a.rows());
    let d = qr.diagonal();
    if n == 0 {
        return (1.0, 1.0);
    }
    if d.contains(&0.0) {
        return (f64::INFINITY, f64::INFINITY);
    }
    let lower = d[0] / d[n - 1];
    // ‖R‖_F and ‖R⁻¹‖_F with R⁻¹ formed column by column.
    let mut r_f = 0.0;
    for j in 0..n {
        for i in 0..=j {
            r_f += qr.r[(i, j)].modulus_sqr();
        }
    }
    let mut rinv_f = 0.0;
    for j in 0..n {
        let mut col = vec![T::zero(); n];
        col[j] = T::from_real(1.0);
        for i in (0..=j).rev() {
            let mut s = col[i];
            for k in i + 1..=j {
                s -= qr.r[(i, k)] * col[k];
            }
            col[i] = s / qr.r[(i, i)];
        }
        rinv_f += col.iter().map(|v| v.modulus_sqr()).sum::<f64>();
    }
    (lower, (r_f * rinv_f).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{ComplexMatrix, RealMatrix};
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_case() {
        let a = ComplexMatrix::identity(1);
        let s = lstsq(&a, &[c(3.0)], None).unwrap();
        assert_eq!(s.x, vec![c(3.0)]);
        assert!(!s.rank_deficient);
    }

    #[test]
    fn mean_minimizes_unweighted() {
        let a = ComplexMatrix::from_rows(&[vec![c(1.0)], vec![c(1.0)]]).unwrap();
        let s = lstsq(&a, &[c(0.0), c(2.0)], None).unwrap();
        assert!((s.x[0] - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn weighted_mean() {
        // d/dx [3x² + (x−2)²] = 0  →  x = 1/2
        let a = ComplexMatrix::from_rows(&[vec![c(1.0)], vec![c(1.0)]]).unwrap();
        let s = lstsq(&a, &[c(0.0), c(2.0)], Some(&[3.0, 1.0])).unwrap();
        assert!((s.x[0] - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = RealMatrix::zeros(3, 2);
        assert!(matches!(lstsq(&a, &[1.0, 2.0], None), Err(NumError::DimensionMismatch(_))));
        let a = RealMatrix::identity(2);
        assert!(lstsq(&a, &[1.0, 2.0], Some(&[1.0])).is_err());
    }

    #[test]
    fn too_few_positive_weights() {
        let a = RealMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(lstsq(&a, &[1.0, 1.0, 1.0], Some(&[1.0, 0.0, 0.0])).is_err());
        assert!(lstsq(&a, &[1.0, 1.0, 1.0], Some(&[1.0, -1.0, 1.0])).is_err());
    }

    #[test]
    fn rank_deficiency_is_flagged_not_fatal() {
        // Two identical columns.
        let a = RealMatrix::from_rows(&[vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]]).unwrap();
        let b = [2.0, 4.0, 6.0];
        let s = lstsq(&a, &b, None).unwrap();
        assert!(s.rank_deficient);
        assert_eq!(s.rank, 1);
        let fit = a.mul_vec(&s.x).unwrap();
        for (f, t) in fit.iter().zip(&b) {
            assert!((f - t).abs() < 1e-13);
        }
    }

    #[test]
    fn complex_overdetermined_fit() {
        // Fit b = (1+2i) + (3−i)·z at complex nodes: exact.
        let z: Vec<Complex64> = (0..7).map(|k| Complex64::from_polar(1.0, k as f64)).collect();
        let cols = vec![vec![c(1.0); 7], z.clone()];
        let a = ComplexMatrix::from_columns(7, &cols).unwrap();
        let b: Vec<Complex64> = z
            .iter()
            .map(|&zi| Complex64::new(1.0, 2.0) + Complex64::new(3.0, -1.0) * zi)
            .collect();
        let s = lstsq(&a, &b, None).unwrap();
        assert!((s.x[0] - Complex64::new(1.0, 2.0)).norm() < 1e-14);
        assert!((s.x[1] - Complex64::new(3.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn condition_bounds_of_orthogonal_columns() {
        let a = RealMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let (lo, hi) = condition_bounds_from_r(&a);
        assert!((lo - 1.0).abs() < 1e-15);
        assert!(hi <= 2.0 + 1e-14);
    }
}
