use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{dot, rms_norm, ComplexMatrix};
use super::NumError;

/// Relative size of an orthogonalized Krylov vector below which the
/// iteration is declared broken down.
const BREAKDOWN_TOL: f64 = 1e-14;

/// Orthonormal Krylov basis `{seed, m·seed, m²·seed, …}` on a node set,
/// with the Hessenberg recurrence needed to re-evaluate it elsewhere.
///
/// Orthonormality is with respect to the discrete inner product
/// `⟨u,v⟩ = (1/rows)·Σ conj(u_i)·v_i`, so every column has RMS value one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArnoldiBasis {
    #[serde(skip)]
    nodes: Vec<Complex64>,
    #[serde(skip)]
    q: Option<ComplexMatrix>,
    /// `(dim+1) × dim` upper-Hessenberg coefficients, column-major.
    h: Vec<Complex64>,
    /// RMS norm of the seed vector on the training nodes.
    seed_norm: f64,
    dim: usize,
    breakdown: bool,
}

impl ArnoldiBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of basis columns, `dim + 1`.
    pub fn ncols(&self) -> usize {
        self.dim + 1
    }

    pub fn breakdown(&self) -> bool {
        self.breakdown
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    /// Basis columns on the training nodes. `None` after deserialization.
    pub fn q(&self) -> Option<&ComplexMatrix> {
        self.q.as_ref()
    }

    pub fn seed_norm(&self) -> f64 {
        self.seed_norm
    }

    /// Hessenberg entry `H[j,k]`.
    pub fn h(&self, j: usize, k: usize) -> Complex64 {
        self.h[k * (self.dim + 1) + j]
    }

    /// Re-evaluates the basis columns at new points via the stored recurrence,
    /// given the seed and multiplier values there.
    pub fn eval_seeded(
        &self,
        seed: &[Complex64],
        multiplier: &[Complex64],
    ) -> Result<ComplexMatrix, NumError> {
        if seed.len() != multiplier.len() {
            return Err(NumError::DimensionMismatch(format!(
                "seed has {} values but multiplier has {}",
                seed.len(),
                multiplier.len()
            )));
        }
        let rows = seed.len();
        let mut q = ComplexMatrix::zeros(rows, self.dim + 1);
        for (dst, &s) in q.col_mut(0).iter_mut().zip(seed) {
            *dst = s / self.seed_norm;
        }
        for k in 0..self.dim {
            let sub = self.h(k + 1, k);
            if sub == Complex64::new(0.0, 0.0) {
                return Err(NumError::Breakdown(format!(
                    "zero subdiagonal H[{},{}] in Arnoldi recurrence",
                    k + 1,
                    k
                )));
            }
            let mut v: Vec<Complex64> = q.col(k).iter().zip(multiplier).map(|(a, b)| a * b).collect();
            for j in 0..=k {
                let hjk = self.h(j, k);
                for (vi, &qi) in v.iter_mut().zip(q.col(j)) {
                    *vi -= hjk * qi;
                }
            }
            for (dst, vi) in q.col_mut(k + 1).iter_mut().zip(v) {
                *dst = vi / sub;
            }
        }
        Ok(q)
    }
}

/// Arnoldi basis seeded with the constant vector: orthonormalizes
/// `{1, m, m², …, m^dim}` evaluated at `nodes`.
pub fn build_arnoldi(
    nodes: &[Complex64],
    multiplier: &[Complex64],
    dim: usize,
) -> Result<ArnoldiBasis, NumError> {
    let ones = vec![Complex64::new(1.0, 0.0); nodes.len()];
    build_arnoldi_seeded(nodes, &ones, multiplier, dim)
}

/// Arnoldi basis for `{seed, m·seed, …, m^dim·seed}`.
///
/// Modified Gram–Schmidt with one full reorthogonalization pass.
/// On breakdown at step `k` the basis is truncated to dimension `k`
/// and flagged.
pub fn build_arnoldi_seeded(
    nodes: &[Complex64],
    seed: &[Complex64],
    multiplier: &[Complex64],
    dim: usize,
) -> Result<ArnoldiBasis, NumError> {
    let rows = nodes.len();
    if seed.len() != rows || multiplier.len() != rows {
        return Err(NumError::DimensionMismatch(format!(
            "{rows} nodes but {} seed values and {} multiplier values",
            seed.len(),
            multiplier.len()
        )));
    }
    if dim + 1 > rows {
        return Err(NumError::InvalidInput(format!(
            "Arnoldi dimension {dim} needs at least {} nodes, got {rows}",
            dim + 1
        )));
    }
    if multiplier.iter().chain(seed).any(|v| !v.is_finite()) {
        return Err(NumError::InvalidInput("non-finite multiplier or seed value".into()));
    }
    let inner = |u: &[Complex64], v: &[Complex64]| dot(u, v) / rows as f64;

    let seed_norm = rms_norm(seed);
    if seed_norm == 0.0 {
        return Err(NumError::Breakdown("seed vector is identically zero".into()));
    }
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim + 1);
    cols.push(seed.iter().map(|s| s / seed_norm).collect());
    // Hessenberg columns, each of length dim+1.
    let mut hcols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    let mut breakdown = false;
    for k in 0..dim {
        let mut v: Vec<Complex64> = cols[k].iter().zip(multiplier).map(|(a, b)| a * b).collect();
        let before = rms_norm(&v);
        let mut hk = vec![Complex64::new(0.0, 0.0); dim + 1];
        for _pass in 0..2 {
            for (j, qj) in cols.iter().enumerate() {
                let c = inner(qj, &v);
                hk[j] += c;
                for (vi, &qi) in v.iter_mut().zip(qj) {
                    *vi -= c * qi;
                }
            }
        }
        let nv = rms_norm(&v);
        if !(nv > BREAKDOWN_TOL * before) || !nv.is_finite() {
            breakdown = true;
            break;
        }
        hk[k + 1] = Complex64::new(nv, 0.0);
        cols.push(v.into_iter().map(|x| x / nv).collect());
        hcols.push(hk);
    }
    let dim = hcols.len();
    let mut h = Vec::with_capacity((dim + 1) * dim);
    for col in &hcols {
        h.extend_from_slice(&col[..=dim]);
    }
    Ok(ArnoldiBasis {
        nodes: nodes.to_vec(),
        q: Some(ComplexMatrix::from_columns(rows, &cols)?),
        h,
        seed_norm,
        dim,
        breakdown,
    })
}

/// Evaluates a constant-seeded basis at new nodes.
pub fn eval_arnoldi(
    basis: &ArnoldiBasis,
    new_nodes: &[Complex64],
    new_multiplier: &[Complex64],
) -> Result<ComplexMatrix, NumError> {
    if new_nodes.len() != new_multiplier.len() {
        return Err(NumError::DimensionMismatch(format!(
            "{} nodes but {} multiplier values",
            new_nodes.len(),
            new_multiplier.len()
        )));
    }
    let ones = vec![Complex64::new(1.0, 0.0); new_nodes.len()];
    basis.eval_seeded(&ones, new_multiplier)
}
