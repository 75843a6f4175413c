use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domains::Corner;
use crate::numkit::{build_arnoldi, build_arnoldi_seeded, rms_norm, ArnoldiBasis, ComplexMatrix};
use crate::poles::PoleConfig;

use super::BasisError;

/// A branch point `z_j` with its cut rotation `θ_j` and singularity recipe.
///
/// The term uses `log(e^{iθ}(z − z_j))`, whose cut is the ray from `z_j`
/// in direction `−e^{−iθ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchTerm {
    pub branch_point: Complex64,
    pub rotation: f64,
    pub poles: PoleConfig,
}

impl BranchTerm {
    pub fn new(branch_point: Complex64, rotation: f64, poles: PoleConfig) -> Self {
        Self {
            branch_point,
            rotation,
            poles,
        }
    }

    /// Term at a domain corner with its cut along the exterior bisector.
    pub fn at_corner(corner: &Corner, poles: PoleConfig) -> Self {
        Self::new(corner.vertex, corner.cut_rotation(), poles)
    }
}

/// Rotated logarithm `log(e^{iθ}(z − z_j))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotatedLog {
    pub branch_point: Complex64,
    pub rotation: f64,
}

impl RotatedLog {
    pub fn argument(&self, z: Complex64) -> Complex64 {
        Complex64::from_polar(1.0, self.rotation) * (z - self.branch_point)
    }

    /// `None` exactly at the branch point.
    pub fn eval(&self, z: Complex64) -> Option<Complex64> {
        let a = self.argument(z);
        if a == Complex64::new(0.0, 0.0) {
            None
        } else {
            Some(a.ln())
        }
    }

    /// `w = 1/(log(·) − s0)`, with `w = 0` at the branch point.
    fn reciprocal(&self, z: Complex64, s0: f64) -> Complex64 {
        self.eval(z).map_or(Complex64::new(0.0, 0.0), |l| 1.0 / (l - s0))
    }
}

/// One family of design-matrix columns, with whatever it needs to
/// re-evaluate those columns at new points.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Block {
    /// Polynomial of degree `degree` in `z`.
    Polynomial {
        degree: usize,
        arnoldi: Option<ArnoldiBasis>,
        /// Column scales for raw monomials (empty with Arnoldi).
        scales: Vec<f64>,
    },
    /// `1/(log(e^{iθ}(z − z_j)) − s_k)` for distinct `s_k`.
    LogDistinct {
        log: RotatedLog,
        poles: Vec<Complex64>,
        scales: Vec<f64>,
    },
    /// Powers `w^lowest … w^highest` of `w = 1/(log(e^{iθ}(z − z_j)) − s0)`.
    LogPower {
        log: RotatedLog,
        s0: f64,
        lowest: u32,
        highest: u32,
        arnoldi: Option<ArnoldiBasis>,
        scales: Vec<f64>,
    },
    /// Simple poles `1/(z − p_k)`.
    Lightning {
        corner: Complex64,
        poles: Vec<Complex64>,
        scales: Vec<f64>,
    },
}

fn unit_scale(col: &mut [Complex64]) -> f64 {
    let s = rms_norm(col);
    let s = if s > 0.0 && s.is_finite() { s } else { 1.0 };
    for v in col.iter_mut() {
        *v /= s;
    }
    s
}

fn scaled_columns(rows: usize, mut cols: Vec<Vec<Complex64>>) -> Result<(ComplexMatrix, Vec<f64>), BasisError> {
    let scales = cols.iter_mut().map(|c| unit_scale(c)).collect();
    Ok((ComplexMatrix::from_columns(rows, &cols)?, scales))
}

fn apply_scales(rows: usize, mut cols: Vec<Vec<Complex64>>, scales: &[f64]) -> Result<ComplexMatrix, BasisError> {
    for (c, s) in cols.iter_mut().zip(scales) {
        for v in c.iter_mut() {
            *v /= s;
        }
    }
    Ok(ComplexMatrix::from_columns(rows, &cols)?)
}

/// Columns paired with the block that regenerates them.
#[derive(Debug, Clone)]
pub struct ColumnFamily {
    pub matrix: ComplexMatrix,
    pub block: Block,
}

impl Block {
    pub fn ncols(&self) -> usize {
        match self {
            Block::Polynomial { degree, .. } => degree + 1,
            Block::LogDistinct { poles, .. } | Block::Lightning { poles, .. } => poles.len(),
            Block::LogPower { lowest, highest, .. } => (highest - lowest + 1) as usize,
        }
    }

    /// Whether evaluation at the branch point is defined (all columns vanish there).
    pub fn is_pinned(&self) -> bool {
        matches!(self, Block::LogPower { lowest, .. } if *lowest >= 2)
    }

    pub fn branch_point(&self) -> Option<Complex64> {
        match self {
            Block::LogDistinct { log, .. } | Block::LogPower { log, .. } => Some(log.branch_point),
            _ => None,
        }
    }

    /// Column values at `z`.
    pub fn columns(&self, z: &[Complex64]) -> Result<ComplexMatrix, BasisError> {
        let rows = z.len();
        match self {
            Block::Polynomial { degree, arnoldi, scales } => match arnoldi {
                Some(b) => Ok(b.eval_seeded(&vec![Complex64::new(1.0, 0.0); rows], z)?),
                None => apply_scales(rows, monomials(z, *degree), scales),
            },
            Block::LogDistinct { log, poles, scales } => {
                let logs = checked_logs(log, z)?;
                apply_scales(rows, distinct_raw(&logs, poles), scales)
            }
            Block::LogPower {
                log,
                s0,
                lowest,
                highest,
                arnoldi,
                scales,
            } => {
                if !self.is_pinned() {
                    checked_logs(log, z)?;
                }
                let w: Vec<Complex64> = z.iter().map(|&x| log.reciprocal(x, *s0)).collect();
                match arnoldi {
                    Some(b) => {
                        let seed: Vec<Complex64> = w.iter().map(|x| x.powu(*lowest)).collect();
                        Ok(b.eval_seeded(&seed, &w)?)
                    }
                    None => apply_scales(rows, powers(&w, *lowest, *highest), scales),
                }
            }
            Block::Lightning { poles, scales, .. } => apply_scales(rows, lightning_raw(z, poles)?, scales),
        }
    }
}

fn checked_logs(log: &RotatedLog, z: &[Complex64]) -> Result<Vec<Complex64>, BasisError> {
    z.iter()
        .map(|&x| log.eval(x).ok_or(BasisError::AtBranchPoint(log.branch_point)))
        .collect()
}

fn monomials(z: &[Complex64], degree: usize) -> Vec<Vec<Complex64>> {
    let mut cols = vec![vec![Complex64::new(1.0, 0.0); z.len()]];
    for k in 1..=degree {
        let next = cols[k - 1].iter().zip(z).map(|(a, b)| a * b).collect();
        cols.push(next);
    }
    cols
}

fn distinct_raw(logs: &[Complex64], poles: &[Complex64]) -> Vec<Vec<Complex64>> {
    poles
        .iter()
        .map(|&s| logs.iter().map(|&l| 1.0 / (l - s)).collect())
        .collect()
}

fn powers(w: &[Complex64], lowest: u32, highest: u32) -> Vec<Vec<Complex64>> {
    (lowest..=highest)
        .map(|k| w.iter().map(|x| x.powu(k)).collect())
        .collect()
}

fn lightning_raw(z: &[Complex64], poles: &[Complex64]) -> Result<Vec<Vec<Complex64>>, BasisError> {
    poles
        .iter()
        .map(|&p| {
            z.iter()
                .map(|&x| {
                    if x == p {
                        Err(BasisError::AtPole(p))
                    } else {
                        Ok(1.0 / (x - p))
                    }
                })
                .collect()
        })
        .collect()
}

/// Columns `1/(log(e^{iθ}(z − z_j)) − s_k)` for a distinct-parameter term,
/// scaled to unit RMS norm.
pub fn columns_distinct(z: &[Complex64], term: &BranchTerm) -> Result<ColumnFamily, BasisError> {
    let poles = term
        .poles
        .distinct_poles()?
        .ok_or_else(|| BasisError::WrongFamily("columns_distinct needs distinct singularity parameters".into()))?;
    let log = RotatedLog {
        branch_point: term.branch_point,
        rotation: term.rotation,
    };
    let logs = checked_logs(&log, z)?;
    let (matrix, scales) = scaled_columns(z.len(), distinct_raw(&logs, &poles))?;
    Ok(ColumnFamily {
        matrix,
        block: Block::LogDistinct { log, poles, scales },
    })
}

/// Power columns `{w^lowest, …, w^highest}`, Arnoldi-orthonormalized or
/// unit-scaled monomials in `w`.
pub fn columns_power(
    z: &[Complex64],
    log: RotatedLog,
    s0: f64,
    lowest: u32,
    highest: u32,
    use_arnoldi: bool,
) -> Result<ColumnFamily, BasisError> {
    if highest < lowest {
        return Err(BasisError::WrongFamily(format!("empty power range {lowest}..={highest}")));
    }
    if lowest < 2 {
        checked_logs(&log, z)?;
    }
    let w: Vec<Complex64> = z.iter().map(|&x| log.reciprocal(x, s0)).collect();
    if use_arnoldi {
        let seed: Vec<Complex64> = w.iter().map(|x| x.powu(lowest)).collect();
        let basis = build_arnoldi_seeded(z, &seed, &w, (highest - lowest) as usize)?;
        let matrix = basis.q().expect("fresh basis carries Q").clone();
        let highest = lowest + basis.dim() as u32;
        Ok(ColumnFamily {
            matrix,
            block: Block::LogPower {
                log,
                s0,
                lowest,
                highest,
                arnoldi: Some(basis),
                scales: Vec::new(),
            },
        })
    } else {
        let (matrix, scales) = scaled_columns(z.len(), powers(&w, lowest, highest))?;
        Ok(ColumnFamily {
            matrix,
            block: Block::LogPower {
                log,
                s0,
                lowest,
                highest,
                arnoldi: None,
                scales,
            },
        })
    }
}

/// Confluent columns spanning `{w⁰, …, wⁿ}`, `w = 1/(log(e^{iθ}(z − z_j)) − s0)`.
pub fn columns_confluent(z: &[Complex64], term: &BranchTerm, use_arnoldi: bool) -> Result<ColumnFamily, BasisError> {
    match term.poles {
        PoleConfig::Confluent { n, s0 } => {
            term.poles.validate()?;
            columns_power(z, log_of(term), s0, 0, n as u32, use_arnoldi)
        }
        _ => Err(BasisError::WrongFamily("columns_confluent needs a confluent configuration".into())),
    }
}

/// Pinned columns spanning `{w^J, …, w^{J+n}}`; the Krylov sequence is
/// seeded with `w^J`, so lower powers never enter the span.
pub fn columns_pinned(z: &[Complex64], term: &BranchTerm) -> Result<ColumnFamily, BasisError> {
    match term.poles {
        PoleConfig::Pinned { n, s0, pin_power } => {
            term.poles.validate()?;
            columns_power(z, log_of(term), s0, pin_power, pin_power + n as u32, true)
        }
        _ => Err(BasisError::WrongFamily("columns_pinned needs a pinned configuration".into())),
    }
}

fn log_of(term: &BranchTerm) -> RotatedLog {
    RotatedLog {
        branch_point: term.branch_point,
        rotation: term.rotation,
    }
}

/// Polynomial columns of the given degree: Arnoldi with multiplier `z`,
/// or unit-scaled monomials.
pub fn columns_polynomial(z: &[Complex64], degree: usize, use_arnoldi: bool) -> Result<ColumnFamily, BasisError> {
    if use_arnoldi {
        let basis = build_arnoldi(z, z, degree)?;
        let matrix = basis.q().expect("fresh basis carries Q").clone();
        let degree = basis.dim();
        Ok(ColumnFamily {
            matrix,
            block: Block::Polynomial {
                degree,
                arnoldi: Some(basis),
                scales: Vec::new(),
            },
        })
    } else {
        let (matrix, scales) = scaled_columns(z.len(), monomials(z, degree))?;
        Ok(ColumnFamily {
            matrix,
            block: Block::Polynomial {
                degree,
                arnoldi: None,
                scales,
            },
        })
    }
}

/// Pole distances `exp(4(√k − √n))`, `k = 1..n`, from a corner.
pub fn lightning_distances(n: usize) -> Vec<f64> {
    let sn = (n as f64).sqrt();
    (1..=n).map(|k| (4.0 * ((k as f64).sqrt() - sn)).exp()).collect()
}

/// Columns `1/(z − p_k)` for poles `p_k = corner + direction·d_k` on the
/// exterior bisector. `inside`, when given, rejects poles in the domain.
pub fn lightning_columns(
    z: &[Complex64],
    corner: Complex64,
    direction: Complex64,
    n: usize,
    inside: Option<&dyn Fn(Complex64) -> bool>,
) -> Result<ColumnFamily, BasisError> {
    let dir = direction / direction.norm();
    let poles: Vec<Complex64> = lightning_distances(n).into_iter().map(|d| corner + dir * d).collect();
    if let Some(inside) = inside {
        if let Some(p) = poles.iter().find(|&&p| inside(p)) {
            return Err(BasisError::PoleInsideDomain(*p));
        }
    }
    let (matrix, scales) = scaled_columns(z.len(), lightning_raw(z, &poles)?)?;
    Ok(ColumnFamily {
        matrix,
        block: Block::Lightning { corner, poles, scales },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{condition_bounds, dot, lstsq};
    use std::f64::consts::{E, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_distinct_pole_raw_value() {
        let term = BranchTerm::new(c(0.0, 0.0), 0.0, PoleConfig::Explicit { poles: vec![c(0.0, 0.0)] });
        let fam = columns_distinct(&[c(E, 0.0)], &term).unwrap();
        let Block::LogDistinct { scales, .. } = &fam.block else { panic!() };
        // Scaled value times recorded scale recovers 1/(log e − 0) = 1.
        assert!((fam.matrix[(0, 0)] * scales[0] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rotation_moves_the_cut() {
        let term = BranchTerm::new(c(0.0, 0.0), PI, PoleConfig::hankel(4));
        let z: Vec<Complex64> = (1..20).map(|k| c(-(k as f64) / 10.0, 0.0)).collect();
        let fam = columns_distinct(&z, &term).unwrap();
        assert!(fam.matrix.is_finite());
        // Without rotation the negative axis is the cut itself; values jump.
        let log = RotatedLog { branch_point: c(0.0, 0.0), rotation: PI };
        assert!(log.argument(c(-0.5, 0.0)).re > 0.0);
    }

    #[test]
    fn branch_point_rejected_for_distinct() {
        let term = BranchTerm::new(c(1.0, 0.0), 0.0, PoleConfig::hankel(3));
        assert!(matches!(columns_distinct(&[c(1.0, 0.0)], &term), Err(BasisError::AtBranchPoint(_))));
    }

    #[test]
    fn confluent_n0_is_constant() {
        let z: Vec<Complex64> = (1..10).map(|k| c(k as f64 / 10.0, 0.0)).collect();
        let term = BranchTerm::new(c(0.0, 0.0), 0.0, PoleConfig::Confluent { n: 0, s0: 1.0 });
        let fam = columns_confluent(&z, &term, true).unwrap();
        assert_eq!(fam.matrix.cols(), 1);
        for v in fam.matrix.col(0) {
            assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn pinned_columns_vanish_at_branch_point() {
        let z: Vec<Complex64> = (0..200).map(|k| c(10f64.powf(-20.0 + 20.0 * k as f64 / 199.0), 0.0)).collect();
        let term = BranchTerm::new(c(0.0, 0.0), 0.0, PoleConfig::pinned(8, 2));
        let fam = columns_pinned(&z, &term).unwrap();
        assert_eq!(fam.matrix.cols(), 9);
        assert!(fam.block.is_pinned());
        let at = fam.block.columns(&[c(0.0, 0.0), c(1e-100, 0.0), c(1e-300, 0.0)]).unwrap();
        for j in 0..at.cols() {
            assert_eq!(at[(0, j)], c(0.0, 0.0));
            // Columns behave like w² as w → 0, and w shrinks only logarithmically.
            assert!(at[(2, j)].norm() < at[(1, j)].norm());
        }
    }

    #[test]
    fn pinned_span_matches_literal_powers() {
        // Span of the Arnoldi columns equals span{w², …, w^{n+2}}: fitting each
        // literal power is exact.
        let z: Vec<Complex64> = (0..300).map(|k| c(10f64.powf(-20.0 + 20.0 * k as f64 / 299.0), 0.0)).collect();
        let n = 6;
        let term = BranchTerm::new(c(0.0, 0.0), 0.0, PoleConfig::pinned(n, 2));
        let fam = columns_pinned(&z, &term).unwrap();
        let w: Vec<Complex64> = z.iter().map(|x| 1.0 / (x.ln() - n as f64 / 2.0)).collect();
        for j in 2..=(n as i32 + 2) {
            let f: Vec<Complex64> = w.iter().map(|x| x.powi(j)).collect();
            let s = lstsq(&fam.matrix, &f, None).unwrap();
            let r = fam.matrix.mul_vec(&s.x).unwrap();
            let scale = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let err = r.iter().zip(&f).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-10 * scale, "power {j}: {err}");
        }
        // w itself is outside the span.
        let s = lstsq(&fam.matrix, &w, None).unwrap();
        let r = fam.matrix.mul_vec(&s.x).unwrap();
        let err = r.iter().zip(&w).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err > 1e-4);
    }

    #[test]
    fn polynomial_families() {
        let z: Vec<Complex64> = (0..100).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 100.0)).collect();
        let fam = columns_polynomial(&z, 0, true).unwrap();
        assert_eq!(fam.matrix.cols(), 1);
        let f: Vec<Complex64> = z.iter().map(|x| x * x).collect();
        for arnoldi in [true, false] {
            let fam = columns_polynomial(&z, 2, arnoldi).unwrap();
            let s = lstsq(&fam.matrix, &f, None).unwrap();
            let r = fam.matrix.mul_vec(&s.x).unwrap();
            let err = r.iter().zip(&f).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-12);
        }
    }

    #[test]
    fn lshape_polynomial_conditioning() {
        let l = crate::domains::lshape_domain();
        let g = crate::domains::boundary_grid(&l, 500, 1e-14).unwrap();
        let on = columns_polynomial(&g.points, 25, true).unwrap();
        let off = columns_polynomial(&g.points, 25, false).unwrap();
        let (_, hi_on) = condition_bounds(&on.matrix);
        let (lo_off, _) = condition_bounds(&off.matrix);
        assert!(hi_on <= 1e3, "Arnoldi condition bound {hi_on}");
        assert!(lo_off > 1e12, "monomial condition bound {lo_off}");
    }

    #[test]
    fn lightning_distances_values() {
        let d = lightning_distances(4);
        assert!((d[3] - 1.0).abs() < 1e-15);
        assert!((d[0] - (-4f64).exp()).abs() < 1e-15);
        assert!((d[0] - 0.0183).abs() < 1e-4);
        assert!(d.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn lightning_rejects_interior_pole() {
        let sq = crate::domains::unit_square_domain();
        let z = vec![c(0.5, 0.0), c(1.0, 0.5)];
        let inside = |p: Complex64| sq.contains(p);
        let bad = lightning_columns(&z, c(0.0, 0.0), c(1.0, 1.0), 4, Some(&inside));
        assert!(matches!(bad, Err(BasisError::PoleInsideDomain(_))));
        let good = lightning_columns(&z, c(0.0, 0.0), c(-1.0, -1.0), 4, Some(&inside)).unwrap();
        assert_eq!(good.matrix.cols(), 4);
    }

    #[test]
    fn scaled_columns_have_unit_rms() {
        let z: Vec<Complex64> = (1..50).map(|k| c(k as f64 / 50.0, 0.0)).collect();
        let term = BranchTerm::new(c(0.0, 0.0), 0.0, PoleConfig::hankel(6));
        let fam = columns_distinct(&z, &term).unwrap();
        for j in 0..fam.matrix.cols() {
            let nrm = (dot(fam.matrix.col(j), fam.matrix.col(j)).re / z.len() as f64).sqrt();
            assert!((nrm - 1.0).abs() < 1e-14);
        }
        // Regenerating from the block reproduces the matrix.
        let again = fam.block.columns(&z).unwrap();
        assert_eq!(again, fam.matrix);
    }
}
