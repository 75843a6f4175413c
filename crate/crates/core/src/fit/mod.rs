//! Fitting drivers: design-matrix assembly, least-squares fits, Lawson
//! refinement, convergence sweeps, and error measurement.

mod error;
mod sweep;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use error::{error_curve, max_error, sign_alternations, write_error_curve_csv, ErrorPoint};
pub use sweep::{convergence_sweep, correlation, linear_fit, ConvergenceReport, LinearFit, SweepEntry, RATE_FLOOR};

use crate::bases::{
    columns_distinct, columns_pinned, columns_polynomial, columns_power, lightning_columns, Approximant, BasisError,
    Block, BranchTerm, RotatedLog,
};
use crate::domains::{DomainError, PlanarDomain};
use crate::numkit::{lstsq, ComplexMatrix, NumError, RealMatrix};
use crate::poles::PoleConfig;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("oversampling violated: {rows} samples for {dof} unknowns (need at least {need})")]
    Oversampling { rows: usize, dof: usize, need: usize },
    #[error("invalid fit: {0}")]
    Invalid(String),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

impl From<crate::poles::PoleError> for FitError {
    fn from(e: crate::poles::PoleError) -> Self {
        FitError::Basis(e.into())
    }
}

/// Minimum ratio of sample count to unknowns.
pub const OVERSAMPLING: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientField {
    /// Complex coefficients fitted to complex data.
    #[default]
    Complex,
    /// Complex coefficients chosen so that `Re g` fits real data.
    RealPart,
}

/// One singular term of a fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TermSpec {
    /// Reciprocal-log term at a branch point.
    Log(BranchTerm),
    /// Lightning poles on the ray `corner + t·direction`, `t > 0`.
    Lightning { corner: Complex64, direction: Complex64, n: usize },
}

/// What to fit: singular terms, polynomial part, and coefficient field.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FitSpec {
    pub terms: Vec<TermSpec>,
    /// Degree of the polynomial part, `None` for no polynomial part.
    pub poly_degree: Option<usize>,
    pub use_arnoldi: bool,
    pub field: CoefficientField,
    /// When set, lightning poles are checked against this domain.
    pub domain: Option<PlanarDomain>,
}

impl FitSpec {
    /// Number of complex coefficients the spec will produce.
    pub fn ncols(&self) -> usize {
        let poly = self.poly_degree.map_or(0, |d| d + 1);
        let mut constant = self.poly_degree.is_some();
        let mut total = poly;
        for t in &self.terms {
            total += match t {
                TermSpec::Log(b) => match b.poles {
                    PoleConfig::Confluent { n, .. } => {
                        if constant {
                            n
                        } else {
                            constant = true;
                            n + 1
                        }
                    }
                    PoleConfig::Pinned { n, .. } => n + 1,
                    ref p => p.n(),
                },
                TermSpec::Lightning { n, .. } => *n,
            };
        }
        total
    }
}

/// Samples `z_i` with target values `f_i` and optional nonnegative weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub z: Vec<Complex64>,
    pub f: Vec<Complex64>,
    pub weights: Option<Vec<f64>>,
}

impl SampleSet {
    pub fn new(z: Vec<Complex64>, f: Vec<Complex64>) -> Result<Self, FitError> {
        if z.len() != f.len() {
            return Err(FitError::Invalid(format!("{} points but {} values", z.len(), f.len())));
        }
        if z.iter().chain(&f).any(|v| !v.is_finite()) {
            return Err(FitError::Invalid("samples must be finite".into()));
        }
        Ok(Self { z, f, weights: None })
    }

    pub fn from_fn(z: Vec<Complex64>, target: impl Fn(Complex64) -> Complex64) -> Result<Self, FitError> {
        let f = z.iter().map(|&x| target(x)).collect();
        Self::new(z, f)
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }
}

/// Design matrix and blocks for `spec` on the nodes `z`. Also returns the
/// index of the constant column, if one is present.
pub fn assemble(spec: &FitSpec, z: &[Complex64]) -> Result<(ComplexMatrix, Vec<Block>, Option<usize>), FitError> {
    let mut mats = Vec::new();
    let mut blocks = Vec::new();
    let mut constant_col = None;
    let mut offset = 0;
    if let Some(d) = spec.poly_degree {
        let fam = columns_polynomial(z, d, spec.use_arnoldi)?;
        constant_col = Some(0);
        offset += fam.matrix.cols();
        mats.push(fam.matrix);
        blocks.push(fam.block);
    }
    for t in &spec.terms {
        let fam = match t {
            TermSpec::Log(term) => match term.poles {
                PoleConfig::Confluent { n, s0 } => {
                    term.poles.validate()?;
                    let lowest = if constant_col.is_some() { 1 } else { 0 };
                    if lowest == 0 {
                        constant_col = Some(offset);
                    }
                    if n == 0 && lowest == 1 {
                        continue;
                    }
                    let log = RotatedLog {
                        branch_point: term.branch_point,
                        rotation: term.rotation,
                    };
                    columns_power(z, log, s0, lowest, n as u32, spec.use_arnoldi)?
                }
                PoleConfig::Pinned { .. } => columns_pinned(z, term)?,
                _ => columns_distinct(z, term)?,
            },
            TermSpec::Lightning { corner, direction, n } => {
                let inside = spec.domain.as_ref().map(|d| move |p: Complex64| d.contains_closed(p, 0.0));
                match &inside {
                    Some(f) => lightning_columns(z, *corner, *direction, *n, Some(f))?,
                    None => lightning_columns(z, *corner, *direction, *n, None)?,
                }
            }
        };
        offset += fam.matrix.cols();
        mats.push(fam.matrix);
        blocks.push(fam.block);
    }
    if mats.is_empty() {
        return Err(FitError::Invalid("fit has no columns".into()));
    }
    Ok((ComplexMatrix::hstack(&mats)?, blocks, constant_col))
}

/// A fitted approximant with training diagnostics.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub approx: Approximant,
    /// Max `|g − f|` (or `|Re g − f|` for real-part fits) on the training nodes.
    pub training_error: f64,
    pub rank_deficient: bool,
}

fn real_system(a: &ComplexMatrix, constant_col: Option<usize>) -> (RealMatrix, Vec<(usize, bool)>) {
    // Re((p+iq)φ) = p·Re φ − q·Im φ; the column map records (complex index, is imaginary part).
    let mut cols = Vec::with_capacity(2 * a.cols());
    let mut map = Vec::with_capacity(2 * a.cols());
    for j in 0..a.cols() {
        cols.push(a.col(j).iter().map(|v| v.re).collect::<Vec<f64>>());
        map.push((j, false));
        if Some(j) != constant_col {
            cols.push(a.col(j).iter().map(|v| -v.im).collect());
            map.push((j, true));
        }
    }
    (RealMatrix::from_columns(a.rows(), &cols).expect("columns share a length"), map)
}

fn solve(
    spec: &FitSpec,
    a: &ComplexMatrix,
    constant_col: Option<usize>,
    samples: &SampleSet,
    weights: Option<&[f64]>,
) -> Result<(Vec<Complex64>, usize, bool), FitError> {
    let rows = a.rows();
    match spec.field {
        CoefficientField::Complex => {
            let dof = a.cols();
            check_oversampling(rows, dof)?;
            let s = lstsq(a, &samples.f, weights)?;
            Ok((s.x, dof, s.rank_deficient))
        }
        CoefficientField::RealPart => {
            let (ar, map) = real_system(a, constant_col);
            let dof = ar.cols();
            check_oversampling(rows, dof)?;
            let f: Vec<f64> = samples.f.iter().map(|v| v.re).collect();
            let s = lstsq(&ar, &f, weights)?;
            let mut c = vec![Complex64::new(0.0, 0.0); a.cols()];
            for (x, &(j, imag)) in s.x.iter().zip(&map) {
                if imag {
                    c[j].im = *x;
                } else {
                    c[j].re = *x;
                }
            }
            Ok((c, dof, s.rank_deficient))
        }
    }
}

fn check_oversampling(rows: usize, dof: usize) -> Result<(), FitError> {
    let need = OVERSAMPLING * dof;
    if rows < need {
        Err(FitError::Oversampling { rows, dof, need })
    } else {
        Ok(())
    }
}

fn residuals(field: CoefficientField, fitted: &[Complex64], f: &[Complex64]) -> Vec<f64> {
    fitted
        .iter()
        .zip(f)
        .map(|(g, t)| match field {
            CoefficientField::Complex => (g - t).norm(),
            CoefficientField::RealPart => (g.re - t.re).abs(),
        })
        .collect()
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().cloned().fold(0.0, f64::max)
}

/// Least-squares fit of `spec` to the samples.
pub fn fit(spec: &FitSpec, samples: &SampleSet) -> Result<FitResult, FitError> {
    let (a, blocks, constant_col) = assemble(spec, &samples.z)?;
    let (c, dof, rank_deficient) = solve(spec, &a, constant_col, samples, samples.weights.as_deref())?;
    let fitted = a.mul_vec(&c)?;
    let training_error = max_of(&residuals(spec.field, &fitted, &samples.f));
    Ok(FitResult {
        approx: Approximant::new(blocks, c, dof)?,
        training_error,
        rank_deficient,
    })
}

/// Result of a Lawson iteration.
#[derive(Debug, Clone)]
pub struct LawsonResult {
    pub fit: FitResult,
    pub weights: Vec<f64>,
    /// Max weighted residual `max w_i|r_i|`-style history is not tracked;
    /// this is the unweighted max residual after each solve.
    pub history: Vec<f64>,
    /// Weights collapsed and the last valid iterate was returned.
    pub collapsed: bool,
    pub steps_taken: usize,
}

/// Residuals below this are treated as an exact fit and stop the iteration.
pub const LAWSON_EXACT: f64 = 1e-15;
pub const LAWSON_STEPS: usize = 20;

/// Classical Lawson iteration: starting from the unweighted fit, repeatedly
/// set `w_i ← w_i·|r_i|`, renormalize to `Σ w_i = 1`, and refit.
pub fn lawson_refine(spec: &FitSpec, samples: &SampleSet, steps: usize) -> Result<LawsonResult, FitError> {
    let m = samples.len();
    let (a, blocks, constant_col) = assemble(spec, &samples.z)?;
    let (mut c, dof, mut rank_deficient) = solve(spec, &a, constant_col, samples, None)?;
    let mut weights = vec![1.0 / m as f64; m];
    let mut r = residuals(spec.field, &a.mul_vec(&c)?, &samples.f);
    let mut history = vec![max_of(&r)];
    let mut collapsed = false;
    let mut taken = 0;
    for _ in 0..steps {
        if history.last().is_some_and(|&e| e < LAWSON_EXACT) {
            break;
        }
        let mut next: Vec<f64> = weights.iter().zip(&r).map(|(w, ri)| w * ri).collect();
        let total: f64 = next.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            collapsed = true;
            break;
        }
        next.iter_mut().for_each(|w| *w /= total);
        let Ok((c_next, _, rd)) = solve(spec, &a, constant_col, samples, Some(&next)) else {
            collapsed = true;
            break;
        };
        c = c_next;
        rank_deficient = rd;
        weights = next;
        r = residuals(spec.field, &a.mul_vec(&c)?, &samples.f);
        history.push(max_of(&r));
        taken += 1;
    }
    Ok(LawsonResult {
        fit: FitResult {
            approx: Approximant::new(blocks, c, dof)?,
            training_error: max_of(&r),
            rank_deficient,
        },
        weights,
        history,
        collapsed,
        steps_taken: taken,
    })
}

/// One term at each corner of a domain, cuts along exterior bisectors.
pub fn corner_terms(domain: &PlanarDomain, poles: impl Fn(usize) -> PoleConfig) -> Vec<TermSpec> {
    domain
        .corners
        .iter()
        .enumerate()
        .map(|(j, k)| TermSpec::Log(BranchTerm::at_corner(k, poles(j))))
        .collect()
}

/// Lightning poles at each corner along its exterior bisector.
pub fn corner_lightning(domain: &PlanarDomain, n: usize) -> Vec<TermSpec> {
    domain
        .corners
        .iter()
        .map(|k| TermSpec::Lightning {
            corner: k.vertex,
            direction: k.exterior_bisector,
            n,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{logspace_grid, pacman_domain};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sqrt_samples(lo: f64, m: usize) -> SampleSet {
        SampleSet::from_fn(logspace_grid(lo, 0.0, m).unwrap().points, |z| z.sqrt()).unwrap()
    }

    fn hankel_spec(n: usize) -> FitSpec {
        FitSpec {
            terms: vec![TermSpec::Log(BranchTerm::new(c(0.0, 0.0), 0.0, PoleConfig::hankel(n)))],
            poly_degree: Some(0),
            use_arnoldi: true,
            ..Default::default()
        }
    }

    #[test]
    fn constant_target_is_exact() {
        let s = SampleSet::from_fn(logspace_grid(-24.0, 0.0, 500).unwrap().points, |_| c(7.0, 0.0)).unwrap();
        for spec in [hankel_spec(6), hankel_spec(1)] {
            let r = fit(&spec, &s).unwrap();
            assert!(r.training_error <= 1e-13, "{}", r.training_error);
        }
    }

    #[test]
    fn oversampling_enforced() {
        let s = sqrt_samples(-5.0, 20);
        assert!(matches!(fit(&hankel_spec(10), &s), Err(FitError::Oversampling { .. })));
        assert!(fit(&hankel_spec(9), &s).is_ok());
    }

    #[test]
    fn ncols_matches_assembly() {
        let z = logspace_grid(-10.0, 0.0, 200).unwrap().points;
        let mut spec = hankel_spec(5);
        spec.terms.push(TermSpec::Log(BranchTerm::new(c(0.0, 0.0), 0.0, PoleConfig::confluent(4))));
        spec.terms.push(TermSpec::Log(BranchTerm::new(c(0.0, 0.0), 0.0, PoleConfig::pinned(3, 2))));
        let (a, _, k) = assemble(&spec, &z).unwrap();
        assert_eq!(a.cols(), spec.ncols());
        assert_eq!(a.cols(), 1 + 5 + 4 + 4);
        assert_eq!(k, Some(0));

        let conf = FitSpec {
            terms: vec![TermSpec::Log(BranchTerm::new(c(0.0, 0.0), 0.0, PoleConfig::confluent(4)))],
            use_arnoldi: true,
            ..Default::default()
        };
        let (a, _, k) = assemble(&conf, &z).unwrap();
        assert_eq!((a.cols(), k), (5, Some(0)));
    }

    #[test]
    fn deterministic_coefficients() {
        let s = sqrt_samples(-24.0, 400);
        let a = fit(&hankel_spec(8), &s).unwrap();
        let b = fit(&hankel_spec(8), &s).unwrap();
        assert_eq!(a.approx.coefficients, b.approx.coefficients);
    }

    #[test]
    fn lawson_zero_steps_is_plain_fit() {
        let s = sqrt_samples(-20.0, 400);
        let a = fit(&hankel_spec(6), &s).unwrap();
        let b = lawson_refine(&hankel_spec(6), &s, 0).unwrap();
        assert_eq!(a.approx.coefficients, b.fit.approx.coefficients);
        assert_eq!(b.steps_taken, 0);
    }

    #[test]
    fn lawson_stops_on_exact_fit() {
        let s = SampleSet::from_fn(logspace_grid(-5.0, 0.0, 100).unwrap().points, |_| c(2.0, 0.0)).unwrap();
        let r = lawson_refine(&hankel_spec(3), &s, 20).unwrap();
        assert!(r.steps_taken < 20);
        assert!(!r.collapsed);
    }

    #[test]
    fn real_part_fit_drops_imaginary_constant() {
        let p = pacman_domain();
        let z = crate::domains::boundary_grid(&p, 60, 1e-8).unwrap().points;
        let spec = FitSpec {
            terms: corner_terms(&p, |_| PoleConfig::hankel(3)),
            poly_degree: Some(2),
            use_arnoldi: true,
            field: CoefficientField::RealPart,
            domain: Some(p.clone()),
        };
        let s = SampleSet::from_fn(z, |_| c(1.0, 0.0)).unwrap();
        let r = fit(&spec, &s).unwrap();
        assert_eq!(r.approx.dof, 2 * (3 * 3 + 3) - 1);
        assert!(r.training_error < 1e-12);
        assert_eq!(r.approx.coefficients[0].im, 0.0);
    }

    #[test]
    fn lightning_inside_domain_rejected() {
        let p = pacman_domain();
        let z = crate::domains::boundary_grid(&p, 60, 1e-8).unwrap().points;
        let mut terms = corner_lightning(&p, 4);
        if let TermSpec::Lightning { direction, .. } = &mut terms[0] {
            *direction = -*direction;
        }
        let spec = FitSpec {
            terms,
            poly_degree: Some(0),
            domain: Some(p),
            ..Default::default()
        };
        let s = SampleSet::from_fn(z, |_| c(1.0, 0.0)).unwrap();
        assert!(matches!(fit(&spec, &s), Err(FitError::Basis(BasisError::PoleInsideDomain(_)))));
    }
}
