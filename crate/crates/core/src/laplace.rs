//! Dirichlet problems for the Laplace equation on polygons, solved by
//! fitting the real part of a log-lightning or lightning approximant to
//! boundary data.

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bases::{Approximant, BasisError};
use crate::domains::{boundary_grid, validation_boundary_grid, PlanarDomain, DEFAULT_MIN_DIST};
use crate::fit::{corner_lightning, corner_terms, fit, CoefficientField, FitError, FitSpec, SampleSet, SweepEntry};
use crate::poles::PoleConfig;

/// Pole-scale factor for Laplace solves: `s_k = (n/3)(1 + iθ_k)²`.
pub const DEFAULT_POLE_SCALE: f64 = 1.0 / 3.0;
/// Boundary samples per edge.
pub const DEFAULT_PER_EDGE: usize = 500;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LaplaceError {
    #[error("point {0} lies outside the domain")]
    OutsideDomain(Complex64),
    #[error("boundary data is not finite at {0}")]
    BadData(Complex64),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Basis(#[from] BasisError),
}

/// Boundary sampling for a solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySampling {
    pub per_edge: usize,
    pub min_dist: f64,
}

impl Default for BoundarySampling {
    fn default() -> Self {
        Self {
            per_edge: DEFAULT_PER_EDGE,
            min_dist: DEFAULT_MIN_DIST,
        }
    }
}

/// `u = Re g` for a fitted approximant `g`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarmonicSolution {
    pub approx: Approximant,
    pub domain: PlanarDomain,
    /// Max `|u − data|` on the validation boundary grid.
    pub boundary_err: f64,
    /// Real degrees of freedom.
    pub dof: usize,
    pub training_error: f64,
    pub rank_deficient: bool,
}

/// Log-lightning solve: `n` Hankel-parabola singularities with prefactor
/// `pole_scale·n` at every corner plus a polynomial of degree `poly_degree`.
pub fn solve_dirichlet(
    domain: &PlanarDomain,
    data: impl Fn(Complex64) -> f64,
    n_per_corner: usize,
    poly_degree: usize,
    pole_scale: f64,
    sampling: BoundarySampling,
) -> Result<HarmonicSolution, LaplaceError> {
    let scale = pole_scale * n_per_corner as f64;
    let terms = if n_per_corner == 0 {
        Vec::new()
    } else {
        corner_terms(domain, |_| PoleConfig::HankelParabola { n: n_per_corner, scale })
    };
    solve_with_terms(domain, data, terms, poly_degree, sampling)
}

/// Lightning solve: `n` poles per corner at distances `exp(4(√k − √n))`
/// along the exterior bisectors, plus a polynomial of degree `poly_degree`.
pub fn solve_dirichlet_lightning(
    domain: &PlanarDomain,
    data: impl Fn(Complex64) -> f64,
    n_per_corner: usize,
    poly_degree: usize,
    sampling: BoundarySampling,
) -> Result<HarmonicSolution, LaplaceError> {
    let terms = if n_per_corner == 0 {
        Vec::new()
    } else {
        corner_lightning(domain, n_per_corner)
    };
    solve_with_terms(domain, data, terms, poly_degree, sampling)
}

fn solve_with_terms(
    domain: &PlanarDomain,
    data: impl Fn(Complex64) -> f64,
    terms: Vec<crate::fit::TermSpec>,
    poly_degree: usize,
    sampling: BoundarySampling,
) -> Result<HarmonicSolution, LaplaceError> {
    let grid = boundary_grid(domain, sampling.per_edge, sampling.min_dist).map_err(FitError::from)?;
    let values = sample_data(&grid.points, &data)?;
    let samples = SampleSet::new(grid.points, values).map_err(LaplaceError::from)?;
    let spec = FitSpec {
        terms,
        poly_degree: Some(poly_degree),
        use_arnoldi: true,
        field: CoefficientField::RealPart,
        domain: Some(domain.clone()),
    };
    let r = fit(&spec, &samples)?;
    let vgrid = validation_boundary_grid(domain, sampling.per_edge, sampling.min_dist).map_err(FitError::from)?;
    let u = r.approx.evaluate(&vgrid.points)?;
    let mut boundary_err: f64 = 0.0;
    for (z, g) in vgrid.points.iter().zip(&u) {
        let d = data(*z);
        if !d.is_finite() {
            return Err(LaplaceError::BadData(*z));
        }
        boundary_err = boundary_err.max((g.re - d).abs());
    }
    Ok(HarmonicSolution {
        dof: r.approx.dof,
        approx: r.approx,
        domain: domain.clone(),
        boundary_err,
        training_error: r.training_error,
        rank_deficient: r.rank_deficient,
    })
}

fn sample_data(z: &[Complex64], data: &impl Fn(Complex64) -> f64) -> Result<Vec<Complex64>, LaplaceError> {
    z.iter()
        .map(|&p| {
            let d = data(p);
            if d.is_finite() {
                Ok(Complex64::new(d, 0.0))
            } else {
                Err(LaplaceError::BadData(p))
            }
        })
        .collect()
}

/// Tolerance for treating a point as on the closed domain.
const CLOSURE_TOL: f64 = 1e-12;

/// `u(z) = Re g(z)` at points of the closed domain.
pub fn eval_solution(sol: &HarmonicSolution, z: &[Complex64]) -> Result<Vec<f64>, LaplaceError> {
    if let Some(p) = z.iter().find(|&&p| !sol.domain.contains_closed(p, CLOSURE_TOL)) {
        return Err(LaplaceError::OutsideDomain(*p));
    }
    Ok(sol.approx.evaluate(z)?.into_iter().map(|g| g.re).collect())
}

/// Five-point Laplacian `(u(z+h) + u(z−h) + u(z+ih) + u(z−ih) − 4u(z))/h²`.
pub fn discrete_laplacian(sol: &HarmonicSolution, z: Complex64, h: f64) -> Result<f64, LaplaceError> {
    let pts = [
        z,
        z + h,
        z - h,
        z + Complex64::new(0.0, h),
        z - Complex64::new(0.0, h),
    ];
    let u = eval_solution(sol, &pts)?;
    Ok((u[1] + u[2] + u[3] + u[4] - 4.0 * u[0]) / (h * h))
}

/// Real dof for `m` corners with `n` singularities each and a degree-`n₀`
/// polynomial: `2(m·n + n₀ + 1) − 1`.
pub fn real_dof(corners: usize, n: usize, poly_degree: usize) -> usize {
    2 * (corners * n + poly_degree + 1) - 1
}

/// Which solver a sweep runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplaceMethod {
    LogLightning,
    Lightning,
}

impl LaplaceMethod {
    pub fn name(&self) -> &'static str {
        match self {
            LaplaceMethod::LogLightning => "log_lightning",
            LaplaceMethod::Lightning => "lightning",
        }
    }
}

/// One solve with `n` per corner and polynomial degree `n`, as a sweep row.
pub fn sweep_entry(
    domain: &PlanarDomain,
    data: impl Fn(Complex64) -> f64,
    n: usize,
    method: LaplaceMethod,
    sampling: BoundarySampling,
) -> Result<(HarmonicSolution, SweepEntry), LaplaceError> {
    let t = Instant::now();
    let sol = match method {
        LaplaceMethod::LogLightning => solve_dirichlet(domain, data, n, n, DEFAULT_POLE_SCALE, sampling)?,
        LaplaceMethod::Lightning => solve_dirichlet_lightning(domain, data, n, n, sampling)?,
    };
    let entry = SweepEntry {
        dof: sol.dof,
        max_err: sol.boundary_err,
        boundary_err: sol.boundary_err,
        runtime_ms: t.elapsed().as_secs_f64() * 1e3,
    };
    Ok((sol, entry))
}

/// CSV with header `re_z,im_z,u,re_g,im_g` on an `nx × ny` lattice over
/// the bounding box, keeping only points of the closed domain.
pub fn write_field_csv<W: std::io::Write>(
    sol: &HarmonicSolution,
    nx: usize,
    ny: usize,
    out: W,
) -> Result<usize, Box<dyn std::error::Error + Send + Sync>> {
    let (lo, hi) = sol.domain.bounding_box();
    let mut pts = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            let x = lo.re + (hi.re - lo.re) * i as f64 / (nx.max(2) - 1) as f64;
            let y = lo.im + (hi.im - lo.im) * j as f64 / (ny.max(2) - 1) as f64;
            let z = Complex64::new(x, y);
            if sol.domain.contains(z) {
                pts.push(z);
            }
        }
    }
    let g = sol.approx.evaluate(&pts)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["re_z", "im_z", "u", "re_g", "im_g"])?;
    for (z, v) in pts.iter().zip(&g) {
        w.serialize((z.re, z.im, v.re, v.re, v.im))?;
    }
    w.flush()?;
    Ok(pts.len())
}
