//! Ready-made runs on the built-in problems, shared by the CLI and the
//! acceptance suite.

use std::f64::consts::LN_10;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bases::BranchTerm;
use crate::domains::{
    boundary_grid, logspace_grid, pacman_domain, pacman_target, validation_boundary_grid, DEFAULT_MIN_DIST,
    VALIDATION_DENSITY,
};
use crate::fit::{
    corner_lightning, corner_terms, fit, lawson_refine, max_error, FitError, FitResult, FitSpec, LawsonResult,
    SampleSet, SweepEntry, TermSpec,
};
use crate::poles::PoleConfig;

fn origin() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Log-spaced interval grid `[10^lo, 10^hi]` with `m` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalGrid {
    pub lo_exp: f64,
    pub hi_exp: f64,
    pub m: usize,
}

impl IntervalGrid {
    pub const FIG1: Self = Self {
        lo_exp: -24.0,
        hi_exp: 0.0,
        m: 1000,
    };
    pub const DEEP: Self = Self {
        lo_exp: -100.0,
        hi_exp: 0.0,
        m: 2000,
    };
    pub const LAWSON: Self = Self {
        lo_exp: -20.0,
        hi_exp: 0.0,
        m: 1000,
    };

    pub fn points(&self) -> Result<Vec<Complex64>, FitError> {
        Ok(logspace_grid(self.lo_exp, self.hi_exp, self.m)?.points)
    }

    /// Same range at validation density.
    pub fn validation(&self) -> Result<Vec<Complex64>, FitError> {
        Ok(logspace_grid(self.lo_exp, self.hi_exp, VALIDATION_DENSITY * self.m)?.points)
    }
}

/// Singular-term choice for interval fits with the branch point at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntervalMethod {
    /// Reciprocal-log term plus a constant. Confluent terms carry their own
    /// `w⁰` column; pinned terms get no constant, so the dimension matches
    /// the confluent space and `g(0) = 0`.
    Log { poles: PoleConfig },
    /// `n` lightning poles on the negative real axis plus a constant.
    Lightning { n: usize },
}

impl IntervalMethod {
    /// Rejects singularity parameters that put a pole of the approximant on
    /// the fitting interval, i.e. real `s_k` with `e^{s_k}` inside it.
    pub fn check_poles(&self, grid: &IntervalGrid) -> Result<(), FitError> {
        let IntervalMethod::Log { poles } = self else { return Ok(()) };
        let s = match poles {
            PoleConfig::Confluent { s0, .. } | PoleConfig::Pinned { s0, .. } => vec![Complex64::new(*s0, 0.0)],
            _ => poles.distinct_poles()?.unwrap_or_default(),
        };
        let (lo, hi) = (grid.lo_exp * LN_10, grid.hi_exp * LN_10);
        match s
            .iter()
            .find(|s| s.im.abs() <= 1e-8 * (1.0 + s.norm()) && (lo..=hi).contains(&s.re))
        {
            Some(bad) => Err(FitError::Invalid(format!(
                "singularity parameter {bad} puts a pole at z = {:.3e}, inside the fitting interval",
                bad.re.exp()
            ))),
            None => Ok(()),
        }
    }

    pub fn spec(&self, use_arnoldi: bool) -> FitSpec {
        match self {
            IntervalMethod::Log { poles } => FitSpec {
                terms: vec![TermSpec::Log(BranchTerm::new(origin(), 0.0, poles.clone()))],
                poly_degree: if poles.is_confluent() { None } else { Some(0) },
                use_arnoldi,
                ..Default::default()
            },
            IntervalMethod::Lightning { n } => FitSpec {
                terms: vec![TermSpec::Lightning {
                    corner: origin(),
                    direction: Complex64::new(-1.0, 0.0),
                    n: *n,
                }],
                poly_degree: Some(0),
                use_arnoldi,
                ..Default::default()
            },
        }
    }
}

/// An interval fit together with its validation error.
#[derive(Debug, Clone)]
pub struct IntervalFit {
    pub fit: FitResult,
    pub validation_error: f64,
    pub argmax: Complex64,
    pub runtime_ms: f64,
}

fn validate_interval(
    fit: FitResult,
    target: impl Fn(Complex64) -> Complex64 + Copy,
    grid: &IntervalGrid,
    started: Instant,
) -> Result<IntervalFit, FitError> {
    let (validation_error, argmax) = max_error(&fit.approx, target, &grid.validation()?)?;
    Ok(IntervalFit {
        fit,
        validation_error,
        argmax,
        runtime_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Least-squares fit of `target` on an interval grid.
pub fn interval_fit(
    target: impl Fn(Complex64) -> Complex64 + Copy,
    method: &IntervalMethod,
    grid: &IntervalGrid,
    use_arnoldi: bool,
) -> Result<IntervalFit, FitError> {
    method.check_poles(grid)?;
    let t = Instant::now();
    let samples = SampleSet::from_fn(grid.points()?, target)?;
    let r = fit(&method.spec(use_arnoldi), &samples)?;
    validate_interval(r, target, grid, t)
}

/// Interval fit followed by `steps` Lawson reweightings.
pub fn interval_lawson(
    target: impl Fn(Complex64) -> Complex64 + Copy,
    method: &IntervalMethod,
    grid: &IntervalGrid,
    steps: usize,
) -> Result<(IntervalFit, LawsonResult), FitError> {
    method.check_poles(grid)?;
    let t = Instant::now();
    let samples = SampleSet::from_fn(grid.points()?, target)?;
    let l = lawson_refine(&method.spec(true), &samples, steps)?;
    Ok((validate_interval(l.fit.clone(), target, grid, t)?, l))
}

pub fn sqrt_target(z: Complex64) -> Complex64 {
    z.sqrt()
}

/// Sweep row for an interval fit.
pub fn interval_entry(f: &IntervalFit) -> SweepEntry {
    SweepEntry {
        dof: f.fit.approx.dof,
        max_err: f.validation_error,
        boundary_err: f.validation_error,
        runtime_ms: f.runtime_ms,
    }
}

/// Approximant families compared on the pac-man problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanarMethod {
    LogLightning,
    Lightning,
}

impl PlanarMethod {
    pub fn name(&self) -> &'static str {
        match self {
            PlanarMethod::LogLightning => "log_lightning",
            PlanarMethod::Lightning => "lightning",
        }
    }
}

/// Points per edge on the pac-man boundary.
pub const PACMAN_PER_EDGE: usize = 500;

/// Fit spec for the pac-man problem with about `total` degrees of freedom.
///
/// Log-lightning: `n₀ = 0`, `n_j = (N−1)/3` confluent at `s_j = n_j/3`.
/// Lightning: `n₀ = N/4 − 1`, `n_j = N/4`.
pub fn pacman_spec(total: usize, method: PlanarMethod) -> FitSpec {
    let d = pacman_domain();
    match method {
        PlanarMethod::LogLightning => {
            let nj = total.saturating_sub(1) / 3;
            FitSpec {
                terms: corner_terms(&d, |_| PoleConfig::Confluent {
                    n: nj,
                    s0: nj.max(1) as f64 / 3.0,
                }),
                poly_degree: Some(0),
                use_arnoldi: true,
                domain: Some(d),
                ..Default::default()
            }
        }
        PlanarMethod::Lightning => {
            let nj = (total / 4).max(1);
            FitSpec {
                terms: corner_lightning(&d, nj),
                poly_degree: Some(nj - 1),
                use_arnoldi: true,
                domain: Some(d),
                ..Default::default()
            }
        }
    }
}

/// Fits the pac-man function and measures the error on the validation
/// boundary grid.
pub fn pacman_run(total: usize, method: PlanarMethod) -> Result<(FitResult, SweepEntry), FitError> {
    pacman_domain_run(pacman_target, total, method, PACMAN_PER_EDGE)
}

/// As [`pacman_run`] with any target on the pac-man domain.
pub fn pacman_domain_run(
    target: impl Fn(Complex64) -> Complex64 + Copy,
    total: usize,
    method: PlanarMethod,
    per_edge: usize,
) -> Result<(FitResult, SweepEntry), FitError> {
    let t = Instant::now();
    let d = pacman_domain();
    let grid = boundary_grid(&d, per_edge, DEFAULT_MIN_DIST)?;
    let samples = SampleSet::from_fn(grid.points, target)?;
    let r = fit(&pacman_spec(total, method), &samples)?;
    let vgrid = validation_boundary_grid(&d, per_edge, DEFAULT_MIN_DIST)?;
    let (err, _) = max_error(&r.approx, target, &vgrid.points)?;
    let entry = SweepEntry {
        dof: r.approx.dof,
        max_err: err,
        boundary_err: err,
        runtime_ms: t.elapsed().as_secs_f64() * 1e3,
    };
    Ok((r, entry))
}
