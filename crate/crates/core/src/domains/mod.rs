//! Approximation domains, exponentially clustered sample grids, and the
//! built-in test problems.

mod geometry;
mod problems;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use geometry::{Corner, Edge, PlanarDomain};
pub use problems::{
    lshape_boundary_data, lshape_domain, pacman_domain, pacman_target, square_z3_data, unit_square_domain,
    Problem, ProblemDomain,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("edge {0} has zero length")]
    DegenerateEdge(usize),
    #[error("invalid domain: {0}")]
    Invalid(String),
}

/// Default clustering depth for boundary grids.
pub const DEFAULT_MIN_DIST: f64 = 1e-14;
/// Clustering depth for probing a fit closer to the corners than it was
/// trained; not part of the standard validation grid.
pub const DEEP_MIN_DIST: f64 = 1e-16;
/// Validation grids are this many times denser than fitting grids.
pub const VALIDATION_DENSITY: usize = 4;

/// Sample points clustered toward singular anchor points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteredGrid {
    pub points: Vec<Complex64>,
    pub anchors: Vec<Complex64>,
    /// Distance from each point to its nearest anchor.
    pub distances: Vec<f64>,
    pub min_dist: f64,
}

impl ClusteredGrid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// CSV with header `re_z,im_z,dist`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["re_z", "im_z", "dist"])?;
        for (z, d) in self.points.iter().zip(&self.distances) {
            w.serialize((z.re, z.im, d))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `M` points `10^{lo + j(hi−lo)/(M−1)}`, clustered toward the origin.
pub fn logspace_grid(lo_exp: f64, hi_exp: f64, m: usize) -> Result<ClusteredGrid, DomainError> {
    if !(lo_exp < hi_exp) || !lo_exp.is_finite() || !hi_exp.is_finite() {
        return Err(DomainError::InvalidGrid(format!(
            "need lo < hi, got lo = {lo_exp}, hi = {hi_exp}"
        )));
    }
    if m < 2 {
        return Err(DomainError::InvalidGrid(format!("need at least 2 points, got {m}")));
    }
    let step = (hi_exp - lo_exp) / (m - 1) as f64;
    let points: Vec<Complex64> = (0..m)
        .map(|j| {
            let e = if j == m - 1 { hi_exp } else { lo_exp + j as f64 * step };
            Complex64::new(10f64.powf(e), 0.0)
        })
        .collect();
    let distances = points.iter().map(|z| z.re).collect();
    Ok(ClusteredGrid {
        points,
        anchors: vec![Complex64::new(0.0, 0.0)],
        distances,
        min_dist: 10f64.powf(lo_exp),
    })
}

/// Boundary samples clustered exponentially toward both ends of every edge.
///
/// Each edge of length `L` gets `per_edge/2` points per end at log-uniform
/// distances `min_dist·L·(1/(2·min_dist))^{j/h}`, `j = 0..h−1`, `h = per_edge/2`
/// (plus the midpoint when `per_edge` is odd). Points that round onto a
/// corner are dropped.
pub fn boundary_grid(domain: &PlanarDomain, per_edge: usize, min_dist: f64) -> Result<ClusteredGrid, DomainError> {
    if per_edge < 4 {
        return Err(DomainError::InvalidGrid(format!("need at least 4 points per edge, got {per_edge}")));
    }
    if !(min_dist > 0.0 && min_dist < 0.5) {
        return Err(DomainError::InvalidGrid(format!("min_dist must lie in (0, 0.5), got {min_dist}")));
    }
    let half = per_edge / 2;
    let ratio = 0.5 / min_dist;
    let fractions: Vec<f64> = (0..half).map(|j| min_dist * ratio.powf(j as f64 / half as f64)).collect();
    let vertices = domain.vertices();
    let mut points = Vec::with_capacity(per_edge * domain.edges.len());
    for (j, e) in domain.edges.iter().enumerate() {
        let len = e.length();
        if !(len > 0.0) {
            return Err(DomainError::DegenerateEdge(j));
        }
        points.extend(fractions.iter().map(|f| e.point_at(f * len)));
        if per_edge % 2 == 1 {
            points.push(e.point_at(0.5 * len));
        }
        points.extend(fractions.iter().rev().map(|f| e.point_from_end(f * len)));
    }
    points.retain(|z| !vertices.contains(z));
    let distances = points.iter().map(|&z| domain.nearest_corner_distance(z)).collect();
    Ok(ClusteredGrid {
        points,
        anchors: vertices,
        distances,
        min_dist,
    })
}

/// Boundary grid at validation density over the training depth `min_dist`.
pub fn validation_boundary_grid(
    domain: &PlanarDomain,
    per_edge: usize,
    min_dist: f64,
) -> Result<ClusteredGrid, DomainError> {
    boundary_grid(domain, VALIDATION_DENSITY * per_edge, min_dist)
}
