//! Singularity parameters `s_k` for reciprocal-log terms
//! `1/(log(z) − s_k)`, plus the potential-theory and elliptic-function
//! machinery used to analyse them.

mod elliptic;
mod fejer_walsh;
mod potential;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use elliptic::{elliptic_k, jacobi_sn, jacobi_sncndn};
pub use fejer_walsh::{fejer_walsh_poles, FejerWalshPoints, WedgeMap};
pub use potential::{fejer_walsh_interp_points, phi_closed, phi_map_t, phi_product, DiskPoint, PhiDiagnostics};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoleError {
    #[error("invalid pole parameter: {0}")]
    InvalidParameter(String),
    #[error("outside domain: {0}")]
    Domain(String),
    #[error("overflow: {0}")]
    Overflow(String),
}

/// `s_k = scale·(1 + iθ_k)²`, `θ_k = −π + 2π(k − ½)/n`, `k = 1..n`.
///
/// The points lie on a parabola opening to the left in the `s`-plane,
/// symmetric under conjugation.
pub fn hankel_poles(n: usize, scale: f64) -> Vec<Complex64> {
    (1..=n)
        .map(|k| {
            let theta = -PI + 2.0 * PI * (k as f64 - 0.5) / n as f64;
            scale * Complex64::new(1.0, theta).powi(2)
        })
        .collect()
}

/// Recipe for the singularity parameters of one branch-point term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PoleConfig {
    /// `n` distinct parameters on the Hankel parabola with prefactor `scale`.
    HankelParabola { n: usize, scale: f64 },
    /// All parameters confluent at `s0`: a degree-`n` polynomial in `1/(log z − s0)`.
    Confluent { n: usize, s0: f64 },
    /// Confluent at `s0` with powers below `pin_power` removed:
    /// span `{w^J, …, w^{J+n}}`, `w = 1/(log z − s0)`.
    Pinned { n: usize, s0: f64, pin_power: u32 },
    /// Distinct parameters from the slit-wedge conformal map.
    FejerWalsh { n: usize, sigma: f64, mu: f64, rho: f64 },
    /// Caller-supplied distinct parameters.
    Explicit { poles: Vec<Complex64> },
}

impl PoleConfig {
    /// Hankel parabola with the default prefactor `n/4`.
    pub fn hankel(n: usize) -> Self {
        Self::HankelParabola {
            n,
            scale: n as f64 / 4.0,
        }
    }

    /// Confluent at the default location `s0 = n/2`.
    pub fn confluent(n: usize) -> Self {
        Self::Confluent { n, s0: n as f64 / 2.0 }
    }

    /// Pinned at `s0 = n/2`.
    pub fn pinned(n: usize, pin_power: u32) -> Self {
        Self::Pinned {
            n,
            s0: n as f64 / 2.0,
            pin_power,
        }
    }

    /// Fejér–Walsh with `σ = 0.5`, `ρ = 1`.
    pub fn fejer_walsh(n: usize, mu: f64) -> Self {
        Self::FejerWalsh {
            n,
            sigma: 0.5,
            mu,
            rho: 1.0,
        }
    }

    /// The configured singularity count `n`.
    pub fn n(&self) -> usize {
        match self {
            Self::HankelParabola { n, .. }
            | Self::Confluent { n, .. }
            | Self::Pinned { n, .. }
            | Self::FejerWalsh { n, .. } => *n,
            Self::Explicit { poles } => poles.len(),
        }
    }

    /// Whether the family is a power sequence in a single `w`.
    pub fn is_confluent(&self) -> bool {
        matches!(self, Self::Confluent { .. } | Self::Pinned { .. })
    }

    pub fn validate(&self) -> Result<(), PoleError> {
        let bad = |msg: String| Err(PoleError::InvalidParameter(msg));
        match *self {
            Self::HankelParabola { n, scale } => {
                if n == 0 {
                    return bad("Hankel parabola needs n ≥ 1".into());
                }
                if !(scale > 0.0 && scale.is_finite()) {
                    return bad(format!("Hankel scale must be positive, got {scale}"));
                }
            }
            Self::Confluent { s0, .. } => {
                if !(s0 > 0.0 && s0.is_finite()) {
                    return bad(format!("confluent location must be positive, got {s0}"));
                }
            }
            Self::Pinned { s0, pin_power, .. } => {
                if !(s0 > 0.0 && s0.is_finite()) {
                    return bad(format!("confluent location must be positive, got {s0}"));
                }
                if pin_power < 2 {
                    return bad(format!("pin power must be at least 2, got {pin_power}"));
                }
            }
            Self::FejerWalsh { n, sigma, mu, rho } => {
                if n == 0 || !(sigma > 0.0) || !(mu > 1.0) || !(rho > 0.0) {
                    return bad(format!(
                        "Fejér–Walsh needs n ≥ 1, σ > 0, μ > 1, ρ > 0; got n = {n}, σ = {sigma}, μ = {mu}, ρ = {rho}"
                    ));
                }
            }
            Self::Explicit { ref poles } => {
                if poles.is_empty() || poles.iter().any(|p| !p.is_finite()) {
                    return bad("explicit pole list must be nonempty and finite".into());
                }
            }
        }
        Ok(())
    }

    /// Distinct singularity parameters, or `None` for confluent families.
    pub fn distinct_poles(&self) -> Result<Option<Vec<Complex64>>, PoleError> {
        self.validate()?;
        Ok(match self {
            Self::HankelParabola { n, scale } => Some(hankel_poles(*n, *scale)),
            Self::FejerWalsh { n, sigma, mu, rho } => Some(fejer_walsh_poles(*n, *sigma, *mu, *rho)?.poles),
            Self::Explicit { poles } => Some(poles.clone()),
            Self::Confluent { .. } | Self::Pinned { .. } => None,
        })
    }
}
