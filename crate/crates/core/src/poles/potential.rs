//! Potential-theory diagnostics for a single branch point: the
//! Fejér–Walsh interpolation points on the slit `(−∞, 0]`, the node
//! polynomial ratio `φ`, and the disk map that puts `φ` in closed form.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::PoleError;

/// Interpolation points `α_j = −nσ·cot²(πj / (2(n+1)))`, `j = 1..n`.
///
/// These are the images of `t_j = e^{iπj/(n+1)}` under
/// `s = nσ·((1+t)/(1−t))²`; since `(1+t)/(1−t) = i·cot(θ/2)` on the
/// unit circle, every point is real and nonpositive.
pub fn fejer_walsh_interp_points(n: usize, sigma: f64) -> Vec<f64> {
    let scale = n as f64 * sigma;
    (1..=n)
        .map(|j| {
            let half = PI * j as f64 / (2.0 * (n + 1) as f64);
            let cot = half.cos() / half.sin();
            -scale * cot * cot
        })
        .collect()
}

/// `φ(s) = ∏ (s − α_j)/(s − s_j)`.
pub fn phi_product(s: Complex64, alphas: &[f64], poles: &[Complex64]) -> Result<Complex64, PoleError> {
    if alphas.len() != poles.len() {
        return Err(PoleError::InvalidParameter(format!(
            "{} interpolation points but {} poles",
            alphas.len(),
            poles.len()
        )));
    }
    let mut acc = Complex64::new(1.0, 0.0);
    for (&a, &p) in alphas.iter().zip(poles) {
        if s == p {
            return Err(PoleError::Domain(format!("φ evaluated at its pole {p}")));
        }
        acc *= (s - a) / (s - p);
    }
    Ok(acc)
}

/// `(t^{−n} + t^{−n+2} + … + t^{n}) / (n+1)`, the removable-singularity-free
/// form of `(t^{−n−1} − t^{n+1}) / ((n+1)(t^{−1} − t))`.
pub fn phi_closed(t: Complex64, n: usize) -> Complex64 {
    let t2 = t * t;
    let mut term = t.powi(-(n as i32));
    let mut sum = Complex64::new(0.0, 0.0);
    for _ in 0..=n {
        sum += term;
        term *= t2;
    }
    sum / (n + 1) as f64
}

/// A preimage `t` of `s` under `s = nσ((1+t)/(1−t))²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    /// The root with `|t| ≤ 1`.
    pub t: Complex64,
    /// `s` lies on the slit `(−∞, 0]`, so both roots sit on the unit circle.
    pub on_slit: bool,
}

/// Inverts `s = nσ((1+t)/(1−t))²`, choosing the root in the closed unit disk.
/// Infinite `s` maps to `t = 1`.
pub fn phi_map_t(s: Complex64, n: usize, sigma: f64) -> DiskPoint {
    if !s.is_finite() {
        return DiskPoint {
            t: Complex64::new(1.0, 0.0),
            on_slit: false,
        };
    }
    let scale = n as f64 * sigma;
    // Principal root has Re r ≥ 0, hence |r − 1| ≤ |r + 1| and |t| ≤ 1.
    let r = (s / scale).sqrt();
    let t = (r - 1.0) / (r + 1.0);
    DiskPoint {
        t,
        on_slit: s.im == 0.0 && s.re <= 0.0,
    }
}

/// Interpolation-point data for the confluent pole `s = nσ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiDiagnostics {
    pub n: usize,
    pub sigma: f64,
    pub interp_points: Vec<f64>,
    pub pole_location: f64,
}

impl PhiDiagnostics {
    pub fn new(n: usize, sigma: f64) -> Result<Self, PoleError> {
        if n == 0 || !(sigma > 0.0) {
            return Err(PoleError::InvalidParameter(format!(
                "need n ≥ 1 and σ > 0, got n = {n}, σ = {sigma}"
            )));
        }
        Ok(Self {
            n,
            sigma,
            interp_points: fejer_walsh_interp_points(n, sigma),
            pole_location: n as f64 * sigma,
        })
    }

    /// `φ(s)` from the product definition with all poles at `nσ`.
    pub fn phi(&self, s: Complex64) -> Result<Complex64, PoleError> {
        let poles = vec![Complex64::new(self.pole_location, 0.0); self.n];
        phi_product(s, &self.interp_points, &poles)
    }

    /// `φ(s)` from the closed form on the disk.
    pub fn phi_closed_at(&self, s: Complex64) -> Complex64 {
        phi_closed(phi_map_t(s, self.n, self.sigma).t, self.n)
    }

    /// Max over `s` of `|φ_product(s) − φ_closed(s)| / |φ_closed(s)|`.
    pub fn identity_residual(&self, s: &[Complex64]) -> Result<f64, PoleError> {
        s.iter().try_fold(0.0f64, |acc, &x| {
            let closed = self.phi_closed_at(x);
            Ok(acc.max((self.phi(x)? - closed).norm() / closed.norm()))
        })
    }

    /// Max `|φ|` over `m` log-spaced points `−10^k`, `k ∈ [−8, 8]`, and
    /// `s = 0`, all on the slit `(−∞, 0]`.
    pub fn slit_max(&self, m: usize) -> f64 {
        let m = m.max(2);
        (0..m)
            .map(|j| -(10f64.powf(-8.0 + 16.0 * j as f64 / (m - 1) as f64)))
            .chain(std::iter::once(0.0))
            .map(|x| self.phi_closed_at(Complex64::new(x, 0.0)).norm())
            .fold(0.0, f64::max)
    }

    /// Distances `exp(α_j)` of the interpolation points from the branch
    /// point in the `z = e^s` plane, in increasing order of `j`.
    pub fn z_distances(&self) -> Vec<f64> {
        self.interp_points.iter().map(|a| a.exp()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_point() {
        let a = fejer_walsh_interp_points(1, 1.0);
        assert!((a[0] + 1.0).abs() < 1e-15);
        // Direct evaluation of the Möbius form with t = i.
        let t = c(0.0, 1.0);
        let direct = ((c(1.0, 0.0) + t) / (c(1.0, 0.0) - t)).powi(2);
        assert!((direct - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn points_are_the_unit_circle_images() {
        for n in [1, 5, 12] {
            for sigma in [0.25, 1.0] {
                let a = fejer_walsh_interp_points(n, sigma);
                for (j, &aj) in a.iter().enumerate() {
                    let t = Complex64::from_polar(1.0, PI * (j + 1) as f64 / (n + 1) as f64);
                    let s = n as f64 * sigma * ((1.0 + t) / (1.0 - t)).powi(2);
                    assert!(s.im.abs() < 1e-13 * s.norm().max(1.0));
                    assert!((s.re - aj).abs() < 1e-12 * aj.abs().max(1.0));
                    assert!(aj <= 0.0);
                }
                for w in a.windows(2) {
                    assert!(w[1].abs() < w[0].abs());
                }
            }
        }
    }

    #[test]
    fn product_edge_cases() {
        assert_eq!(phi_product(c(3.0, 1.0), &[], &[]).unwrap(), c(1.0, 0.0));
        assert_eq!(phi_product(c(-1.0, 0.0), &[-1.0], &[c(2.0, 0.0)]).unwrap(), c(0.0, 0.0));
        let s = c(0.0, 2.0);
        let v = phi_product(s, &[-1.0, -2.0], &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let expect = (c(1.0, 2.0) * c(2.0, 2.0)) / (c(-1.0, 2.0) * c(-1.0, 2.0));
        assert!((v - expect).norm() < 1e-15);
        assert!(phi_product(c(1.0, 0.0), &[0.0], &[c(1.0, 0.0)]).is_err());
        assert!(phi_product(c(1.0, 0.0), &[0.0], &[]).is_err());
    }

    #[test]
    fn closed_form_values() {
        for n in 0..6 {
            assert!((phi_closed(c(1.0, 0.0), n) - 1.0).norm() < 1e-15);
            let expect = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((phi_closed(c(-1.0, 0.0), n) - expect).norm() < 1e-15);
        }
        assert!((phi_closed(c(0.5, 0.0), 2) - 1.75).norm() < 1e-15);
        // Ratio form agrees away from t = ±1.
        let t = c(0.3, 0.4);
        let n = 5;
        let ratio = (t.powi(-(n as i32) - 1) - t.powi(n as i32 + 1)) / ((n + 1) as f64 * (t.inv() - t));
        assert!((phi_closed(t, n) - ratio).norm() < 1e-12 * ratio.norm());
    }

    #[test]
    fn disk_map() {
        let (n, sigma) = (6, 0.5);
        assert!(phi_map_t(c(3.0, 0.0), n, sigma).t.norm() < 1e-15);
        let far = phi_map_t(c(1e12, 1e11), n, sigma).t;
        assert!((far - 1.0).norm() < 1e-5);
        assert_eq!(phi_map_t(c(f64::INFINITY, 0.0), n, sigma).t, c(1.0, 0.0));
        for a in fejer_walsh_interp_points(n, sigma) {
            let p = phi_map_t(c(a, 0.0), n, sigma);
            assert!(p.on_slit);
            assert!((p.t.norm() - 1.0).abs() < 1e-12);
        }
        let p = phi_map_t(c(-2.0, 0.5), n, sigma);
        assert!(!p.on_slit && p.t.norm() < 1.0);
    }

    #[test]
    fn diagnostics_distance_table() {
        let d = PhiDiagnostics::new(8, 0.5).unwrap();
        assert_eq!(d.pole_location, 4.0);
        let dist = d.z_distances();
        assert!(dist[0] < 1e-55 && dist[0] > 1e-57);
        assert!(PhiDiagnostics::new(0, 1.0).is_err());
        assert!(d.slit_max(1000) <= 1.0 + 1e-12);
        assert!(d.identity_residual(&[c(1.0, 1.0), c(-3.0, 0.1)]).unwrap() < 1e-12);
        assert!(PhiDiagnostics::new(3, 0.0).is_err());
    }
}
