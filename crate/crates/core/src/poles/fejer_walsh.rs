use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::elliptic::{elliptic_k_from_complement, sncndn_split};
use super::PoleError;

/// Poles and interpolation points from the wedge conformal map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FejerWalshPoints {
    pub poles: Vec<Complex64>,
    pub interp: Vec<Complex64>,
}

/// Parameters of the slit-wedge map `s(w) = σ − σ((b + y)/(1 + 2b − y))^μ`,
/// `y = sn(w | M⁻²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeMap {
    pub sigma: f64,
    pub mu: f64,
    pub b: f64,
    /// `M = 1 + 2b`.
    pub modulus_inv: f64,
    /// `K(M⁻²)`.
    pub k: f64,
    /// `K(1 − M⁻²)`.
    pub k_prime: f64,
}

impl WedgeMap {
    /// Sets up the map for segment length `σL`, `L = ρn`.
    pub fn new(n: usize, sigma: f64, mu: f64, rho: f64) -> Result<Self, PoleError> {
        if n == 0 {
            return Err(PoleError::InvalidParameter("need n ≥ 1".into()));
        }
        let l = rho * n as f64;
        let l_mu = l.powf(mu);
        let b = l_mu + (l_mu + l_mu * l_mu).sqrt();
        if !b.is_finite() {
            return Err(PoleError::Overflow(format!(
                "L^μ overflows for L = {l}, μ = {mu} (ρ = {rho}, n = {n})"
            )));
        }
        let big_m = 1.0 + 2.0 * b;
        let m = big_m.powi(-2);
        // K and K' from complementary parameters so neither rounds.
        let k = elliptic_k_from_complement(1.0 - m);
        let k_prime = elliptic_k_from_complement(m);
        Ok(Self {
            sigma,
            mu,
            b,
            modulus_inv: big_m,
            k,
            k_prime,
        })
    }

    fn parameter(&self) -> (f64, f64) {
        let m = self.modulus_inv.powi(-2);
        (m, 1.0 - m)
    }

    /// `sn(w | M⁻²)`.
    pub fn sn(&self, w: Complex64) -> Complex64 {
        let (m, m1) = self.parameter();
        sncndn_split(w, m, m1).0
    }

    /// `s(w)` with the principal branch of the μ-th power.
    pub fn eval(&self, w: Complex64) -> Complex64 {
        self.eval_y(self.sn(w))
    }

    /// `s` as a function of `y = sn(w)`.
    pub fn eval_y(&self, y: Complex64) -> Complex64 {
        let ratio = (self.b + y) / (1.0 + 2.0 * self.b - y);
        self.sigma - self.sigma * ratio.powf(self.mu)
    }
}

/// Poles `s_k = s(K + i(k−½)K'/n)` and interpolation points
/// `α_k = s(−K + i(k−½)K'/n)`, `k = 1..n`.
///
/// A generator only: whether `(σ, μ, ρ)` satisfy the wedge constraint is
/// left to the caller.
pub fn fejer_walsh_poles(n: usize, sigma: f64, mu: f64, rho: f64) -> Result<FejerWalshPoints, PoleError> {
    let map = WedgeMap::new(n, sigma, mu, rho)?;
    let heights = (1..=n).map(|k| (k as f64 - 0.5) * map.k_prime / n as f64);
    let mut poles = Vec::with_capacity(n);
    let mut interp = Vec::with_capacity(n);
    for v in heights {
        poles.push(map.eval(Complex64::new(map.k, v)));
        interp.push(map.eval(Complex64::new(-map.k, v)));
    }
    if poles.iter().chain(&interp).any(|p| !p.is_finite()) {
        return Err(PoleError::Overflow(format!(
            "non-finite Fejér–Walsh point for n = {n}, σ = {sigma}, μ = {mu}, ρ = {rho}"
        )));
    }
    Ok(FejerWalshPoints { poles, interp })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poles::elliptic::sncndn_real;

    #[test]
    fn substitution_values() {
        let map = WedgeMap::new(4, 0.1, 2.0, 1.0).unwrap();
        let b = map.b;
        let s0 = map.eval(Complex64::new(0.0, 0.0));
        let expect0 = 0.1 - 0.1 * (b / (1.0 + 2.0 * b)).powf(2.0);
        assert!((s0 - expect0).norm() < 1e-12);
        assert!(s0.im == 0.0 && s0.re < 0.1);
        let sk = map.eval(Complex64::new(map.k, 0.0));
        let expect_k = 0.1 - 0.1 * ((b + 1.0) / (2.0 * b)).powf(2.0);
        assert!((sk - expect_k).norm() < 1e-12);
    }

    #[test]
    fn map_constants() {
        // L = 4, μ = 2: L^μ = 16, b = 16 + √272.
        let map = WedgeMap::new(4, 0.1, 2.0, 1.0).unwrap();
        assert!((map.b - (16.0 + 272f64.sqrt())).abs() < 1e-12);
        assert!((map.modulus_inv - (1.0 + 2.0 * map.b)).abs() < 1e-12);
        // Small-parameter series K(m) ≈ π/2·(1 + m/4 + 9m²/64) and
        // K(1−m) ≈ ln(4/√m) = ln(4M).
        let m = map.modulus_inv.powi(-2);
        let series = std::f64::consts::FRAC_PI_2 * (1.0 + m / 4.0 + 9.0 * m * m / 64.0);
        assert!((map.k - series).abs() < 1e-10);
        assert!((map.k_prime - (4.0 * map.modulus_inv).ln()).abs() < 1e-3);
    }

    #[test]
    fn points_on_the_right_edge_use_reciprocal_dn() {
        // sn(K + iv | m) = 1/dn(v | 1−m): an oracle through real functions only.
        let (n, sigma, mu, rho) = (4, 0.1, 2.0, 1.0);
        let map = WedgeMap::new(n, sigma, mu, rho).unwrap();
        let fw = fejer_walsh_poles(n, sigma, mu, rho).unwrap();
        let m = map.modulus_inv.powi(-2);
        for (k, p) in fw.poles.iter().enumerate() {
            let v = (k as f64 + 0.5) * map.k_prime / n as f64;
            let (_, _, dn) = sncndn_real(v, 1.0 - m, m);
            let expect = map.eval_y(Complex64::new(1.0 / dn, 0.0));
            assert!((p - expect).norm() < 1e-10 * expect.norm().max(1.0), "{p} vs {expect}");
        }
        for a in &fw.interp {
            assert!(a.re <= sigma + 1e-14);
            assert!(a.is_finite());
        }
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(fejer_walsh_poles(1000, 0.5, 200.0, 1.0), Err(PoleError::Overflow(_))));
        assert!(fejer_walsh_poles(0, 0.5, 2.0, 1.0).is_err());
    }
}
