//! Complete elliptic integral `K(m)` and the Jacobi functions `sn`, `cn`,
//! `dn`, all computed from the arithmetic–geometric mean (descending
//! Landen sequence). Parameter convention: `m = k²`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::PoleError;

const AGM_TOL: f64 = 1e-16;
const AGM_MAX_ITER: usize = 64;

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind, `K(m) = π / (2·AGM(1, √(1−m)))`.
pub fn elliptic_k(m: f64) -> Result<f64, PoleError> {
    if !(0.0..1.0).contains(&m) {
        return Err(PoleError::Domain(format!("elliptic parameter m = {m} outside [0, 1)")));
    }
    Ok(elliptic_k_from_complement(1.0 - m))
}

/// `K(1 − m1)` evaluated from the complementary parameter directly, which
/// keeps full accuracy when `1 − m1` rounds to one.
pub(crate) fn elliptic_k_from_complement(m1: f64) -> f64 {
    FRAC_PI_2 / agm(1.0, m1.sqrt())
}

/// `(sn, cn, dn)` of a real argument for parameter `m`, with complementary
/// parameter `m1 = 1 − m` supplied separately.
pub(crate) fn sncndn_real(u: f64, m: f64, m1: f64) -> (f64, f64, f64) {
    if m < 1e-300 {
        return (u.sin(), u.cos(), 1.0);
    }
    if m1 < 1e-300 {
        let sech = 1.0 / u.cosh();
        return (u.tanh(), sech, sech);
    }
    // Descending Landen: a_n, c_n from the AGM of (1, √m1).
    let mut a = vec![1.0];
    let mut c = vec![m.sqrt()];
    let mut b = m1.sqrt();
    for _ in 0..AGM_MAX_ITER {
        let an = *a.last().unwrap();
        if c.last().unwrap().abs() <= AGM_TOL * an {
            break;
        }
        let next = 0.5 * (an + b);
        c.push(0.5 * (an - b));
        b = (an * b).sqrt();
        a.push(next);
    }
    let levels = a.len() - 1;
    let mut phi = 2f64.powi(levels as i32) * a[levels] * u;
    let mut phi_prev = phi;
    for n in (1..=levels).rev() {
        phi_prev = phi;
        phi = 0.5 * (phi + (c[n] / a[n] * phi.sin()).asin());
    }
    let sn = phi.sin();
    let cn = phi.cos();
    let denom = (phi_prev - phi).cos();
    let dn = if levels > 0 && cn.abs() > 1e-3 && denom != 0.0 {
        cn / denom
    } else {
        (1.0 - m * sn * sn).max(0.0).sqrt()
    };
    (sn, cn, dn)
}

/// Jacobi elliptic sine `sn(u | m)` for complex `u`.
pub fn jacobi_sn(u: Complex64, m: f64) -> Result<Complex64, PoleError> {
    jacobi_sncndn(u, m).map(|(sn, _, _)| sn)
}

/// `(sn, cn, dn)` for complex argument, via the real functions at `m`
/// and `1 − m` and the addition theorem for `x + iy`.
pub fn jacobi_sncndn(u: Complex64, m: f64) -> Result<(Complex64, Complex64, Complex64), PoleError> {
    if !(0.0..1.0).contains(&m) {
        return Err(PoleError::Domain(format!("elliptic parameter m = {m} outside [0, 1)")));
    }
    Ok(sncndn_split(u, m, 1.0 - m))
}

pub(crate) fn sncndn_split(u: Complex64, m: f64, m1: f64) -> (Complex64, Complex64, Complex64) {
    let (s, c, d) = sncndn_real(u.re, m, m1);
    if u.im == 0.0 {
        return (s.into(), c.into(), d.into());
    }
    let (s1, c1, d1) = sncndn_real(u.im, m1, m);
    let delta = c1 * c1 + m * s * s * s1 * s1;
    let sn = Complex64::new(s * d1, c * d * s1 * c1) / delta;
    let cn = Complex64::new(c * c1, -s * d * s1 * d1) / delta;
    let dn = Complex64::new(d * c1 * d1, -m * s * c * s1) / delta;
    (sn, cn, dn)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Incomplete integral F(φ|m) by composite Gauss–Legendre, as an
    /// oracle independent of the AGM.
    fn incomplete_f(phi: f64, m: f64) -> f64 {
        let nodes = [
            (-0.906_179_845_938_664, 0.236_926_885_056_189),
            (-0.538_469_310_105_683, 0.478_628_670_499_366),
            (0.0, 0.568_888_888_888_889),
            (0.538_469_310_105_683, 0.478_628_670_499_366),
            (0.906_179_845_938_664, 0.236_926_885_056_189),
        ];
        let panels = 2000;
        let h = phi / panels as f64;
        let mut s = 0.0;
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for (x, w) in nodes {
                let t = mid + 0.5 * h * x;
                s += 0.5 * h * w / (1.0 - m * t.sin().powi(2)).sqrt();
            }
        }
        s
    }

    #[test]
    fn k_special_values() {
        assert!((elliptic_k(0.0).unwrap() - FRAC_PI_2).abs() < 1e-14);
        assert!((elliptic_k(0.5).unwrap() - 1.854_074_677_301_372).abs() < 1e-14);
        let k99 = elliptic_k(0.99).unwrap();
        assert!(k99.is_finite() && k99 > elliptic_k(0.5).unwrap());
        assert!(elliptic_k(1.0).is_err());
        assert!(elliptic_k(-0.1).is_err());
    }

    #[test]
    fn k_matches_quadrature() {
        for m in [0.1, 0.5, 0.9] {
            let q = incomplete_f(FRAC_PI_2, m);
            assert!((elliptic_k(m).unwrap() - q).abs() < 1e-12, "m={m}");
        }
    }

    #[test]
    fn sn_special_values() {
        for m in [0.0, 0.2, 0.5, 0.9, 0.999] {
            assert_eq!(jacobi_sn(Complex64::new(0.0, 0.0), m).unwrap(), Complex64::new(0.0, 0.0));
            let k = elliptic_k(m).unwrap();
            let v = jacobi_sn(Complex64::new(k, 0.0), m).unwrap();
            assert!((v - 1.0).norm() < 1e-12, "m={m}: {v}");
        }
        for u in [0.3, 1.0, 2.5, -4.0] {
            let v = jacobi_sn(Complex64::new(u, 0.0), 0.0).unwrap();
            assert!((v.re - u.sin()).abs() < 1e-12);
        }
        let z = Complex64::new(0.4, 0.7);
        assert!((jacobi_sn(z, 0.0).unwrap() - z.sin()).norm() < 1e-12);
    }

    #[test]
    fn sn_inverts_incomplete_integral() {
        for m in [0.3, 0.8] {
            for phi in [0.2, 0.9, 1.4] {
                let u = incomplete_f(phi, m);
                let v = jacobi_sn(Complex64::new(u, 0.0), m).unwrap();
                assert!((v.re - phi.sin()).abs() < 1e-12);
            }
        }
    }

    /// Integrates d(sn,cn,dn)/du along the straight path 0 → u with RK4.
    fn sncndn_by_ode(u: Complex64, m: f64) -> (Complex64, Complex64, Complex64) {
        let steps = 20_000;
        let h = u / steps as f64;
        let f = |y: [Complex64; 3]| [y[1] * y[2], -y[0] * y[2], -m * y[0] * y[1]];
        let mut y = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        for _ in 0..steps {
            let add = |a: [Complex64; 3], b: [Complex64; 3], s: Complex64| [a[0] + b[0] * s, a[1] + b[1] * s, a[2] + b[2] * s];
            let k1 = f(y);
            let k2 = f(add(y, k1, h / 2.0));
            let k3 = f(add(y, k2, h / 2.0));
            let k4 = f(add(y, k3, h));
            for i in 0..3 {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        (y[0], y[1], y[2])
    }

    #[test]
    fn complex_argument_matches_ode_oracle() {
        for (u, m) in [
            (Complex64::new(0.7, 0.4), 0.3),
            (Complex64::new(1.1, 0.9), 0.6),
            (Complex64::new(-0.5, 1.2), 0.1),
        ] {
            let (s, c, d) = jacobi_sncndn(u, m).unwrap();
            let (so, co, dno) = sncndn_by_ode(u, m);
            assert!((s - so).norm() < 1e-10, "sn {u} {m}: {s} vs {so}");
            assert!((c - co).norm() < 1e-10);
            assert!((d - dno).norm() < 1e-10);
        }
    }

    #[test]
    fn pythagorean_identities_complex() {
        for (u, m) in [(Complex64::new(0.3, 1.5), 0.7), (Complex64::new(2.0, -0.6), 0.25)] {
            let (s, c, d) = jacobi_sncndn(u, m).unwrap();
            assert!((s * s + c * c - 1.0).norm() < 1e-12);
            assert!((d * d + m * s * s - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn real_sn_bounded() {
        for m in [0.0, 0.5, 0.99] {
            for i in 0..200 {
                let u = -10.0 + 0.1 * i as f64;
                assert!(jacobi_sn(Complex64::new(u, 0.0), m).unwrap().norm() <= 1.0 + 1e-15);
            }
        }
        // period 4K
        let m = 0.5;
        let k = elliptic_k(m).unwrap();
        let a = jacobi_sn(Complex64::new(0.3, 0.0), m).unwrap();
        let b = jacobi_sn(Complex64::new(0.3 + 4.0 * k, 0.0), m).unwrap();
        assert!((a - b).norm() < 1e-12);
    }
}
