use std::f64::consts::PI;

use num_complex::Complex64;

use super::geometry::{Edge, PlanarDomain};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Unit disk with the wedge `|arg z| < π/3` removed: segment `0 → ω`,
/// major arc `ω → −1 → ω̄`, segment `ω̄ → 0`, with `ω = e^{iπ/3}`.
pub fn pacman_domain() -> PlanarDomain {
    let omega = Complex64::from_polar(1.0, PI / 3.0);
    let edges = vec![
        Edge::Segment { a: c(0.0, 0.0), b: omega },
        Edge::Arc {
            center: c(0.0, 0.0),
            radius: 1.0,
            start: PI / 3.0,
            sweep: 4.0 * PI / 3.0,
        },
        Edge::Segment { a: omega.conj(), b: c(0.0, 0.0) },
    ];
    PlanarDomain::from_edges("pacman", edges).expect("pac-man boundary is a valid loop")
}

/// `f(z) = z·log(−z/2)·(1 − z/ω)^{1/2}·(1 − z/ω̄)^{3/2}`, principal branches,
/// with `f(0) = 0`.
pub fn pacman_target(z: Complex64) -> Complex64 {
    if z == c(0.0, 0.0) {
        return z;
    }
    let omega = Complex64::from_polar(1.0, PI / 3.0);
    let one = c(1.0, 0.0);
    z * (-z / 2.0).ln() * (one - z / omega).sqrt() * (one - z / omega.conj()).powf(1.5)
}

/// L-shaped hexagon with vertices `0, 2, 2+i, 1+i, 1+2i, 2i`.
pub fn lshape_domain() -> PlanarDomain {
    PlanarDomain::polygon(
        "lshape",
        &[c(0.0, 0.0), c(2.0, 0.0), c(2.0, 1.0), c(1.0, 1.0), c(1.0, 2.0), c(0.0, 2.0)],
    )
    .expect("L-shape is a valid polygon")
}

/// `u = Re(z²) = x² − y²`.
pub fn lshape_boundary_data(z: Complex64) -> f64 {
    (z * z).re
}

pub fn unit_square_domain() -> PlanarDomain {
    PlanarDomain::polygon("square", &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)])
        .expect("unit square is a valid polygon")
}

/// `u = Re(z³)`.
pub fn square_z3_data(z: Complex64) -> f64 {
    (z * z * z).re
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemDomain {
    /// `[10^lo_exp, 10^hi_exp]` with the branch point at 0.
    Interval { lo_exp: f64, hi_exp: f64 },
    Planar(PlanarDomain),
}

/// A named approximation or Dirichlet problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub name: &'static str,
    pub domain: ProblemDomain,
    /// Function to approximate, or (real part) the Dirichlet data.
    pub target: fn(Complex64) -> Complex64,
    /// The problem is a Dirichlet problem with real boundary data.
    pub dirichlet: bool,
}

fn sqrt_target(z: Complex64) -> Complex64 {
    z.sqrt()
}

fn lshape_target(z: Complex64) -> Complex64 {
    lshape_boundary_data(z).into()
}

fn square_target(z: Complex64) -> Complex64 {
    square_z3_data(z).into()
}

impl Problem {
    pub const NAMES: [&'static str; 4] = ["sqrt", "pacman", "lshape", "square-z3"];

    pub fn by_name(name: &str) -> Option<Self> {
        Some(match name {
            "sqrt" => Self {
                name: "sqrt",
                domain: ProblemDomain::Interval { lo_exp: -24.0, hi_exp: 0.0 },
                target: sqrt_target,
                dirichlet: false,
            },
            "pacman" => Self {
                name: "pacman",
                domain: ProblemDomain::Planar(pacman_domain()),
                target: pacman_target,
                dirichlet: false,
            },
            "lshape" => Self {
                name: "lshape",
                domain: ProblemDomain::Planar(lshape_domain()),
                target: lshape_target,
                dirichlet: true,
            },
            "square-z3" => Self {
                name: "square-z3",
                domain: ProblemDomain::Planar(unit_square_domain()),
                target: square_target,
                dirichlet: true,
            },
            _ => return None,
        })
    }

    pub fn planar(&self) -> Option<&PlanarDomain> {
        match &self.domain {
            ProblemDomain::Planar(d) => Some(d),
            ProblemDomain::Interval { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pacman_corners() {
        let p = pacman_domain();
        let omega = Complex64::from_polar(1.0, PI / 3.0);
        let v = p.vertices();
        assert!((v[0] - c(0.0, 0.0)).norm() < 1e-15);
        assert!((v[1] - omega).norm() < 1e-15);
        assert!((v[2] - omega.conj()).norm() < 1e-15);
        assert!((p.corners[0].interior_angle - 4.0 * PI / 3.0).abs() < 1e-12);
        assert!((p.corners[1].interior_angle - PI / 2.0).abs() < 1e-12);
        assert!((p.corners[2].interior_angle - PI / 2.0).abs() < 1e-12);
        assert!((p.corners[0].exterior_bisector - c(1.0, 0.0)).norm() < 1e-12);
        assert!((p.corners[1].exterior_bisector - Complex64::from_polar(1.0, PI / 12.0)).norm() < 1e-12);
        assert!((p.corners[2].exterior_bisector - Complex64::from_polar(1.0, -PI / 12.0)).norm() < 1e-12);
    }

    #[test]
    fn pacman_membership() {
        let p = pacman_domain();
        assert!(p.distance_to_boundary(c(-1.0, 0.0)) < 1e-15);
        assert!(p.contains(c(-0.5, 0.0)));
        assert!(p.contains(Complex64::from_polar(0.9, 2.0)));
        assert!(p.contains(Complex64::from_polar(0.9, PI)));
        // Inside the removed wedge.
        assert!(!p.contains(c(0.5, 0.0)));
        assert!(!p.contains(Complex64::from_polar(0.9, 0.1)));
        assert!(!p.contains(Complex64::from_polar(0.9, PI / 6.0)));
        assert!(!p.contains(c(1.2, 0.0)));
        // Discrete winding number about interior points.
        for z in [c(-0.5, 0.1), Complex64::from_polar(0.5, 1.5), Complex64::from_polar(0.99, -2.0)] {
            assert!((p.winding_number(z) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn pacman_target_values() {
        let omega = Complex64::from_polar(1.0, PI / 3.0);
        assert_eq!(pacman_target(c(0.0, 0.0)), c(0.0, 0.0));
        assert!(pacman_target(omega).norm() < 1e-15);
        assert!(pacman_target(omega.conj()).norm() < 1e-15);
        // Independent coding at z = −1: (−1)·ln(1/2)·√(1 + ω̄)·(1 + ω)^{3/2}
        // with 1 + ω = √3·e^{iπ/6} and 1 + ω̄ = √3·e^{−iπ/6}.
        let s3 = 3f64.sqrt();
        let a = Complex64::from_polar(s3.sqrt(), -PI / 12.0);
        let b = Complex64::from_polar(s3.powf(1.5), PI / 4.0);
        let expect = -(0.5f64.ln()) * a * b;
        assert!((pacman_target(c(-1.0, 0.0)) - expect).norm() < 1e-14);
    }

    #[test]
    fn pacman_target_vanishes_at_origin() {
        let eps: f64 = 1e-8;
        for k in 0..20 {
            let phi = PI / 3.0 + 1e-3 + (4.0 * PI / 3.0 - 2e-3) * k as f64 / 19.0;
            let v = pacman_target(Complex64::from_polar(eps, phi));
            assert!(v.norm() <= 10.0 * eps * eps.ln().abs());
        }
    }

    #[test]
    fn lshape_geometry_and_data() {
        let l = lshape_domain();
        assert_eq!(lshape_boundary_data(c(2.0, 0.0)), 4.0);
        assert_eq!(lshape_boundary_data(c(1.0, 2.0)), -3.0);
        let reentrant: Vec<_> = l.corners.iter().filter(|k| k.interior_angle > PI).collect();
        assert_eq!(reentrant.len(), 1);
        assert_eq!(reentrant[0].vertex, c(1.0, 1.0));
        assert!((reentrant[0].interior_angle - 1.5 * PI).abs() < 1e-14);
        assert!(l.contains(c(0.5, 0.5)));
        assert!(!l.contains(c(1.5, 1.5)));
    }

    #[test]
    fn named_problems() {
        for n in Problem::NAMES {
            assert_eq!(Problem::by_name(n).unwrap().name, n);
        }
        assert!(Problem::by_name("nope").is_none());
        assert!(Problem::by_name("lshape").unwrap().dirichlet);
    }
}
