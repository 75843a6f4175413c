use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::DomainError;

/// Boundary piece of a planar domain, traversed with the domain on the left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Edge {
    Segment {
        a: Complex64,
        b: Complex64,
    },
    /// Circular arc `center + radius·e^{iφ}`, `φ` from `start` to `start + sweep`.
    Arc {
        center: Complex64,
        radius: f64,
        start: f64,
        sweep: f64,
    },
}

impl Edge {
    pub fn start(&self) -> Complex64 {
        self.point_at(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point_at(self.length())
    }

    pub fn length(&self) -> f64 {
        match *self {
            Edge::Segment { a, b } => (b - a).norm(),
            Edge::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// Point at arc length `s` from the start.
    pub fn point_at(&self, s: f64) -> Complex64 {
        match *self {
            Edge::Segment { a, b } => {
                let len = (b - a).norm();
                if len == 0.0 {
                    a
                } else {
                    a + (b - a) * (s / len)
                }
            }
            Edge::Arc {
                center,
                radius,
                start,
                sweep,
            } => center + Complex64::from_polar(radius, start + sweep.signum() * s / radius),
        }
    }

    /// Point at arc length `s` measured back from the end. Computed from
    /// the end vertex so small offsets keep full relative accuracy there.
    pub fn point_from_end(&self, s: f64) -> Complex64 {
        match *self {
            Edge::Segment { a, b } => {
                let len = (b - a).norm();
                if len == 0.0 {
                    b
                } else {
                    b + (a - b) * (s / len)
                }
            }
            Edge::Arc { .. } => self.point_at(self.length() - s),
        }
    }

    /// Unit tangent in the direction of travel at arc length `s`.
    pub fn tangent_at(&self, s: f64) -> Complex64 {
        match *self {
            Edge::Segment { a, b } => {
                let d = b - a;
                d / d.norm()
            }
            Edge::Arc { start, sweep, radius, .. } => {
                let phi = start + sweep.signum() * s / radius;
                Complex64::new(0.0, sweep.signum()) * Complex64::from_polar(1.0, phi)
            }
        }
    }

    /// Distance from `z` to the edge.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        match *self {
            Edge::Segment { a, b } => {
                let d = b - a;
                let t = ((z - a) * d.conj()).re / d.norm_sqr();
                let t = t.clamp(0.0, 1.0);
                (z - (a + d * t)).norm()
            }
            Edge::Arc {
                center,
                radius,
                start,
                sweep,
            } => {
                let rel = z - center;
                let phi = rel.arg();
                let (lo, hi) = if sweep >= 0.0 { (start, start + sweep) } else { (start + sweep, start) };
                // Shift phi into [lo, lo + 2π).
                let mut p = phi;
                while p < lo {
                    p += 2.0 * PI;
                }
                while p >= lo + 2.0 * PI {
                    p -= 2.0 * PI;
                }
                if p <= hi {
                    (rel.norm() - radius).abs()
                } else {
                    (z - self.start()).norm().min((z - self.end()).norm())
                }
            }
        }
    }

    /// Polyline approximation with `pieces` chords (segments return themselves).
    fn polyline(&self, pieces: usize) -> Vec<Complex64> {
        match self {
            Edge::Segment { a, .. } => vec![*a],
            Edge::Arc { .. } => {
                let len = self.length();
                (0..pieces).map(|k| self.point_at(len * k as f64 / pieces as f64)).collect()
            }
        }
    }
}

/// A boundary vertex with its interior angle and outward exterior bisector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corner {
    pub vertex: Complex64,
    pub interior_angle: f64,
    /// Unit vector bisecting the exterior angle, pointing away from the domain.
    pub exterior_bisector: Complex64,
}

impl Corner {
    /// Rotation `θ` such that `log(e^{iθ}(z − vertex))` has its branch cut
    /// along the exterior bisector.
    pub fn cut_rotation(&self) -> f64 {
        PI - self.exterior_bisector.arg()
    }
}

/// Simply connected region bounded by segments and circular arcs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarDomain {
    pub name: String,
    pub corners: Vec<Corner>,
    pub edges: Vec<Edge>,
}

const ARC_PIECES: usize = 2048;
const JOIN_TOL: f64 = 1e-12;

impl PlanarDomain {
    /// Builds a domain from a closed, positively oriented edge loop;
    /// corner `j` is the start of edge `j`.
    pub fn from_edges(name: impl Into<String>, edges: Vec<Edge>) -> Result<Self, DomainError> {
        if edges.len() < 2 {
            return Err(DomainError::Invalid("a domain needs at least two edges".into()));
        }
        for (j, e) in edges.iter().enumerate() {
            if !(e.length() > 0.0) {
                return Err(DomainError::DegenerateEdge(j));
            }
            let next = &edges[(j + 1) % edges.len()];
            if (e.end() - next.start()).norm() > JOIN_TOL * (1.0 + e.end().norm()) {
                return Err(DomainError::Invalid(format!(
                    "edge {j} ends at {} but edge {} starts at {}",
                    e.end(),
                    (j + 1) % edges.len(),
                    next.start()
                )));
            }
        }
        let corners = (0..edges.len())
            .map(|j| {
                let prev = &edges[(j + edges.len() - 1) % edges.len()];
                let cur = &edges[j];
                let t_in = prev.tangent_at(prev.length());
                let t_out = cur.tangent_at(0.0);
                // The domain lies counterclockwise from t_out to −t_in.
                let mut angle = (-t_in / t_out).arg();
                if angle <= 0.0 {
                    angle += 2.0 * PI;
                }
                let inward = t_out * Complex64::from_polar(1.0, angle / 2.0);
                Corner {
                    vertex: cur.start(),
                    interior_angle: angle,
                    exterior_bisector: -inward,
                }
            })
            .collect();
        let domain = Self {
            name: name.into(),
            corners,
            edges,
        };
        if domain.signed_area() <= 0.0 {
            return Err(DomainError::Invalid("boundary must be positively oriented".into()));
        }
        Ok(domain)
    }

    /// Polygon through `vertices` in counterclockwise order.
    pub fn polygon(name: impl Into<String>, vertices: &[Complex64]) -> Result<Self, DomainError> {
        let edges = (0..vertices.len())
            .map(|j| Edge::Segment {
                a: vertices[j],
                b: vertices[(j + 1) % vertices.len()],
            })
            .collect();
        Self::from_edges(name, edges)
    }

    pub fn vertices(&self) -> Vec<Complex64> {
        self.corners.iter().map(|c| c.vertex).collect()
    }

    fn outline(&self) -> Vec<Complex64> {
        self.edges.iter().flat_map(|e| e.polyline(ARC_PIECES)).collect()
    }

    fn signed_area(&self) -> f64 {
        let p = self.outline();
        0.5 * (0..p.len())
            .map(|i| {
                let (a, b) = (p[i], p[(i + 1) % p.len()]);
                a.re * b.im - b.re * a.im
            })
            .sum::<f64>()
    }

    /// Winding number of the boundary about `z` (arcs finely subdivided).
    pub fn winding_number(&self, z: Complex64) -> f64 {
        let p = self.outline();
        let total: f64 = (0..p.len())
            .map(|i| ((p[(i + 1) % p.len()] - z) / (p[i] - z)).arg())
            .sum();
        total / (2.0 * PI)
    }

    pub fn distance_to_boundary(&self, z: Complex64) -> f64 {
        self.edges.iter().map(|e| e.distance_to(z)).fold(f64::INFINITY, f64::min)
    }

    /// Strict interior test.
    pub fn contains(&self, z: Complex64) -> bool {
        self.distance_to_boundary(z) > 0.0 && self.winding_number(z).round() == 1.0
    }

    /// Closed-region test with absolute boundary tolerance `tol`.
    pub fn contains_closed(&self, z: Complex64, tol: f64) -> bool {
        self.distance_to_boundary(z) <= tol || self.winding_number(z).round() == 1.0
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (Complex64, Complex64) {
        let p = self.outline();
        let lo = p.iter().fold(Complex64::new(f64::INFINITY, f64::INFINITY), |a, z| {
            Complex64::new(a.re.min(z.re), a.im.min(z.im))
        });
        let hi = p.iter().fold(Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY), |a, z| {
            Complex64::new(a.re.max(z.re), a.im.max(z.im))
        });
        (lo, hi)
    }

    /// Distance from `z` to the nearest corner.
    pub fn nearest_corner_distance(&self, z: Complex64) -> f64 {
        self.corners
            .iter()
            .map(|c| (z - c.vertex).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unit_square_corners() {
        let sq = PlanarDomain::polygon("sq", &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)]).unwrap();
        for k in &sq.corners {
            assert!((k.interior_angle - PI / 2.0).abs() < 1e-14);
            // Outward bisector points away from the center.
            let out = k.vertex - c(0.5, 0.5);
            assert!((k.exterior_bisector - out / out.norm()).norm() < 1e-14);
            let probe = k.vertex + 1e-3 * k.exterior_bisector;
            assert!(!sq.contains(probe));
        }
        assert!(sq.contains(c(0.5, 0.5)));
        assert!(!sq.contains(c(1.5, 0.5)));
        assert!(sq.contains_closed(c(1.0, 0.5), 1e-12));
    }

    #[test]
    fn clockwise_loop_rejected() {
        let r = PlanarDomain::polygon("cw", &[c(0.0, 0.0), c(0.0, 1.0), c(1.0, 1.0), c(1.0, 0.0)]);
        assert!(r.is_err());
    }

    #[test]
    fn open_loop_and_degenerate_edge_rejected() {
        let e = vec![
            Edge::Segment { a: c(0.0, 0.0), b: c(1.0, 0.0) },
            Edge::Segment { a: c(1.0, 0.0), b: c(0.0, 1.0) },
        ];
        assert!(PlanarDomain::from_edges("open", e).is_err());
        let e = vec![
            Edge::Segment { a: c(0.0, 0.0), b: c(0.0, 0.0) },
            Edge::Segment { a: c(0.0, 0.0), b: c(1.0, 0.0) },
            Edge::Segment { a: c(1.0, 0.0), b: c(0.0, 0.0) },
        ];
        assert!(matches!(PlanarDomain::from_edges("deg", e), Err(DomainError::DegenerateEdge(0))));
    }

    #[test]
    fn arc_geometry() {
        let arc = Edge::Arc { center: c(0.0, 0.0), radius: 2.0, start: 0.0, sweep: PI };
        assert!((arc.length() - 2.0 * PI).abs() < 1e-14);
        assert!((arc.end() - c(-2.0, 0.0)).norm() < 1e-14);
        assert!((arc.tangent_at(0.0) - c(0.0, 1.0)).norm() < 1e-14);
        assert!((arc.distance_to(c(0.0, 3.0)) - 1.0).abs() < 1e-14);
        assert!((arc.distance_to(c(0.0, -1.0)) - 5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn cut_rotation_sends_bisector_to_negative_axis() {
        let k = Corner { vertex: c(0.0, 0.0), interior_angle: PI / 2.0, exterior_bisector: Complex64::from_polar(1.0, 0.7) };
        let rotated = Complex64::from_polar(1.0, k.cut_rotation()) * k.exterior_bisector;
        assert!((rotated - c(-1.0, 0.0)).norm() < 1e-14);
    }
}
