//! Hyperbolically convex, conjugate-symmetric regions.
//!
//! A region is stored by its upper-half-plane part; the lower half is the
//! implicit mirror image. Hulls are computed in the Beltrami-Klein disk,
//! where hyperbolic geodesics are straight chords, so the hyperbolic hull of
//! a point set is the Euclidean hull of its Klein images. Boundary edges are
//! then rebuilt in the half-plane from the original vertex coordinates as
//! vertical segments or arcs of circles centered on the real axis.

use std::cmp::Ordering;

use num_complex::Complex64;

use super::disk::IntervalDisk;
use crate::error::{Error, Result};

/// Default absolute tolerance for membership predicates.
pub const GEOMETRY_TOL: f64 = 1e-9;

/// Klein-model turns smaller than this (times the edge lengths) count as
/// collinear; it sits just above the rounding noise of [`klein_of`].
const COLLINEAR_EPS: f64 = 1e-15;

/// Arcs whose circle radius exceeds this multiple of their chord length are
/// treated as vertical segments.
const FLAT_ARC_RATIO: f64 = 1e7;

/// Hull vertex in the closed upper half plane, or the ideal point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Vertex {
    Finite(Complex64),
    Infinity,
}

impl Vertex {
    pub fn finite(&self) -> Option<Complex64> {
        match self {
            Vertex::Finite(z) => Some(*z),
            Vertex::Infinity => None,
        }
    }

    /// Image under `z -> 1/conj(z)`, which keeps the upper half plane fixed.
    pub fn inverted(&self) -> Vertex {
        match self {
            Vertex::Infinity => Vertex::Finite(Complex64::new(0.0, 0.0)),
            Vertex::Finite(z) if z.norm_sqr() == 0.0 => Vertex::Infinity,
            Vertex::Finite(z) => Vertex::Finite(upper(*z / z.norm_sqr())),
        }
    }

    fn klein(&self) -> [f64; 2] {
        match self {
            Vertex::Infinity => [1.0, 0.0],
            Vertex::Finite(z) => klein_of(*z),
        }
    }
}

/// Hyperbolic geodesic segment in the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geodesic {
    /// `{x + jy : y_lo <= y <= y_hi}`; `y_hi` may be infinite.
    Vertical { x: f64, y_lo: f64, y_hi: f64 },
    /// Arc of the circle `|z - center| = radius` for polar angles in
    /// `[theta_lo, theta_hi]`, a subinterval of `[0, pi]`.
    Arc {
        center: f64,
        radius: f64,
        theta_lo: f64,
        theta_hi: f64,
    },
}

impl Geodesic {
    /// Geodesic joining two distinct vertices.
    pub fn between(p: Vertex, q: Vertex) -> Geodesic {
        match (p, q) {
            (Vertex::Infinity, Vertex::Finite(z)) | (Vertex::Finite(z), Vertex::Infinity) => {
                Geodesic::Vertical {
                    x: z.re,
                    y_lo: z.im,
                    y_hi: f64::INFINITY,
                }
            }
            (Vertex::Finite(a), Vertex::Finite(b)) => {
                let chord = (a - b).norm();
                let dx = a.re - b.re;
                let vertical = || Geodesic::Vertical {
                    x: 0.5 * (a.re + b.re),
                    y_lo: a.im.min(b.im),
                    y_hi: a.im.max(b.im),
                };
                if dx == 0.0 {
                    return vertical();
                }
                let center = (a.norm_sqr() - b.norm_sqr()) / (2.0 * dx);
                let radius = 0.5 * ((a - center).norm() + (b - center).norm());
                if radius > FLAT_ARC_RATIO * chord {
                    return vertical();
                }
                let ta = a.im.atan2(a.re - center);
                let tb = b.im.atan2(b.re - center);
                Geodesic::Arc {
                    center,
                    radius,
                    theta_lo: ta.min(tb),
                    theta_hi: ta.max(tb),
                }
            }
            (Vertex::Infinity, Vertex::Infinity) => Geodesic::Vertical {
                x: 0.0,
                y_lo: f64::INFINITY,
                y_hi: f64::INFINITY,
            },
        }
    }

    /// Euclidean distance from `p` (upper half plane) to the geodesic.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        match *self {
            Geodesic::Vertical { x, y_lo, y_hi } => {
                let y = p.im.clamp(y_lo, y_hi);
                if y.is_infinite() {
                    return f64::INFINITY;
                }
                (p - Complex64::new(x, y)).norm()
            }
            Geodesic::Arc {
                center,
                radius,
                theta_lo,
                theta_hi,
            } => {
                let rel = p - center;
                let r = rel.norm();
                if r == 0.0 {
                    return radius;
                }
                let theta = rel.im.atan2(rel.re);
                if (theta_lo..=theta_hi).contains(&theta) {
                    (r - radius).abs()
                } else {
                    let lo = Complex64::from_polar(radius, theta_lo) + center;
                    let hi = Complex64::from_polar(radius, theta_hi) + center;
                    (p - lo).norm().min((p - hi).norm())
                }
            }
        }
    }
}

/// Conjugate-symmetric hyperbolically convex region.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicRegion {
    vertices: Vec<Vertex>,
    boundary: Vec<Geodesic>,
    klein: Vec<[f64; 2]>,
    unbounded: bool,
}

impl HyperbolicRegion {
    /// Hyperbolic convex hull of a set of vertices in the closed upper half plane.
    pub fn from_vertices(vertices: &[Vertex]) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        let mut tagged: Vec<([f64; 2], Vertex)> = vertices.iter().map(|v| (v.klein(), *v)).collect();
        tagged.sort_by(|a, b| lex(&a.0, &b.0));
        tagged.dedup_by(|a, b| a.0 == b.0);

        let hull = monotone_chain(&tagged);
        let vertices: Vec<Vertex> = hull.iter().map(|&i| tagged[i].1).collect();
        let klein: Vec<[f64; 2]> = hull.iter().map(|&i| tagged[i].0).collect();
        let boundary = match vertices.len() {
            1 => Vec::new(),
            2 => vec![Geodesic::between(vertices[0], vertices[1])],
            n => (0..n)
                .map(|i| Geodesic::between(vertices[i], vertices[(i + 1) % n]))
                .collect(),
        };
        let unbounded = vertices.contains(&Vertex::Infinity);
        Ok(HyperbolicRegion {
            vertices,
            boundary,
            klein,
            unbounded,
        })
    }

    /// Hull vertices in counter-clockwise order (Klein model), upper half only.
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn boundary(&self) -> &[Geodesic] {
        &self.boundary
    }

    pub fn is_unbounded(&self) -> bool {
        self.unbounded
    }

    /// Point, single geodesic segment, or a region with interior.
    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    /// Image of the region under `z -> 1/z`.
    pub fn inverted(&self) -> HyperbolicRegion {
        let inv: Vec<Vertex> = self.vertices.iter().map(Vertex::inverted).collect();
        HyperbolicRegion::from_vertices(&inv).expect("non-empty vertex set")
    }

    /// Distance from `z` to the mirrored region (zero inside).
    pub fn distance_to(&self, z: Complex64) -> f64 {
        let p = upper(z);
        if self.klein_interior_contains(p) {
            return 0.0;
        }
        if self.vertices.len() == 1 {
            return match self.vertices[0] {
                Vertex::Finite(v) => (p - v).norm(),
                Vertex::Infinity => f64::INFINITY,
            };
        }
        self.boundary
            .iter()
            .map(|g| g.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains_with_tol(&self, z: Complex64, tol: f64) -> bool {
        self.distance_to(z) <= tol
    }

    /// Whether `z` or its conjugate lies in the region, within [`GEOMETRY_TOL`].
    pub fn contains(&self, z: Complex64) -> bool {
        self.contains_with_tol(z, GEOMETRY_TOL)
    }

    /// Vertex-wise comparison; hull vertex order is canonical.
    pub fn approx_eq(&self, other: &HyperbolicRegion, tol: f64) -> bool {
        self.vertices.len() == other.vertices.len()
            && self
                .vertices
                .iter()
                .zip(&other.vertices)
                .all(|(a, b)| match (a, b) {
                    (Vertex::Infinity, Vertex::Infinity) => true,
                    (Vertex::Finite(x), Vertex::Finite(y)) => (x - y).norm() <= tol,
                    _ => false,
                })
    }

    fn klein_interior_contains(&self, p: Complex64) -> bool {
        let n = self.klein.len();
        if n < 3 {
            return false;
        }
        let k = klein_of(p);
        (0..n).all(|i| cross(&self.klein[i], &self.klein[(i + 1) % n], &k) >= 0.0)
    }
}

/// Hyperbolic convex hull of a conjugate-symmetric point set. Points in the
/// lower half plane are reflected first.
pub fn hco(points: &[Complex64]) -> Result<HyperbolicRegion> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if let Some(bad) = points.iter().find(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Precondition(format!("non-finite hull point {bad}")));
    }
    let vs: Vec<Vertex> = points.iter().map(|z| Vertex::Finite(upper(*z))).collect();
    HyperbolicRegion::from_vertices(&vs)
}

pub fn invert_region(region: &HyperbolicRegion) -> HyperbolicRegion {
    region.inverted()
}

pub fn contains(region: &HyperbolicRegion, z: Complex64) -> bool {
    region.contains(z)
}

/// `inf |z1 - z2|` over the region and the disk; zero when they intersect.
pub fn dist_region_disk(region: &HyperbolicRegion, disk: &IntervalDisk) -> f64 {
    let d = region.distance_to(Complex64::new(disk.center(), 0.0));
    (d - disk.radius()).max(0.0)
}

pub(crate) fn upper(z: Complex64) -> Complex64 {
    Complex64::new(z.re, z.im.abs())
}

/// Cayley map to the Poincare disk followed by the Poincare-to-Klein map.
pub(crate) fn klein_of(z: Complex64) -> [f64; 2] {
    let i = Complex64::new(0.0, 1.0);
    let w = (z - i) / (z + i);
    let s = 2.0 / (1.0 + w.norm_sqr());
    [w.re * s, w.im * s]
}

fn lex(a: &[f64; 2], b: &[f64; 2]) -> Ordering {
    a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1]))
}

fn cross(o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Strict left turn `o -> a -> b`, with noise-level turns treated as straight.
fn left_turn(o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]) -> bool {
    let scale = (a[0] - o[0]).hypot(a[1] - o[1]) + (b[0] - o[0]).hypot(b[1] - o[1]);
    cross(o, a, b) > COLLINEAR_EPS * scale
}

/// Andrew's monotone chain over lexicographically sorted, deduplicated
/// points. Returns hull indices counter-clockwise without collinear points.
fn monotone_chain(pts: &[([f64; 2], Vertex)]) -> Vec<usize> {
    let n = pts.len();
    if n < 3 {
        return (0..n).collect();
    }
    let mut lower: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        while lower.len() >= 2
            && !left_turn(&pts[lower[lower.len() - 2]].0, &pts[lower[lower.len() - 1]].0, &pts[i].0)
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::with_capacity(n);
    for i in (0..n).rev() {
        while upper.len() >= 2
            && !left_turn(&pts[upper[upper.len() - 2]].0, &pts[upper[upper.len() - 1]].0, &pts[i].0)
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vertical_pair_is_a_segment() {
        let r = hco(&[c(2.0, 1.0), c(2.0, -3.0)]).unwrap();
        assert_eq!(r.vertices().len(), 2);
        assert!(matches!(r.boundary()[0], Geodesic::Vertical { x, .. } if x == 2.0));
        assert!(r.contains(c(2.0, 2.0)));
        assert!(r.contains(c(2.0, -2.0)));
        assert!(!r.contains(c(3.0, 2.0)));
        assert!(!r.contains(c(2.0, 0.5)));
    }

    #[test]
    fn singleton_and_empty() {
        let r = hco(&[c(0.5, 0.0)]).unwrap();
        assert!(r.is_degenerate());
        assert!(r.contains(c(0.5, 0.0)));
        assert_eq!(r.distance_to(c(1.5, 0.0)), 1.0);
        assert_eq!(hco(&[]), Err(Error::EmptyPointSet));
    }

    #[test]
    fn harmonic_triangle_contains_its_vertices() {
        let pts = [c(0.25, -0.25), c(0.05, -0.15), c(0.0, 0.0)];
        let r = hco(&pts).unwrap();
        for p in pts {
            assert!(r.contains(p));
            assert!(r.contains(p.conj()));
        }
        // The three points lie on one geodesic, |z - 0.25| = 0.25, so the
        // hull is at most a rounding-level sliver.
        assert!(r.vertices().len() <= 3);
        assert!(!r.contains(c(0.25, 0.0)));
    }

    #[test]
    fn generic_triangle_has_interior() {
        let r = hco(&[c(0.0, 1.0), c(2.0, 1.0), c(1.0, 3.0)]).unwrap();
        assert_eq!(r.vertices().len(), 3);
        assert!(!r.is_degenerate());
        assert!(r.contains(c(1.0, 1.8)));
        assert_eq!(r.distance_to(c(1.0, 1.8)), 0.0);
        assert!(!r.contains(c(1.0, 0.2)));
    }

    #[test]
    fn inversion_of_points() {
        let r = hco(&[c(0.5, 0.0)]).unwrap().inverted();
        assert_eq!(r.vertices(), &[Vertex::Finite(c(2.0, 0.0))]);

        let inv = hco(&[c(0.25, -0.25), c(0.05, -0.15), c(0.0, 0.0)]).unwrap().inverted();
        assert!(inv.is_unbounded());
        assert!(inv.contains(c(2.0, 2.0)));
        assert!(inv.contains(c(2.0, 6.0)));
        assert!(inv.contains(c(2.0, 1e3)));
        assert!(!inv.contains(c(2.0, 1.0)));
        assert_eq!(inv.boundary().len(), 1);
        match inv.boundary()[0] {
            Geodesic::Vertical { x, y_lo, y_hi } => {
                assert!((x - 2.0).abs() < 1e-12);
                assert!((y_lo - 2.0).abs() < 1e-12);
                assert!(y_hi.is_infinite());
            }
            other => panic!("expected a vertical ray, got {other:?}"),
        }
    }

    #[test]
    fn disk_distances() {
        // Vertical line Re z = 2 including the real point 2.
        let line = HyperbolicRegion::from_vertices(&[
            Vertex::Finite(c(2.0, 0.0)),
            Vertex::Infinity,
        ])
        .unwrap();
        let sector = IntervalDisk::new(-1.0, 0.2172).unwrap();
        assert!((dist_region_disk(&line, &sector) - 1.7828).abs() < 1e-12);

        let point = hco(&[c(1.0, 0.0)]).unwrap();
        assert_eq!(dist_region_disk(&point, &IntervalDisk::new(-1.0, 1.0).unwrap()), 0.0);

        let ray = HyperbolicRegion::from_vertices(&[
            Vertex::Finite(c(2.0, 2.0)),
            Vertex::Infinity,
        ])
        .unwrap();
        let d = dist_region_disk(&ray, &IntervalDisk::point(-1.0));
        assert!((d - 13f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn arc_distance_projection() {
        let g = Geodesic::between(Vertex::Finite(c(-1.0, 0.0)), Vertex::Finite(c(1.0, 0.0)));
        assert!(matches!(g, Geodesic::Arc { center, radius, .. } if center == 0.0 && radius == 1.0));
        assert!((g.distance_to(c(0.0, 3.0)) - 2.0).abs() < 1e-15);
        assert!((g.distance_to(c(0.0, 0.0)) - 1.0).abs() < 1e-15);
        let partial = Geodesic::between(
            Vertex::Finite(c(0.0, 1.0)),
            Vertex::Finite(c(1.0, 0.0)),
        );
        // Nearest point of the quarter arc to -2 is its top end at j.
        assert!((partial.distance_to(c(-2.0, 0.0)) - 5f64.sqrt()).abs() < 1e-12);
    }
}
