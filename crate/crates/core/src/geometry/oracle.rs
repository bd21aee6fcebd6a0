//! Sampling oracle for region-to-disk distances.
//!
//! Boundaries are sampled through the Klein model (straight chords mapped
//! back to the half plane), so this path shares nothing with the exact
//! arc projections in [`super::region`] beyond the hull vertices.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::disk::IntervalDisk;
use super::region::{klein_of, HyperbolicRegion, Vertex};

/// Minimum pairwise distance between `n`-point boundary samples of the
/// region and the disk, with containment checks so intersecting sets give 0.
/// Converges to the true distance from above as `n` grows.
pub fn brute_force_dist(region: &HyperbolicRegion, disk: &IntervalDisk, n: usize) -> f64 {
    let n = n.max(100);
    let center = Complex64::new(disk.center(), 0.0);
    let radius = disk.radius();

    let samples = sample_boundary(region, n);
    if samples.is_empty() {
        return f64::INFINITY;
    }
    if samples.iter().any(|p| (p - center).norm() <= radius) {
        return 0.0;
    }
    if region.vertices().len() >= 3 && winding_contains(&samples, center) {
        return 0.0;
    }

    if radius == 0.0 {
        return samples
            .iter()
            .map(|p| (p - center).norm())
            .fold(f64::INFINITY, f64::min);
    }
    let disk_pt = |i: i64| {
        let theta = 2.0 * PI * (i.rem_euclid(n as i64) as f64) / n as f64;
        center + Complex64::from_polar(radius, theta)
    };
    samples
        .iter()
        .map(|p| {
            // Samples on a circle are ordered by angle, so the nearest one to
            // p sits next to p's polar angle about the center.
            let rel = p - center;
            let i0 = (rel.im.atan2(rel.re) / (2.0 * PI) * n as f64).round() as i64;
            (i0 - 2..=i0 + 2)
                .map(|i| (p - disk_pt(i)).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Boundary samples of the upper region in counter-clockwise order.
fn sample_boundary(region: &HyperbolicRegion, n: usize) -> Vec<Complex64> {
    let vs = region.vertices();
    match vs.len() {
        0 => Vec::new(),
        1 => vs[0].finite().into_iter().collect(),
        len => {
            let edges: Vec<(Vertex, Vertex)> = if len == 2 {
                vec![(vs[0], vs[1])]
            } else {
                (0..len).map(|i| (vs[i], vs[(i + 1) % len])).collect()
            };
            let per_edge = (n / edges.len()).max(2);
            edges
                .iter()
                .flat_map(|&(a, b)| sample_chord(a, b, per_edge))
                .collect()
        }
    }
}

/// Points along the Klein chord from `a` to `b`, clustered toward both ends
/// so that ideal endpoints are approached smoothly in the half plane.
fn sample_chord(a: Vertex, b: Vertex, m: usize) -> Vec<Complex64> {
    let ka = klein_point(a);
    let kb = klein_point(b);
    (0..m)
        .filter_map(|i| {
            let s = 0.5 * (1.0 - (PI * i as f64 / (m - 1) as f64).cos());
            let k = [ka[0] + s * (kb[0] - ka[0]), ka[1] + s * (kb[1] - ka[1])];
            if i == 0 {
                return a.finite();
            }
            if i == m - 1 {
                return b.finite();
            }
            from_klein(k)
        })
        .collect()
}

fn klein_point(v: Vertex) -> [f64; 2] {
    match v {
        Vertex::Infinity => [1.0, 0.0],
        Vertex::Finite(z) => klein_of(z),
    }
}

fn from_klein(k: [f64; 2]) -> Option<Complex64> {
    let r2 = (k[0] * k[0] + k[1] * k[1]).min(1.0);
    let w = Complex64::new(k[0], k[1]) / (1.0 + (1.0 - r2).sqrt());
    let one = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 1.0) * (one + w) / (one - w);
    (z.re.is_finite() && z.im.is_finite()).then(|| Complex64::new(z.re, z.im.abs()))
}

fn winding_contains(poly: &[Complex64], p: Complex64) -> bool {
    let mut winding = 0i32;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let side = (b.re - a.re) * (p.im - a.im) - (p.re - a.re) * (b.im - a.im);
        if a.im <= p.im {
            if b.im > p.im && side > 0.0 {
                winding += 1;
            }
        } else if b.im <= p.im && side < 0.0 {
            winding -= 1;
        }
    }
    winding != 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::region::{dist_region_disk, hco};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn point_against_point_is_exact() {
        let r = hco(&[c(1.0, 4.0)]).unwrap();
        let d = brute_force_dist(&r, &IntervalDisk::point(-2.0), 1000);
        assert_eq!(d, 5.0);
    }

    #[test]
    fn agrees_with_exact_distances() {
        let cases = [
            (
                HyperbolicRegion::from_vertices(&[Vertex::Finite(c(2.0, 0.0)), Vertex::Infinity])
                    .unwrap(),
                IntervalDisk::new(-1.0, 0.2172).unwrap(),
            ),
            (
                HyperbolicRegion::from_vertices(&[Vertex::Finite(c(2.0, 2.0)), Vertex::Infinity])
                    .unwrap(),
                IntervalDisk::point(-1.0),
            ),
            (
                hco(&[c(0.0, 1.0), c(2.0, 1.0), c(1.0, 3.0), c(0.5, 0.0)]).unwrap(),
                IntervalDisk::new(-3.0, -1.0).unwrap(),
            ),
        ];
        for (region, disk) in &cases {
            let exact = dist_region_disk(region, disk);
            let sampled = brute_force_dist(region, disk, 100_000);
            assert!(
                (exact - sampled).abs() < 1e-4,
                "exact {exact} vs sampled {sampled}"
            );
        }
    }

    #[test]
    fn intersecting_sets_give_zero() {
        let r = hco(&[c(0.0, 1.0), c(2.0, 1.0), c(1.0, 3.0)]).unwrap();
        // D[-1, 3] reaches the lower corners j and 2 + j.
        let overlap = IntervalDisk::new(-1.0, 3.0).unwrap();
        assert_eq!(dist_region_disk(&r, &overlap), 0.0);
        assert_eq!(brute_force_dist(&r, &overlap, 1000), 0.0);
        let big = IntervalDisk::new(-10.0, 10.0).unwrap();
        assert_eq!(brute_force_dist(&r, &big, 1000), 0.0);
    }
}
