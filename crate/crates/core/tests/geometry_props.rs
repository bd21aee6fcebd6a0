use num_complex::Complex64;
use proptest::prelude::*;
use srg_bode::geometry::{
    brute_force_dist, dist_region_disk, hco, invert_region, HyperbolicRegion, IntervalDisk, Vertex,
};

fn point() -> impl Strategy<Value = Complex64> {
    (-4.0..4.0f64, 0.05..3.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn points() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(point(), 1..10)
}

fn disk() -> impl Strategy<Value = IntervalDisk> {
    (-6.0..6.0f64, 0.0..4.0f64).prop_map(|(a, w)| IntervalDisk::new(a, a + w).unwrap())
}

/// Every vertex of one region lies in the other, in both directions.
fn same_region(a: &HyperbolicRegion, b: &HyperbolicRegion, tol: f64) -> bool {
    if a.is_unbounded() != b.is_unbounded() {
        return false;
    }
    let inside = |x: &HyperbolicRegion, y: &HyperbolicRegion| {
        x.vertices().iter().all(|v| match v {
            Vertex::Finite(z) => y.contains_with_tol(*z, tol * z.norm().max(1.0)),
            Vertex::Infinity => true,
        })
    };
    inside(a, b) && inside(b, a)
}

proptest! {
    #[test]
    fn hull_contains_its_points(ps in points()) {
        let h = hco(&ps).unwrap();
        for p in &ps {
            prop_assert!(h.contains_with_tol(*p, 1e-9), "{p} outside");
            prop_assert!(h.contains_with_tol(p.conj(), 1e-9));
        }
    }

    #[test]
    fn hull_is_idempotent(ps in points()) {
        let h = hco(&ps).unwrap();
        let vs: Vec<Complex64> = h.vertices().iter().filter_map(|v| v.finite()).collect();
        let again = hco(&vs).unwrap();
        prop_assert!(again.approx_eq(&h, 1e-9));
    }

    #[test]
    fn inversion_is_an_involution(ps in points()) {
        let h = hco(&ps).unwrap();
        let back = invert_region(&invert_region(&h));
        prop_assert!(back.approx_eq(&h, 1e-9));
    }

    #[test]
    fn inversion_commutes_with_hull(ps in points()) {
        let inverted: Vec<Complex64> = ps.iter().map(|z| 1.0 / z.conj()).collect();
        let lhs = hco(&inverted).unwrap();
        let rhs = invert_region(&hco(&ps).unwrap());
        prop_assert!(same_region(&lhs, &rhs, 1e-7));
    }

    #[test]
    fn exact_distance_is_below_sampled(ps in points(), d in disk()) {
        let h = hco(&ps).unwrap();
        let exact = dist_region_disk(&h, &d);
        let sampled = brute_force_dist(&h, &d, 20_000);
        prop_assert!(exact <= sampled + 1e-9, "exact {exact} sampled {sampled}");
        prop_assert!(sampled - exact < 1e-3, "exact {exact} sampled {sampled}");
    }

    #[test]
    fn distance_antitone_in_disk(ps in points(), d in disk(), grow in 0.0..2.0f64) {
        let h = hco(&ps).unwrap();
        let bigger = IntervalDisk::new(d.alpha() - grow, d.beta() + 0.5 * grow).unwrap();
        prop_assert!(dist_region_disk(&h, &bigger) <= dist_region_disk(&h, &d) + 1e-12);
    }

    #[test]
    fn point_disk_distance_matches_region_distance(ps in points(), x in -6.0..6.0f64) {
        let h = hco(&ps).unwrap();
        let z = Complex64::new(x, 0.0);
        prop_assert_eq!(dist_region_disk(&h, &IntervalDisk::point(x)), h.distance_to(z));
    }
}

#[test]
fn line_region_from_first_order_lag() {
    // Inverse Nyquist of 1/(s+2) is the line Re z = 2.
    let region =
        HyperbolicRegion::from_vertices(&[Vertex::Finite(Complex64::new(2.0, 0.0)), Vertex::Infinity])
            .unwrap();
    let d = IntervalDisk::new(-1.0, 1.0).unwrap().scaled_negated(1.0);
    assert!((dist_region_disk(&region, &d) - 1.0).abs() < 1e-12);
    assert!((region.distance_to(Complex64::new(-1.0, 0.0)) - 3.0).abs() < 1e-12);
}

#[test]
fn empty_point_set_rejected() {
    assert!(hco(&[]).is_err());
}
