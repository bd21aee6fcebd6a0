use std::f64::consts::PI;

use proptest::prelude::*;
use srg_bode::nonlinearity::{sine_sector_floor, sine_sector_minimizer, Interval, Nonlinearity};

fn sampled_ok(nl: &Nonlinearity, a: f64) -> bool {
    let phi = |x: f64| nl.eval(x);
    nl.bounds()
        .unwrap()
        .verify_by_sampling(&phi, &[a], 400, 1e-9)
        .is_ok()
}

proptest! {
    #[test]
    fn sine_bounds_hold_on_samples(a in 0.01..20.0f64) {
        prop_assert!(sampled_ok(&Nonlinearity::Sine, a));
    }

    #[test]
    fn saturation_bounds_hold_on_samples(a in 0.01..10.0f64, limit in 0.1..3.0f64) {
        let nl = Nonlinearity::Saturation { limit };
        prop_assert!(sampled_ok(&nl, a));
    }

    #[test]
    fn deadzone_bounds_hold_on_samples(a in 0.01..10.0f64, width in 0.1..3.0f64) {
        let nl = Nonlinearity::Deadzone { width };
        prop_assert!(sampled_ok(&nl, a));
    }

    #[test]
    fn bounds_widen_with_amplitude(a1 in 0.0..15.0f64, da in 0.0..5.0f64) {
        for nl in [
            Nonlinearity::Sine,
            Nonlinearity::Saturation { limit: 1.0 },
            Nonlinearity::Deadzone { width: 0.5 },
        ] {
            let b = nl.bounds().unwrap();
            let a2 = a1 + da;
            prop_assert!(b.sector(a2).contains_interval(&b.sector(a1)), "{}", nl.name());
            prop_assert!(b.slope(a2).contains_interval(&b.slope(a1)), "{}", nl.name());
            prop_assert!(b.sector(f64::INFINITY).contains_interval(&b.sector(a2)));
            prop_assert!(b.slope(f64::INFINITY).contains_interval(&b.slope(a2)));
        }
    }

    #[test]
    fn sine_piecewise_formulas(a in 0.0..30.0f64) {
        let b = Nonlinearity::Sine.bounds().unwrap();
        let slope = b.slope(a);
        let expected_a = if a <= PI { a.cos() } else { -1.0 };
        prop_assert!((slope.lo - expected_a).abs() <= 1e-12);
        prop_assert_eq!(slope.hi, 1.0);
        let sector = b.sector(a);
        let a_star = sine_sector_minimizer();
        let expected_c = if a == 0.0 {
            1.0
        } else if a <= a_star {
            a.sin() / a
        } else {
            a_star.sin() / a_star
        };
        prop_assert!((sector.lo - expected_c).abs() <= 1e-12);
        prop_assert_eq!(sector.hi, 1.0);
    }
}

#[test]
fn sine_asymptotes() {
    assert!((sine_sector_minimizer() - 4.4934).abs() < 1e-4);
    assert!((sine_sector_floor() + 0.21723).abs() < 1e-5);
    let asym = Nonlinearity::Sine.asymptotic_bounds().unwrap();
    assert_eq!((asym.a, asym.b, asym.d), (-1.0, 1.0, 1.0));
}

#[test]
fn linear_gain_bounds_are_constant() {
    let nl = Nonlinearity::linear(0.7);
    for a in [0.0, 1.0, 100.0, f64::INFINITY] {
        assert_eq!(nl.sector_bounds(a).unwrap(), Interval::new(0.7, 0.7));
        assert_eq!(nl.slope_bounds(a).unwrap(), Interval::new(0.7, 0.7));
    }
    assert!(nl.is_odd());
}
