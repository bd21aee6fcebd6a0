use proptest::prelude::*;
use srg_bode::gain::{
    amplitude_fixed_point, gain_surface, global_l2_gain, inverse_full_srg, margin_at, margin_to,
    wellposedness_margin, AmplitudeProblem, AnalysisConfig, FrequencySlice, HarmonicSettings,
    NyquistSweep,
};
use srg_bode::geometry::GEOMETRY_TOL;
use srg_bode::nonlinearity::sine_sector_floor;
use srg_bode::{Error, Hypothesis, Interval, Nonlinearity, TransferFunction};

fn plant() -> TransferFunction {
    TransferFunction::new(vec![1.0], vec![2.0, 1.0]).unwrap()
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 10f64.powf(lo.log10() + (hi.log10() - lo.log10()) * i as f64 / (n - 1) as f64))
        .collect()
}

fn rel_close(x: f64, target: f64, rel: f64) -> bool {
    (x - target).abs() <= rel * target.abs()
}

#[test]
fn global_gain_for_sine() {
    let g = global_l2_gain(&plant(), &Nonlinearity::Sine).unwrap();
    assert!(rel_close(g, 1.0 / (2.0 - sine_sector_floor().abs()), 1e-3), "{g}");
}

#[test]
fn wellposedness_for_sine() {
    let b = Nonlinearity::Sine.bounds().unwrap();
    let wp = wellposedness_margin(&plant(), &b, 101).unwrap();
    assert!(rel_close(wp.margin, 1.0, 1e-3));
}

#[test]
fn unstable_plant_names_hypothesis() {
    let g = TransferFunction::new(vec![1.0], vec![-1.0, 1.0]).unwrap();
    let cfg = AnalysisConfig::new(g, Nonlinearity::Sine, vec![1.0], vec![1.0]);
    assert_eq!(
        gain_surface(&cfg).unwrap_err(),
        Error::Certification(Hypothesis::Stable)
    );
}

#[test]
fn biproper_plant_rejected() {
    let g = TransferFunction::new(vec![1.0, 1.0], vec![2.0, 1.0]).unwrap();
    let cfg = AnalysisConfig::new(g, Nonlinearity::Sine, vec![1.0], vec![1.0]);
    assert_eq!(
        gain_surface(&cfg).unwrap_err(),
        Error::Certification(Hypothesis::StrictlyProper)
    );
}

#[test]
fn restricted_margin_dominates_global_margin() {
    let g = plant();
    let c = Interval::new(sine_sector_floor(), 1.0);
    let global = margin_to(&inverse_full_srg(&g, &NyquistSweep::default()).unwrap(), c);
    for w in logspace(0.01, 100.0, 30) {
        assert!(margin_at(&g, w, c).unwrap() >= global - 1e-9, "omega = {w}");
    }
}

#[test]
fn margin_antitone_in_amplitude() {
    let g = plant();
    let b = Nonlinearity::Sine.bounds().unwrap();
    for w in [0.3, 1.0, 2.0, 7.0] {
        let slice = FrequencySlice::new(&g, w, &HarmonicSettings::default()).unwrap();
        let amps: Vec<f64> = (0..20).map(|i| 0.4 * i as f64).collect();
        for pair in amps.windows(2) {
            assert!(slice.margin(b.sector(pair[0])) >= slice.margin(b.sector(pair[1])));
            assert!(slice.margin(b.slope(pair[0])) >= slice.margin(b.slope(pair[1])));
        }
    }
}

#[test]
fn surface_columns_are_monotone_and_anchored() {
    let cfg = AnalysisConfig::new(
        plant(),
        Nonlinearity::Sine,
        logspace(0.1, 100.0, 12),
        logspace(1e-3, 1e3, 15),
    );
    let s = gain_surface(&cfg).unwrap();
    for (i, &w) in cfg.omega_grid.iter().enumerate() {
        let col = s.column(i);
        for pair in col.windows(2) {
            assert!(pair[0].gamma <= pair[1].gamma);
            assert!(pair[0].a_bound <= pair[1].a_bound);
        }
        let lti = 1.0 / (w * w + 9.0).sqrt();
        assert!(col[0].gamma >= lti * (1.0 - 1e-9), "U -> 0 below LTI at omega = {w}");
        for r in col {
            assert!(r.feasible);
            assert!((r.gamma - 1.0 / r.r_omega_a).abs() <= 1e-12 * r.gamma);
            let a_max = (2.0 * r.u / (r.r_omega_inf * r.r_partial_omega_inf)).sqrt();
            assert!(r.a_bound <= a_max + cfg.bisection_tol);
        }
    }
}

#[test]
fn zero_energy_row_uses_point_sector() {
    let cfg = AnalysisConfig::new(plant(), Nonlinearity::Sine, vec![1.0, 2.0], vec![0.0, 1.0]);
    let s = gain_surface(&cfg).unwrap();
    for (i, w) in [1.0f64, 2.0].iter().enumerate() {
        let r = s.record(i, 0);
        assert_eq!(r.a_bound, 0.0);
        assert!(rel_close(r.gamma, 1.0 / (w * w + 9.0).sqrt(), 1e-9));
    }
}

#[test]
fn identity_amplitude_is_bracket_top() {
    let nl = Nonlinearity::identity();
    for u in [0.01, 1.0, 50.0] {
        let b = amplitude_fixed_point(&plant(), &nl, 3.0, u, 1e-4).unwrap();
        assert!((b.a_bound - b.a_max).abs() <= 1e-4);
    }
}

#[test]
fn saturation_surface_is_certified() {
    let cfg = AnalysisConfig::new(
        TransferFunction::new(vec![2.0], vec![2.0, 3.0, 1.0]).unwrap(),
        Nonlinearity::Saturation { limit: 0.5 },
        logspace(0.1, 10.0, 6),
        logspace(1e-2, 1e2, 6),
    );
    let s = gain_surface(&cfg).unwrap();
    assert!(s.records.iter().all(|r| r.feasible));
    for i in 0..6 {
        for pair in s.column(i).windows(2) {
            assert!(pair[0].gamma <= pair[1].gamma);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bisection_contract(omega in 0.1..50.0f64, log_u in -3.0..3.0f64) {
        let g = plant();
        let u = 10f64.powf(log_u);
        let tol = 1e-4;
        let bounds = Nonlinearity::Sine.bounds().unwrap();
        let slice = FrequencySlice::new(&g, omega, &HarmonicSettings::default()).unwrap();
        let problem = AmplitudeProblem::new(&slice, &bounds, GEOMETRY_TOL);
        let b = problem.solve(u, tol, 60);
        prop_assert!(b.feasible);
        prop_assert!(problem.predicate(b.a_bound, u));
        prop_assert!(!problem.predicate(b.a_bound - tol, u));
        prop_assert!(problem.predicate(b.a_max, u));
    }
}
