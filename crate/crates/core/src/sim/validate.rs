//! Empirical soundness check of certified gain and amplitude bounds.

use std::f64::consts::PI;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::input::{HarmonicTerm, PeriodicInput};
use super::lure::{default_dt, run_to_steady_state, DEFAULT_MAX_PERIODS, DEFAULT_STEADY_TOL};
use crate::error::{Error, Result};
use crate::gain::GainRecord;
use crate::lti::TransferFunction;
use crate::nonlinearity::Nonlinearity;

const CANDIDATE_HARMONICS: [u32; 3] = [1, 3, 5];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationSettings {
    pub points: usize,
    pub inputs_per_point: usize,
    /// Relative slack on both bounds.
    pub margin: f64,
    pub seed: u64,
    pub steady_tol: f64,
    /// Inputs are rescaled to this fraction of the point's `U`.
    pub energy_fraction: f64,
    pub max_periods: usize,
    /// Runs are extended to at least this many seconds at high frequency.
    pub min_sim_seconds: f64,
}

impl Default for ValidationSettings {
    fn default() -> Self {
        ValidationSettings {
            points: 5,
            inputs_per_point: 10,
            margin: 0.01,
            seed: 0,
            steady_tol: DEFAULT_STEADY_TOL,
            energy_fraction: 0.99,
            max_periods: DEFAULT_MAX_PERIODS,
            min_sim_seconds: 50.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Gain,
    Amplitude,
    Divergence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub omega: f64,
    #[serde(rename = "U")]
    pub u: f64,
    pub kind: ViolationKind,
    pub measured: f64,
    pub bound: f64,
    pub input: PeriodicInput,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputOutcome {
    pub input: PeriodicInput,
    pub harmonic_energy: f64,
    pub input_rms: f64,
    pub output_rms: f64,
    pub gain: f64,
    pub output_sup: f64,
    pub converged: bool,
    pub diverged: bool,
    pub periods_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointOutcome {
    pub omega: f64,
    #[serde(rename = "U")]
    pub u: f64,
    pub gamma: f64,
    pub a_bound: f64,
    pub max_gain: f64,
    pub max_sup: f64,
    pub inputs: Vec<InputOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub margin: f64,
    pub simulations: usize,
    /// Runs that never met the steady-state tolerance; their bounds are
    /// not checked.
    pub unconverged: usize,
    pub passed: bool,
    pub violations: Vec<Violation>,
    pub points: Vec<PointOutcome>,
}

/// Random odd-harmonic input with `U = energy` exactly.
pub fn random_input(rng: &mut impl Rng, omega: f64, energy: f64) -> PeriodicInput {
    let mask = rng.gen_range(1..8u32);
    let terms: Vec<HarmonicTerm> = CANDIDATE_HARMONICS
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, &k)| HarmonicTerm {
            k,
            amplitude: rng.gen_range(0.05..1.0),
            phase: rng.gen_range(0.0..2.0 * PI),
        })
        .collect();
    let inp = PeriodicInput { omega, terms };
    let e = inp.harmonic_energy();
    inp.scaled((energy / e).sqrt())
}

fn simulate_one(
    system: &TransferFunction,
    nl: &Nonlinearity,
    inp: &PeriodicInput,
    settings: &ValidationSettings,
) -> Result<InputOutcome> {
    let ss = system.to_state_space();
    let period = inp.period();
    let dt = default_dt(&ss, nl, period);
    let periods = settings
        .max_periods
        .max((settings.min_sim_seconds / period).ceil() as usize);
    let base = InputOutcome {
        input: inp.clone(),
        harmonic_energy: inp.harmonic_energy(),
        input_rms: inp.rms(),
        output_rms: f64::INFINITY,
        gain: f64::INFINITY,
        output_sup: f64::INFINITY,
        converged: false,
        diverged: true,
        periods_used: 0,
    };
    match run_to_steady_state(&ss, nl, inp, dt, periods, settings.steady_tol) {
        Ok(st) => Ok(InputOutcome {
            output_rms: st.rms,
            gain: if base.input_rms > 0.0 { st.rms / base.input_rms } else { 0.0 },
            output_sup: st.sup,
            converged: st.converged,
            diverged: false,
            periods_used: st.periods_used,
            ..base
        }),
        Err(Error::Diverged { .. }) => Ok(base),
        Err(e) => Err(e),
    }
}

/// Simulates random inputs at a seeded selection of feasible records and
/// checks `rms(y)/rms(u) <= gamma (1 + margin)` and
/// `sup|y| <= A_bound (1 + margin)`.
pub fn validate_surface(
    records: &[GainRecord],
    system: &TransferFunction,
    nl: &Nonlinearity,
    settings: &ValidationSettings,
) -> Result<ValidationReport> {
    if settings.points == 0 || settings.inputs_per_point == 0 {
        return Err(Error::InvalidInput(
            "validation needs at least one point and one input per point".into(),
        ));
    }
    let candidates: Vec<&GainRecord> = records
        .iter()
        .filter(|r| r.feasible && r.u > 0.0 && r.u.is_finite() && r.a_bound.is_finite())
        .collect();
    if candidates.is_empty() {
        return Err(Error::Precondition(
            "no feasible points with 0 < U < inf to validate".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut chosen = sample(&mut rng, candidates.len(), settings.points.min(candidates.len())).into_vec();
    chosen.sort_unstable();
    let points: Vec<&GainRecord> = chosen.iter().map(|&i| candidates[i]).collect();

    let jobs: Vec<(usize, PeriodicInput)> = points
        .iter()
        .enumerate()
        .flat_map(|(p, r)| {
            (0..settings.inputs_per_point)
                .map(|_| (p, random_input(&mut rng, r.omega, settings.energy_fraction * r.u)))
                .collect::<Vec<_>>()
        })
        .collect();
    let outcomes: Vec<(usize, InputOutcome)> = jobs
        .par_iter()
        .map(|(p, inp)| Ok((*p, simulate_one(system, nl, inp, settings)?)))
        .collect::<Result<_>>()?;

    let slack = 1.0 + settings.margin;
    let mut violations = Vec::new();
    let mut unconverged = 0;
    let mut reports: Vec<PointOutcome> = points
        .iter()
        .map(|r| PointOutcome {
            omega: r.omega,
            u: r.u,
            gamma: r.gamma,
            a_bound: r.a_bound,
            max_gain: 0.0,
            max_sup: 0.0,
            inputs: Vec::new(),
        })
        .collect();
    for (p, o) in outcomes {
        let rep = &mut reports[p];
        let mut flag = |kind, measured, bound| {
            violations.push(Violation {
                omega: rep.omega,
                u: rep.u,
                kind,
                measured,
                bound,
                input: o.input.clone(),
            })
        };
        if o.diverged {
            flag(ViolationKind::Divergence, f64::INFINITY, rep.a_bound);
        } else if !o.converged {
            unconverged += 1;
        } else {
            if o.gain > rep.gamma * slack {
                flag(ViolationKind::Gain, o.gain, rep.gamma);
            }
            if o.output_sup > rep.a_bound * slack {
                flag(ViolationKind::Amplitude, o.output_sup, rep.a_bound);
            }
            rep.max_gain = rep.max_gain.max(o.gain);
            rep.max_sup = rep.max_sup.max(o.output_sup);
        }
        rep.inputs.push(o);
    }
    Ok(ValidationReport {
        seed: settings.seed,
        margin: settings.margin,
        simulations: jobs.len(),
        unconverged,
        passed: violations.is_empty(),
        violations,
        points: reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_inputs_hit_target_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let inp = random_input(&mut rng, 1.7, 0.3);
            assert!((inp.harmonic_energy() - 0.3).abs() < 1e-12);
            assert!(!inp.terms.is_empty());
            assert!(inp.terms.iter().all(|t| t.k % 2 == 1 && t.k <= 5));
        }
    }

    #[test]
    fn zero_energy_rows_are_skipped() {
        let g = TransferFunction::new(vec![1.0], vec![2.0, 1.0]).unwrap();
        let row = GainRecord {
            omega: 1.0,
            u: 0.0,
            r_omega_a: 3.0,
            r_partial_omega_a: 3.0,
            a_bound: 0.0,
            gamma: 1.0 / 3.0,
            r_omega_inf: 1.8,
            r_partial_omega_inf: 1.2,
            bisection_iters: 0,
            feasible: true,
        };
        let err = validate_surface(&[row], &g, &Nonlinearity::Sine, &ValidationSettings::default());
        assert!(matches!(err, Err(Error::Precondition(_))));
    }
}
