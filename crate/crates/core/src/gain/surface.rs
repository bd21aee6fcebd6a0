//! Gain surfaces over `(omega, U)` grids.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::amplitude::{AmplitudeProblem, DEFAULT_BISECTION_TOL, DEFAULT_MAX_ITER};
use super::margin::{
    check_hypotheses, wellposedness_margin_with, FrequencySlice, HarmonicSettings, NyquistSweep,
    WellPosedness,
};
use crate::error::{Error, Result};
use crate::geometry::GEOMETRY_TOL;
use crate::lti::TransferFunction;
use crate::nonlinearity::{Nonlinearity, NonlinearityBounds};

/// Default tau grid size for the well-posedness sweep.
pub const DEFAULT_TAU_STEPS: usize = 101;

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub system: TransferFunction,
    pub nonlinearity: Nonlinearity,
    /// Strictly increasing, positive.
    pub omega_grid: Vec<f64>,
    /// Strictly increasing, non-negative. May end in `inf`.
    pub u_grid: Vec<f64>,
    pub tau_steps: usize,
    pub bisection_tol: f64,
    pub max_iter: usize,
    /// Margins at or below this count as zero.
    pub geometry_tol: f64,
    pub harmonics: HarmonicSettings,
    pub nyquist: NyquistSweep,
}

impl AnalysisConfig {
    pub fn new(
        system: TransferFunction,
        nonlinearity: Nonlinearity,
        omega_grid: Vec<f64>,
        u_grid: Vec<f64>,
    ) -> Self {
        AnalysisConfig {
            system,
            nonlinearity,
            omega_grid,
            u_grid,
            tau_steps: DEFAULT_TAU_STEPS,
            bisection_tol: DEFAULT_BISECTION_TOL,
            max_iter: DEFAULT_MAX_ITER,
            geometry_tol: GEOMETRY_TOL,
            harmonics: HarmonicSettings::default(),
            nyquist: NyquistSweep::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_grid("omega", &self.omega_grid, |w| w > 0.0 && w.is_finite())?;
        check_grid("U", &self.u_grid, |u| u >= 0.0)?;
        if self.tau_steps < 2 {
            return Err(Error::InvalidInput(format!(
                "tau_steps must be at least 2, got {}",
                self.tau_steps
            )));
        }
        if !(self.bisection_tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "bisection_tol must be positive, got {}",
                self.bisection_tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be positive".into()));
        }
        if !(self.geometry_tol >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "geometry_tol must be non-negative, got {}",
                self.geometry_tol
            )));
        }
        if !(self.harmonics.rel_tol > 0.0) || self.harmonics.k_cap == 0 {
            return Err(Error::InvalidInput(
                "harmonic truncation needs rel_tol > 0 and k_cap >= 1".into(),
            ));
        }
        if self.nyquist.points < 2 || !(self.nyquist.decades > 0.0) {
            return Err(Error::InvalidInput(
                "Nyquist sweep needs at least 2 points and decades > 0".into(),
            ));
        }
        Ok(())
    }
}

fn check_grid(name: &str, grid: &[f64], valid: impl Fn(f64) -> bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput(format!("{name} grid is empty")));
    }
    if let Some(&bad) = grid.iter().find(|&&x| !valid(x)) {
        return Err(Error::InvalidInput(format!("{name} grid contains invalid value {bad}")));
    }
    if let Some(w) = grid.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput(format!(
            "{name} grid must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// One `(omega, U)` point of the surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainRecord {
    pub omega: f64,
    #[serde(rename = "U")]
    pub u: f64,
    pub r_omega_a: f64,
    pub r_partial_omega_a: f64,
    pub a_bound: f64,
    pub gamma: f64,
    pub r_omega_inf: f64,
    pub r_partial_omega_inf: f64,
    pub bisection_iters: usize,
    pub feasible: bool,
}

/// The `U -> inf` column at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyAsymptote {
    pub omega: f64,
    pub r_omega_inf: f64,
    pub r_partial_omega_inf: f64,
    /// `gamma_omega = 1 / r_omega_inf`.
    pub gamma_inf: f64,
    /// The harmonic cap was hit at this frequency.
    pub truncated: bool,
}

#[derive(Debug, Clone)]
pub struct GainSurface {
    pub config: AnalysisConfig,
    pub wellposedness: WellPosedness,
    /// Row-major: all `U` for the first `omega`, then the next.
    pub records: Vec<GainRecord>,
    pub asymptotes: Vec<FrequencyAsymptote>,
}

impl GainSurface {
    pub fn record(&self, omega_index: usize, u_index: usize) -> &GainRecord {
        &self.records[omega_index * self.config.u_grid.len() + u_index]
    }

    /// Records at one frequency, in `U` order.
    pub fn column(&self, omega_index: usize) -> &[GainRecord] {
        let n = self.config.u_grid.len();
        &self.records[omega_index * n..(omega_index + 1) * n]
    }
}

fn reciprocal(r: f64, zero_tol: f64) -> f64 {
    if r > zero_tol {
        1.0 / r
    } else {
        f64::INFINITY
    }
}

/// Evaluates one grid point against a prepared amplitude problem.
pub fn gain_record(
    problem: &AmplitudeProblem<'_>,
    u: f64,
    bisection_tol: f64,
    max_iter: usize,
    zero_tol: f64,
) -> GainRecord {
    let amp = problem.solve(u, bisection_tol, max_iter);
    let (r, rp) = problem.margins(amp.a_bound);
    let mut gamma = reciprocal(r, zero_tol);
    let mut feasible = amp.feasible;
    if amp.feasible {
        if gamma.is_infinite() {
            feasible = false;
        }
    } else if amp.a_bound.is_finite() {
        // The bisection bracket failed; fall back to the A-independent gain.
        gamma = reciprocal(problem.r_inf(), zero_tol);
    }
    GainRecord {
        omega: problem.slice().omega,
        u,
        r_omega_a: r,
        r_partial_omega_a: rp,
        a_bound: amp.a_bound,
        gamma,
        r_omega_inf: problem.r_inf(),
        r_partial_omega_inf: problem.r_partial_inf(),
        bisection_iters: amp.iterations,
        feasible,
    }
}

/// Single-point analysis with the settings in `config`; grids are ignored.
pub fn analyze_point(config: &AnalysisConfig, omega: f64, u: f64) -> Result<(GainRecord, WellPosedness)> {
    let (bounds, wp) = certify(config)?;
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidInput(format!("omega must be positive, got {omega}")));
    }
    if !(u >= 0.0) {
        return Err(Error::InvalidInput(format!("U must be non-negative, got {u}")));
    }
    let slice = FrequencySlice::new(&config.system, omega, &config.harmonics)?;
    let problem = AmplitudeProblem::new(&slice, &bounds, config.geometry_tol);
    let record = gain_record(
        &problem,
        u,
        config.bisection_tol,
        config.max_iter,
        config.geometry_tol,
    );
    Ok((record, wp))
}

fn certify(config: &AnalysisConfig) -> Result<(NonlinearityBounds, WellPosedness)> {
    check_hypotheses(&config.system, &config.nonlinearity)?;
    let bounds = config.nonlinearity.bounds()?;
    let wp = wellposedness_margin_with(
        &config.system,
        &bounds,
        config.tau_steps,
        &config.nyquist,
        config.geometry_tol,
    )?;
    Ok((bounds, wp))
}

/// Certified gain and amplitude bounds over the full grid.
pub fn gain_surface(config: &AnalysisConfig) -> Result<GainSurface> {
    config.validate()?;
    let (bounds, wp) = certify(config)?;
    let columns: Vec<(FrequencyAsymptote, Vec<GainRecord>)> = config
        .omega_grid
        .par_iter()
        .map(|&omega| {
            let slice = FrequencySlice::new(&config.system, omega, &config.harmonics)?;
            let problem = AmplitudeProblem::new(&slice, &bounds, config.geometry_tol);
            let records = config
                .u_grid
                .iter()
                .map(|&u| {
                    gain_record(
                        &problem,
                        u,
                        config.bisection_tol,
                        config.max_iter,
                        config.geometry_tol,
                    )
                })
                .collect();
            let asymptote = FrequencyAsymptote {
                omega,
                r_omega_inf: problem.r_inf(),
                r_partial_omega_inf: problem.r_partial_inf(),
                gamma_inf: reciprocal(problem.r_inf(), config.geometry_tol),
                truncated: slice.truncated,
            };
            Ok((asymptote, records))
        })
        .collect::<Result<_>>()?;
    let mut records = Vec::with_capacity(config.omega_grid.len() * config.u_grid.len());
    let mut asymptotes = Vec::with_capacity(config.omega_grid.len());
    for (a, rs) in columns {
        asymptotes.push(a);
        records.extend(rs);
    }
    Ok(GainSurface {
        config: config.clone(),
        wellposedness: wp,
        records,
        asymptotes,
    })
}
