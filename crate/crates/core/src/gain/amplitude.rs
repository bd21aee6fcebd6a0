//! Self-consistent amplitude bound via bisection.
//!
//! For harmonic energy `U` the output amplitude satisfies
//! `A <= sqrt(2 lambda(A) lambda_d(A) U)`, where `lambda = 1 / r` uses the
//! sector margin and `lambda_d = 1 / r_d` the slope margin at amplitude `A`.
//! The smallest `A` for which this holds is the certified bound.

use serde::{Deserialize, Serialize};

use super::margin::{check_hypotheses, FrequencySlice, HarmonicSettings};
use crate::error::Result;
use crate::lti::TransferFunction;
use crate::nonlinearity::{Nonlinearity, NonlinearityBounds};

/// Default absolute bisection tolerance in `A`.
pub const DEFAULT_BISECTION_TOL: f64 = 1e-4;
/// Default bisection iteration cap.
pub const DEFAULT_MAX_ITER: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeBound {
    /// `A_{omega,U}`; infinite when no amplitude bound exists.
    pub a_bound: f64,
    pub iterations: usize,
    pub feasible: bool,
    /// Upper end of the bracket, `sqrt(2 U / (r_inf r_d_inf))`.
    pub a_max: f64,
}

/// Amplitude problem at one frequency.
#[derive(Debug, Clone)]
pub struct AmplitudeProblem<'a> {
    slice: &'a FrequencySlice,
    bounds: &'a NonlinearityBounds,
    zero_tol: f64,
    r_inf: f64,
    r_partial_inf: f64,
}

impl<'a> AmplitudeProblem<'a> {
    /// `zero_tol` is the distance at or below which a margin counts as zero.
    pub fn new(slice: &'a FrequencySlice, bounds: &'a NonlinearityBounds, zero_tol: f64) -> Self {
        let r_inf = slice.margin(bounds.sector(f64::INFINITY));
        let r_partial_inf = slice.margin(bounds.slope(f64::INFINITY));
        AmplitudeProblem {
            slice,
            bounds,
            zero_tol,
            r_inf,
            r_partial_inf,
        }
    }

    pub fn slice(&self) -> &FrequencySlice {
        self.slice
    }

    /// `r_omega` with the asymptotic sector bounds.
    pub fn r_inf(&self) -> f64 {
        self.r_inf
    }

    /// `r_d_omega` with the asymptotic slope bounds.
    pub fn r_partial_inf(&self) -> f64 {
        self.r_partial_inf
    }

    /// `(r_{omega,A}, r_d_{omega,A})`.
    pub fn margins(&self, amplitude: f64) -> (f64, f64) {
        (
            self.slice.margin(self.bounds.sector(amplitude)),
            self.slice.margin(self.bounds.slope(amplitude)),
        )
    }

    /// `sqrt(2 lambda_{omega,A} lambda_d_{omega,A} U) <= A`.
    pub fn predicate(&self, amplitude: f64, u: f64) -> bool {
        let (r, rp) = self.margins(amplitude);
        if r <= self.zero_tol || rp <= self.zero_tol {
            return false;
        }
        (2.0 * u / (r * rp)).sqrt() <= amplitude
    }

    /// `sqrt(2 U / (r_inf r_d_inf))`, infinite when either margin vanishes.
    pub fn a_max(&self, u: f64) -> f64 {
        if self.r_inf <= self.zero_tol || self.r_partial_inf <= self.zero_tol {
            return f64::INFINITY;
        }
        (2.0 * u / (self.r_inf * self.r_partial_inf)).sqrt()
    }

    /// Bisection on `[0, A_max]` down to `tol`.
    pub fn solve(&self, u: f64, tol: f64, max_iter: usize) -> AmplitudeBound {
        let a_max = self.a_max(u);
        if u == 0.0 {
            return AmplitudeBound {
                a_bound: 0.0,
                iterations: 0,
                feasible: true,
                a_max,
            };
        }
        if a_max.is_infinite() {
            // Either the asymptotic margins vanish or U is unbounded; only
            // the latter leaves a certificate through the A-independent bound.
            return AmplitudeBound {
                a_bound: f64::INFINITY,
                iterations: 0,
                feasible: self.r_inf > self.zero_tol && self.r_partial_inf > self.zero_tol,
                a_max,
            };
        }
        if !self.predicate(a_max, u) {
            return AmplitudeBound {
                a_bound: a_max,
                iterations: 0,
                feasible: false,
                a_max,
            };
        }
        let (mut lo, mut hi) = (0.0, a_max);
        let mut iterations = 0;
        while hi - lo > tol && iterations < max_iter {
            let mid = 0.5 * (lo + hi);
            if self.predicate(mid, u) {
                hi = mid;
            } else {
                lo = mid;
            }
            iterations += 1;
        }
        AmplitudeBound {
            a_bound: hi,
            iterations,
            feasible: true,
            a_max,
        }
    }
}

/// `A_{omega,U}` for a single frequency and energy level, with default
/// harmonic truncation.
pub fn amplitude_fixed_point(
    g: &TransferFunction,
    nl: &Nonlinearity,
    omega: f64,
    u: f64,
    tol: f64,
) -> Result<AmplitudeBound> {
    check_hypotheses(g, nl)?;
    if !(u >= 0.0) {
        return Err(crate::Error::Precondition(format!(
            "harmonic energy must be non-negative, got {u}"
        )));
    }
    if !(tol > 0.0) {
        return Err(crate::Error::Precondition(format!(
            "bisection tolerance must be positive, got {tol}"
        )));
    }
    let bounds = nl.bounds()?;
    let slice = FrequencySlice::new(g, omega, &HarmonicSettings::default())?;
    let problem = AmplitudeProblem::new(&slice, &bounds, crate::geometry::GEOMETRY_TOL);
    Ok(problem.solve(u, tol, DEFAULT_MAX_ITER))
}
