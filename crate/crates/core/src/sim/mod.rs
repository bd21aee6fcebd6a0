//! Time-domain oracle: periodic inputs, RK4 simulation of the closed loop,
//! steady-state extraction and surface validation.

mod input;
mod lure;
mod validate;

pub use input::{harmonic_energy, render_input, rms, HarmonicTerm, PeriodicInput};
pub use lure::{
    default_dt, extract_steady_state, loop_rate, run_to_steady_state, simulate_lure, SimResult,
    SteadyState, DEFAULT_MAX_PERIODS, DEFAULT_STEADY_TOL, DIVERGENCE_NORM,
};
pub use validate::{
    random_input, validate_surface, InputOutcome, PointOutcome, ValidationReport,
    ValidationSettings, Violation, ViolationKind,
};
