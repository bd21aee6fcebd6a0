//! Certification engine: well-posedness, harmonic margins, amplitude bounds
//! and gain surfaces.

mod amplitude;
mod margin;
mod surface;

pub use amplitude::{
    amplitude_fixed_point, AmplitudeBound, AmplitudeProblem, DEFAULT_BISECTION_TOL,
    DEFAULT_MAX_ITER,
};
pub use margin::{
    check_hypotheses, full_nyquist_points, global_l2_gain, inverse_full_srg, margin_at,
    margin_to, wellposedness_margin, wellposedness_margin_with, FrequencySlice,
    HarmonicSettings, NyquistSweep, WellPosedness,
};
pub use surface::{
    analyze_point, gain_record, gain_surface, AnalysisConfig, FrequencyAsymptote, GainRecord,
    GainSurface, DEFAULT_TAU_STEPS,
};
