use std::fmt;

use thiserror::Error;

/// Hypotheses that must hold before a gain surface can be certified.
#[derive(Debug, Clone, PartialEq)]
pub enum Hypothesis {
    /// `G` has a pole with real part `>= -1e-9`.
    Stable,
    /// `G` must have `deg(num) < deg(den)`.
    StrictlyProper,
    /// The nonlinearity must satisfy `phi(-x) = -phi(x)`.
    OddNonlinearity,
    /// The inverse SRG of `G` touches `-tau * D[a*, b*]`.
    PositiveMargin { tau: f64, margin: f64 },
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::Stable => write!(f, "G is not stable (pole with Re(p) >= 0)"),
            Hypothesis::StrictlyProper => write!(f, "G is not strictly proper"),
            Hypothesis::OddNonlinearity => write!(f, "the nonlinearity is not flagged odd"),
            Hypothesis::PositiveMargin { tau, margin } => write!(
                f,
                "well-posedness margin {margin:.3e} is not positive at tau = {tau}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid transfer function: {0}")]
    InvalidSystem(String),

    #[error("G(j omega) has a pole on the imaginary axis at omega = {omega}")]
    PoleOnAxis { omega: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate closed loop: {0}")]
    DegenerateLoop(String),

    #[error("invalid interval: alpha = {alpha} exceeds beta = {beta}")]
    InvalidInterval { alpha: f64, beta: f64 },

    #[error("cannot build a hull from an empty point set")]
    EmptyPointSet,

    #[error("nonlinearity `{0}` does not provide slope/sector bound functions")]
    MissingBounds(String),

    #[error("certification failed: {0}")]
    Certification(Hypothesis),

    #[error("simulation diverged at t = {time} (state norm {norm:.3e})")]
    Diverged { time: f64, norm: f64 },

    #[error("invalid input signal: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
