//! Odd-harmonic periodic inputs and periodic signal norms.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `amplitude * sin(k omega t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTerm {
    pub k: u32,
    pub amplitude: f64,
    pub phase: f64,
}

/// Finite sum of odd harmonics of `omega`; half-wave symmetric by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicInput {
    pub omega: f64,
    pub terms: Vec<HarmonicTerm>,
}

impl PeriodicInput {
    pub fn new(omega: f64, terms: Vec<HarmonicTerm>) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidInput(format!("omega must be positive, got {omega}")));
        }
        for t in &terms {
            if t.k % 2 == 0 {
                return Err(Error::InvalidInput(format!(
                    "harmonic index {} is not odd",
                    t.k
                )));
            }
            if !(t.amplitude.is_finite() && t.phase.is_finite()) {
                return Err(Error::InvalidInput("non-finite harmonic coefficient".into()));
            }
        }
        Ok(PeriodicInput { omega, terms })
    }

    pub fn sine(omega: f64, amplitude: f64) -> Result<Self> {
        PeriodicInput::new(
            omega,
            vec![HarmonicTerm {
                k: 1,
                amplitude,
                phase: 0.0,
            }],
        )
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    pub fn value(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|h| h.amplitude * (h.k as f64 * self.omega * t + h.phase).sin())
            .sum()
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|h| {
                let kw = h.k as f64 * self.omega;
                h.amplitude * kw * (kw * t + h.phase).cos()
            })
            .sum()
    }

    /// Phasors per distinct harmonic, merging repeated indices.
    fn phasors(&self) -> Vec<(u32, Complex64)> {
        let mut out: Vec<(u32, Complex64)> = Vec::new();
        for h in &self.terms {
            let c = Complex64::from_polar(h.amplitude, h.phase);
            match out.iter_mut().find(|(k, _)| *k == h.k) {
                Some((_, acc)) => *acc += c,
                None => out.push((h.k, c)),
            }
        }
        out
    }

    /// `||u||_T` from Parseval.
    pub fn norm_t(&self) -> f64 {
        let s: f64 = self.phasors().iter().map(|(_, c)| c.norm_sqr()).sum();
        (0.5 * self.period() * s).sqrt()
    }

    /// `||u'||_T` from Parseval.
    pub fn derivative_norm_t(&self) -> f64 {
        let s: f64 = self
            .phasors()
            .iter()
            .map(|(k, c)| (*k as f64 * self.omega).powi(2) * c.norm_sqr())
            .sum();
        (0.5 * self.period() * s).sqrt()
    }

    pub fn rms(&self) -> f64 {
        self.norm_t() / self.period().sqrt()
    }

    /// `U = ||u||_T ||u'||_T`, exact.
    pub fn harmonic_energy(&self) -> f64 {
        self.norm_t() * self.derivative_norm_t()
    }

    /// Multiplies every amplitude by `s`; the harmonic energy scales by `s^2`.
    pub fn scaled(&self, s: f64) -> PeriodicInput {
        PeriodicInput {
            omega: self.omega,
            terms: self
                .terms
                .iter()
                .map(|h| HarmonicTerm {
                    amplitude: h.amplitude * s,
                    ..*h
                })
                .collect(),
        }
    }
}

/// Samples `u(i dt)` for `i = 0..=round(n_periods T / dt)`.
pub fn render_input(inp: &PeriodicInput, dt: f64, n_periods: usize) -> Result<Vec<f64>> {
    let period = inp.period();
    if !(dt > 0.0 && dt <= period / 200.0) {
        return Err(Error::Precondition(format!(
            "dt = {dt} must be positive and at most T/200 = {}",
            period / 200.0
        )));
    }
    let n = (n_periods as f64 * period / dt).round() as usize;
    Ok((0..=n).map(|i| inp.value(i as f64 * dt)).collect())
}

/// `||u||_T ||u'||_T` from samples on a uniform grid: trapezoidal norms and
/// central differences.
///
/// When the samples span at least one period, the first period is treated as
/// periodic. Shorter records use one-sided differences at the ends.
pub fn harmonic_energy(samples: &[f64], dt: f64, period: f64) -> f64 {
    if samples.len() < 2 || !(dt > 0.0) {
        return 0.0;
    }
    let m = (period / dt).round() as usize;
    if m >= 2 && samples.len() >= m {
        let u = &samples[..m];
        let du: Vec<f64> = (0..m)
            .map(|i| (u[(i + 1) % m] - u[(i + m - 1) % m]) / (2.0 * dt))
            .collect();
        let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>() * dt;
        return (sq(u) * sq(&du)).sqrt();
    }
    let n = samples.len();
    let du: Vec<f64> = (0..n)
        .map(|i| match i {
            0 => (samples[1] - samples[0]) / dt,
            i if i == n - 1 => (samples[n - 1] - samples[n - 2]) / dt,
            i => (samples[i + 1] - samples[i - 1]) / (2.0 * dt),
        })
        .collect();
    let trap = |v: &[f64]| {
        let inner: f64 = v.iter().map(|x| x * x).sum();
        (inner - 0.5 * (v[0] * v[0] + v[n - 1] * v[n - 1])) * dt
    };
    (trap(samples) * trap(&du)).sqrt()
}

/// Root-mean-square of samples on a uniform periodic grid.
pub fn rms(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    (samples.iter().map(|x| x * x).sum::<f64>() / samples.len() as f64).sqrt()
}
