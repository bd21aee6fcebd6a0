use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Disk `D[alpha, beta]`: centered on the real axis and meeting it in
/// `[alpha, beta]`. A point when `alpha == beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalDisk {
    alpha: f64,
    beta: f64,
}

impl IntervalDisk {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha <= beta) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidInterval { alpha, beta });
        }
        Ok(IntervalDisk { alpha, beta })
    }

    pub fn point(x: f64) -> Self {
        IntervalDisk { alpha: x, beta: x }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.alpha + self.beta)
    }

    pub fn radius(&self) -> f64 {
        0.5 * (self.beta - self.alpha)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center()).norm() <= self.radius()
    }

    /// `-tau * D[alpha, beta] = D[-tau beta, -tau alpha]`.
    pub fn scaled_negated(&self, tau: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&tau), "tau = {tau} outside [0, 1]");
        let (lo, hi) = (-tau * self.beta, -tau * self.alpha);
        // -0.0 from tau = 0 would make the point disk print oddly.
        IntervalDisk {
            alpha: lo + 0.0,
            beta: hi + 0.0,
        }
    }
}

pub fn disk_from_interval(alpha: f64, beta: f64) -> Result<IntervalDisk> {
    IntervalDisk::new(alpha, beta)
}

pub fn scaled_negated_disk(disk: &IntervalDisk, tau: f64) -> IntervalDisk {
    disk.scaled_negated(tau)
}
