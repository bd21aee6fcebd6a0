//! Rational SISO LTI systems.
//!
//! Polynomials are stored in ascending powers of `s` with trailing zeros
//! stripped, so `[2.0, 1.0]` is `s + 2`. Everything here is a pure function
//! of immutable inputs.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real part above which a root counts as unstable.
pub const STABILITY_MARGIN: f64 = -1e-9;

/// Relative harmonic tail tolerance: samples are cut once they fall below
/// this fraction of the largest of the first five odd harmonics.
pub const DEFAULT_TAIL_REL_TOL: f64 = 1e-3;

/// Default cap on the odd harmonic index.
pub const DEFAULT_K_CAP: usize = 10_001;

/// Real polynomial in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial(Vec<f64>);

impl Polynomial {
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Self {
        let mut c = coeffs.into();
        while c.last() == Some(&0.0) {
            c.pop();
        }
        Polynomial(c)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.0.last().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    pub fn scale(&self, k: f64) -> Polynomial {
        Polynomial::new(self.0.iter().map(|c| c * k).collect::<Vec<_>>())
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.0.len().max(other.0.len());
        let sum: Vec<f64> = (0..n)
            .map(|i| self.0.get(i).copied().unwrap_or(0.0) + other.0.get(i).copied().unwrap_or(0.0))
            .collect();
        Polynomial::new(sum)
    }

    /// Roots from the eigenvalues of the companion matrix.
    pub fn roots(&self) -> Vec<Complex64> {
        let n = match self.degree() {
            Some(n) if n > 0 => n,
            _ => return Vec::new(),
        };
        let lead = self.leading();
        let mut companion = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            companion[(i, n - 1)] = -self.0[i] / lead;
        }
        companion.complex_eigenvalues().iter().copied().collect()
    }
}

/// Proper rational transfer function `G(s) = num(s) / den(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    num: Polynomial,
    den: Polynomial,
}

/// Outcome of [`TransferFunction::check_stability`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StabilityReport {
    pub stable: bool,
    pub proper: bool,
    pub strictly_proper: bool,
}

/// Controllable canonical realization `(A, B, C, D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
    pub d: f64,
}

/// Odd-harmonic frequency response samples `G(jk omega)`, `k = 1, 3, 5, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSamples {
    pub omega: f64,
    /// Samples in harmonic order, followed by `0` when `G` is strictly proper.
    pub points: Vec<Complex64>,
    /// Highest harmonic index included.
    pub last_k: usize,
    /// Set when `k_cap` was hit before the tail dropped below tolerance.
    pub truncated: bool,
}

impl TransferFunction {
    /// Builds `num/den` from ascending coefficient lists.
    ///
    /// The denominator must be non-zero and `deg(num) <= deg(den)`.
    pub fn new(num: impl Into<Vec<f64>>, den: impl Into<Vec<f64>>) -> Result<Self> {
        let num = Polynomial::new(num);
        let den = Polynomial::new(den);
        if den.is_zero() {
            return Err(Error::InvalidSystem(
                "denominator is empty or identically zero".into(),
            ));
        }
        if num.coeffs().iter().chain(den.coeffs()).any(|c| !c.is_finite()) {
            return Err(Error::InvalidSystem("coefficients must be finite".into()));
        }
        if num.degree().unwrap_or(0) > den.degree().unwrap_or(0) {
            return Err(Error::InvalidSystem(format!(
                "improper: numerator degree {} exceeds denominator degree {}",
                num.degree().unwrap_or(0),
                den.degree().unwrap_or(0)
            )));
        }
        Ok(TransferFunction { num, den })
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn order(&self) -> usize {
        self.den.degree().unwrap_or(0)
    }

    pub fn is_strictly_proper(&self) -> bool {
        match self.num.degree() {
            None => true,
            Some(d) => d < self.order(),
        }
    }

    /// Evaluates `G` at an arbitrary complex frequency.
    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        let den = self.den.eval(s);
        if den.norm() == 0.0 {
            return Err(Error::PoleOnAxis { omega: s.im });
        }
        Ok(self.num.eval(s) / den)
    }

    /// Frequency response `G(j omega)`.
    pub fn eval_freq(&self, omega: f64) -> Result<Complex64> {
        self.eval(Complex64::new(0.0, omega))
    }

    pub fn poles(&self) -> Vec<Complex64> {
        self.den.roots()
    }

    pub fn check_stability(&self) -> StabilityReport {
        let stable = self.poles().iter().all(|p| p.re < STABILITY_MARGIN);
        StabilityReport {
            stable,
            proper: true,
            strictly_proper: self.is_strictly_proper(),
        }
    }

    /// Default tail tolerance for [`odd_harmonic_samples`](Self::odd_harmonic_samples):
    /// a fixed fraction of the largest response among `k = 1, 3, ..., 9`.
    pub fn default_tail_tol(&self, omega: f64) -> Result<f64> {
        self.tail_tol(omega, DEFAULT_TAIL_REL_TOL)
    }

    /// `rel_tol * max_{k = 1, 3, ..., 9} |G(jk omega)|`.
    pub fn tail_tol(&self, omega: f64, rel_tol: f64) -> Result<f64> {
        let mut peak: f64 = 0.0;
        for k in (1..=9).step_by(2) {
            peak = peak.max(self.eval_freq(k as f64 * omega)?.norm());
        }
        Ok(rel_tol * peak)
    }

    /// Samples `G(jk omega)` for odd `k` until the magnitude drops below
    /// `tail_tol` or `k` exceeds `k_cap`. The first harmonic is always kept,
    /// and the limit point `G(j inf) = 0` is appended for strictly proper `G`.
    pub fn odd_harmonic_samples(
        &self,
        omega: f64,
        tail_tol: f64,
        k_cap: usize,
    ) -> Result<HarmonicSamples> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Precondition(format!(
                "harmonic sampling needs omega > 0, got {omega}"
            )));
        }
        if !(tail_tol > 0.0) {
            return Err(Error::Precondition(format!(
                "tail tolerance must be positive, got {tail_tol}"
            )));
        }
        let mut points = Vec::new();
        let mut last_k = 1;
        let mut truncated = false;
        let mut k = 1;
        loop {
            if k > k_cap.max(1) {
                truncated = true;
                break;
            }
            let g = self.eval_freq(k as f64 * omega)?;
            if k > 1 && g.norm() < tail_tol {
                break;
            }
            points.push(g);
            last_k = k;
            k += 2;
        }
        if self.is_strictly_proper() {
            points.push(Complex64::new(0.0, 0.0));
        }
        Ok(HarmonicSamples {
            omega,
            points,
            last_k,
            truncated,
        })
    }

    /// Samples with the default tail tolerance and harmonic cap.
    pub fn odd_harmonic_samples_default(&self, omega: f64) -> Result<HarmonicSamples> {
        let tol = self.default_tail_tol(omega)?;
        self.odd_harmonic_samples(omega, tol, DEFAULT_K_CAP)
    }

    /// Controllable canonical realization.
    pub fn to_state_space(&self) -> StateSpace {
        let n = self.order();
        let lead = self.den.leading();
        let den: Vec<f64> = self.den.coeffs().iter().map(|c| c / lead).collect();
        let mut num: Vec<f64> = self.num.coeffs().iter().map(|c| c / lead).collect();
        num.resize(n + 1, 0.0);

        // Split off the feedthrough so that the remainder is strictly proper.
        let d = num[n];
        let residual: Vec<f64> = (0..n).map(|i| num[i] - d * den[i]).collect();

        let mut a = DMatrix::<f64>::zeros(n, n);
        for i in 0..n.saturating_sub(1) {
            a[(i, i + 1)] = 1.0;
        }
        if n > 0 {
            for j in 0..n {
                a[(n - 1, j)] = -den[j];
            }
        }
        let mut b = DVector::<f64>::zeros(n);
        if n > 0 {
            b[n - 1] = 1.0;
        }
        let c = DVector::from_vec(residual);
        StateSpace { a, b, c, d }
    }

    /// Closed loop `G / (1 + slope * G)`, normalized to a monic denominator.
    pub fn linearized_loop(&self, slope: f64) -> Result<TransferFunction> {
        let den = self.den.add(&self.num.scale(slope));
        if den.is_zero() {
            return Err(Error::DegenerateLoop(format!(
                "1 + {slope} G(s) vanishes identically"
            )));
        }
        if self.num.degree().unwrap_or(0) > den.degree().unwrap_or(0) {
            return Err(Error::DegenerateLoop(format!(
                "leading coefficients cancel at slope {slope}; the closed loop is improper"
            )));
        }
        let lead = den.leading();
        TransferFunction::new(
            self.num.scale(1.0 / lead).coeffs().to_vec(),
            den.scale(1.0 / lead).coeffs().to_vec(),
        )
    }
}

impl StateSpace {
    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `C (sI - A)^{-1} B + D`.
    pub fn eval(&self, s: Complex64) -> Option<Complex64> {
        let n = self.dim();
        if n == 0 {
            return Some(Complex64::new(self.d, 0.0));
        }
        let m = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
            let diag = if i == j { s } else { Complex64::new(0.0, 0.0) };
            diag - Complex64::new(self.a[(i, j)], 0.0)
        });
        let rhs = DVector::<Complex64>::from_fn(n, |i, _| Complex64::new(self.b[i], 0.0));
        let x = m.lu().solve(&rhs)?;
        let y = (0..n).fold(Complex64::new(0.0, 0.0), |acc, i| acc + x[i] * self.c[i]);
        Some(y + self.d)
    }

    pub fn eval_freq(&self, omega: f64) -> Option<Complex64> {
        self.eval(Complex64::new(0.0, omega))
    }

    /// Largest eigenvalue magnitude of `A`.
    pub fn fastest_mode(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        self.a
            .complex_eigenvalues()
            .iter()
            .map(|l| l.norm())
            .fold(0.0, f64::max)
    }
}
