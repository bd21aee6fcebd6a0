//! Static nonlinearities with amplitude-dependent slope and sector bounds.
//!
//! For an amplitude level `A`, the slope interval `[a(A), b(A)]` bounds
//! `(phi(x) - phi(y)) / (x - y)` and the sector interval `[c(A), d(A)]`
//! bounds `phi(x) / x`, both over `|x|, |y| <= A`. Passing
//! `f64::INFINITY` as the amplitude returns the exact asymptotes.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

pub type BoundFn = Arc<dyn Fn(f64) -> Interval + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Amplitude-dependent slope and sector bounds with their `A -> inf` limits.
#[derive(Clone)]
pub struct NonlinearityBounds {
    slope: BoundFn,
    sector: BoundFn,
    slope_limit: Interval,
    sector_limit: Interval,
}

impl fmt::Debug for NonlinearityBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearityBounds")
            .field("slope_limit", &self.slope_limit)
            .field("sector_limit", &self.sector_limit)
            .finish_non_exhaustive()
    }
}

/// Asymptotic bounds `(a*, b*, c*, d*)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Asymptotes {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl NonlinearityBounds {
    pub fn new(
        slope: impl Fn(f64) -> Interval + Send + Sync + 'static,
        sector: impl Fn(f64) -> Interval + Send + Sync + 'static,
        slope_limit: Interval,
        sector_limit: Interval,
    ) -> Self {
        NonlinearityBounds {
            slope: Arc::new(slope),
            sector: Arc::new(sector),
            slope_limit,
            sector_limit,
        }
    }

    /// Amplitude-independent bounds, e.g. for a linear gain.
    pub fn constant(slope: Interval, sector: Interval) -> Self {
        NonlinearityBounds::new(move |_| slope, move |_| sector, slope, sector)
    }

    /// `[a(A), b(A)]`.
    pub fn slope(&self, amplitude: f64) -> Interval {
        if amplitude.is_infinite() {
            self.slope_limit
        } else {
            (self.slope)(amplitude)
        }
    }

    /// `[c(A), d(A)]`.
    pub fn sector(&self, amplitude: f64) -> Interval {
        if amplitude.is_infinite() {
            self.sector_limit
        } else {
            (self.sector)(amplitude)
        }
    }

    pub fn asymptotes(&self) -> Asymptotes {
        Asymptotes {
            a: self.slope_limit.lo,
            b: self.slope_limit.hi,
            c: self.sector_limit.lo,
            d: self.sector_limit.hi,
        }
    }

    /// Checks the bounds against `phi` by dense sampling on `[-A, A]` for each
    /// amplitude in `amplitudes`. Returns the first violation found.
    pub fn verify_by_sampling(
        &self,
        phi: &dyn Fn(f64) -> f64,
        amplitudes: &[f64],
        samples: usize,
        tol: f64,
    ) -> std::result::Result<(), BoundViolation> {
        let m = samples.max(3);
        for &amp in amplitudes {
            let slope = self.slope(amp);
            let sector = self.sector(amp);
            let xs: Vec<f64> = (0..m)
                .map(|i| -amp + 2.0 * amp * i as f64 / (m - 1) as f64)
                .collect();
            for &x in &xs {
                if x != 0.0 {
                    let ratio = phi(x) / x;
                    if ratio < sector.lo - tol || ratio > sector.hi + tol {
                        return Err(BoundViolation::Sector { amplitude: amp, x, ratio });
                    }
                }
            }
            for w in xs.windows(2) {
                let (x, y) = (w[1], w[0]);
                if x != y {
                    let s = (phi(x) - phi(y)) / (x - y);
                    if s < slope.lo - tol || s > slope.hi + tol {
                        return Err(BoundViolation::Slope { amplitude: amp, x, y, slope: s });
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundViolation {
    Sector { amplitude: f64, x: f64, ratio: f64 },
    Slope { amplitude: f64, x: f64, y: f64, slope: f64 },
}

/// User-supplied nonlinearity.
#[derive(Clone)]
pub struct CustomNonlinearity {
    pub name: String,
    pub eval: ScalarFn,
    pub bounds: Option<NonlinearityBounds>,
    pub odd: bool,
}

#[derive(Clone)]
pub enum Nonlinearity {
    Sine,
    /// `clamp(x, -limit, limit)`.
    Saturation { limit: f64 },
    /// Zero on `|x| <= width`, then `x - width * sign(x)`.
    Deadzone { width: f64 },
    Custom(CustomNonlinearity),
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nonlinearity::Sine => write!(f, "Sine"),
            Nonlinearity::Saturation { limit } => write!(f, "Saturation {{ limit: {limit} }}"),
            Nonlinearity::Deadzone { width } => write!(f, "Deadzone {{ width: {width} }}"),
            Nonlinearity::Custom(c) => write!(f, "Custom({:?}, odd: {})", c.name, c.odd),
        }
    }
}

impl Nonlinearity {
    /// `phi(x) = gain * x`, with exact constant bounds.
    pub fn linear(gain: f64) -> Self {
        let iv = Interval::new(gain, gain);
        Nonlinearity::Custom(CustomNonlinearity {
            name: format!("linear({gain})"),
            eval: Arc::new(move |x| gain * x),
            bounds: Some(NonlinearityBounds::constant(iv, iv)),
            odd: true,
        })
    }

    pub fn identity() -> Self {
        Nonlinearity::linear(1.0)
    }

    pub fn name(&self) -> String {
        match self {
            Nonlinearity::Sine => "sine".into(),
            Nonlinearity::Saturation { limit } => format!("saturation({limit})"),
            Nonlinearity::Deadzone { width } => format!("deadzone({width})"),
            Nonlinearity::Custom(c) => c.name.clone(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Nonlinearity::Sine => x.sin(),
            Nonlinearity::Saturation { limit } => x.clamp(-limit, *limit),
            Nonlinearity::Deadzone { width } => {
                if x.abs() <= *width {
                    0.0
                } else {
                    x - width * x.signum()
                }
            }
            Nonlinearity::Custom(c) => (c.eval)(x),
        }
    }

    pub fn is_odd(&self) -> bool {
        match self {
            Nonlinearity::Custom(c) => c.odd,
            _ => true,
        }
    }

    pub fn bounds(&self) -> Result<NonlinearityBounds> {
        let unit = Interval::new(0.0, 1.0);
        match *self {
            Nonlinearity::Sine => {
                let c_star = sine_sector_floor();
                Ok(NonlinearityBounds::new(
                    sine_slope,
                    sine_sector,
                    Interval::new(-1.0, 1.0),
                    Interval::new(c_star, 1.0),
                ))
            }
            Nonlinearity::Saturation { limit } => Ok(NonlinearityBounds::new(
                move |a| {
                    if a <= limit {
                        Interval::new(1.0, 1.0)
                    } else {
                        unit
                    }
                },
                move |a| {
                    if a <= limit {
                        Interval::new(1.0, 1.0)
                    } else {
                        Interval::new(limit / a, 1.0)
                    }
                },
                unit,
                unit,
            )),
            Nonlinearity::Deadzone { width } => Ok(NonlinearityBounds::new(
                move |a| {
                    if a <= width {
                        Interval::new(0.0, 0.0)
                    } else {
                        unit
                    }
                },
                move |a| {
                    if a <= width {
                        Interval::new(0.0, 0.0)
                    } else {
                        Interval::new(0.0, (a - width) / a)
                    }
                },
                unit,
                unit,
            )),
            Nonlinearity::Custom(ref c) => c
                .bounds
                .clone()
                .ok_or_else(|| Error::MissingBounds(c.name.clone())),
        }
    }

    pub fn slope_bounds(&self, amplitude: f64) -> Result<Interval> {
        Ok(self.bounds()?.slope(amplitude))
    }

    pub fn sector_bounds(&self, amplitude: f64) -> Result<Interval> {
        Ok(self.bounds()?.sector(amplitude))
    }

    pub fn asymptotic_bounds(&self) -> Result<Asymptotes> {
        Ok(self.bounds()?.asymptotes())
    }
}

/// Global minimizer `A*` of `sin(A)/A` on `A >= 0`.
///
/// Found once as the root of `d/dA (sin A / A) = (A cos A - sin A) / A^2`
/// on `[pi, 3 pi / 2]`, where the numerator changes sign exactly once.
pub fn sine_sector_minimizer() -> f64 {
    static A_STAR: OnceLock<f64> = OnceLock::new();
    *A_STAR.get_or_init(|| {
        let g = |a: f64| a * a.cos() - a.sin();
        let (mut lo, mut hi) = (PI, 1.5 * PI);
        while hi - lo > 1e-13 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    })
}

/// `c* = sin(A*) / A*`.
pub fn sine_sector_floor() -> f64 {
    let a = sine_sector_minimizer();
    a.sin() / a
}

fn sine_slope(a: f64) -> Interval {
    if a <= PI {
        Interval::new(a.cos(), 1.0)
    } else {
        Interval::new(-1.0, 1.0)
    }
}

fn sine_sector(a: f64) -> Interval {
    if a == 0.0 {
        Interval::new(1.0, 1.0)
    } else if a <= sine_sector_minimizer() {
        Interval::new(a.sin() / a, 1.0)
    } else {
        Interval::new(sine_sector_floor(), 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation() {
        assert_eq!(Nonlinearity::Sine.eval(PI / 2.0), 1.0);
        assert_eq!(Nonlinearity::Sine.eval(0.0), 0.0);
        assert_eq!(Nonlinearity::Saturation { limit: 1.0 }.eval(3.0), 1.0);
        assert_eq!(Nonlinearity::Saturation { limit: 1.0 }.eval(-0.5), -0.5);
        assert_eq!(Nonlinearity::Deadzone { width: 1.0 }.eval(0.5), 0.0);
        assert_eq!(Nonlinearity::Deadzone { width: 1.0 }.eval(-3.0), -2.0);
        assert_eq!(Nonlinearity::identity().eval(1.5), 1.5);
    }

    #[test]
    fn sine_slope_formula() {
        let s = Nonlinearity::Sine;
        let half = s.slope_bounds(PI / 2.0).unwrap();
        assert!(half.lo.abs() < 1e-15 && half.hi == 1.0);
        assert_eq!(s.slope_bounds(2.0 * PI).unwrap(), Interval::new(-1.0, 1.0));
        assert_eq!(s.slope_bounds(0.0).unwrap(), Interval::new(1.0, 1.0));
    }

    #[test]
    fn sine_sector_formula() {
        let s = Nonlinearity::Sine;
        let at_pi = s.sector_bounds(PI).unwrap();
        assert!(at_pi.lo.abs() < 1e-15 && at_pi.hi == 1.0);
        let far = s.sector_bounds(10.0).unwrap();
        assert!((far.lo + 0.21723).abs() < 1e-4);
        assert_eq!(s.sector_bounds(0.0).unwrap(), Interval::new(1.0, 1.0));
        assert!((s.sector_bounds(1e-9).unwrap().lo - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sine_minimizer_matches_tan_fixed_point() {
        let a = sine_sector_minimizer();
        assert!((a - 4.4934).abs() < 1e-3);
        assert!((a.tan() - a).abs() < 1e-9);
        // Independent check: no grid point beats the computed minimum.
        let min = sine_sector_floor();
        for i in 1..200_000 {
            let x = i as f64 * 1e-4;
            assert!(x.sin() / x >= min - 1e-15);
        }
    }

    #[test]
    fn asymptotes() {
        let sine = Nonlinearity::Sine.asymptotic_bounds().unwrap();
        assert_eq!((sine.a, sine.b, sine.d), (-1.0, 1.0, 1.0));
        assert!((sine.c + 0.21723).abs() < 1e-4);

        let sat = Nonlinearity::Saturation { limit: 1.0 }.asymptotic_bounds().unwrap();
        assert_eq!(sat, Asymptotes { a: 0.0, b: 1.0, c: 0.0, d: 1.0 });
        // Dense sampling of phi(x)/x drifts toward 0 as the range grows.
        let floor = (1..=1000)
            .map(|i| i as f64 * 1000.0)
            .map(|x| x.clamp(-1.0, 1.0) / x)
            .fold(f64::INFINITY, f64::min);
        assert!(floor < 2e-6);

        let id = Nonlinearity::identity().asymptotic_bounds().unwrap();
        assert_eq!(id, Asymptotes { a: 1.0, b: 1.0, c: 1.0, d: 1.0 });
    }

    #[test]
    fn infinite_amplitude_is_the_asymptote() {
        let b = Nonlinearity::Sine.bounds().unwrap();
        assert_eq!(b.slope(f64::INFINITY), Interval::new(-1.0, 1.0));
        assert_eq!(b.sector(f64::INFINITY).lo, sine_sector_floor());
    }

    #[test]
    fn custom_without_bounds_errors() {
        let nl = Nonlinearity::Custom(CustomNonlinearity {
            name: "cubic".into(),
            eval: Arc::new(|x| x * x * x),
            bounds: None,
            odd: true,
        });
        assert!(matches!(nl.slope_bounds(1.0), Err(Error::MissingBounds(_))));
        assert!(matches!(nl.asymptotic_bounds(), Err(Error::MissingBounds(_))));
    }

    #[test]
    fn sampling_verification_catches_bad_bounds() {
        let wrong = NonlinearityBounds::constant(Interval::new(0.5, 1.0), Interval::new(0.5, 1.0));
        let err = wrong
            .verify_by_sampling(&|x: f64| x.sin(), &[3.0], 1001, 1e-9)
            .unwrap_err();
        assert!(matches!(err, BoundViolation::Sector { .. }));
        let good = Nonlinearity::Sine.bounds().unwrap();
        good.verify_by_sampling(&|x: f64| x.sin(), &[0.5, 3.0, 10.0], 2001, 1e-9)
            .unwrap();
    }
}
