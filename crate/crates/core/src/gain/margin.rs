//! Distances between inverted SRGs of `G` and negated nonlinearity disks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Hypothesis, Result};
use crate::geometry::{dist_region_disk, hco, HyperbolicRegion, IntervalDisk};
use crate::lti::{TransferFunction, DEFAULT_K_CAP, DEFAULT_TAIL_REL_TOL};
use crate::nonlinearity::{Interval, Nonlinearity, NonlinearityBounds};

/// Truncation of the odd-harmonic response sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicSettings {
    /// Tail cut as a fraction of `max_{k <= 9} |G(jk omega)|`.
    pub rel_tol: f64,
    pub k_cap: usize,
}

impl Default for HarmonicSettings {
    fn default() -> Self {
        HarmonicSettings {
            rel_tol: DEFAULT_TAIL_REL_TOL,
            k_cap: DEFAULT_K_CAP,
        }
    }
}

/// Log-spaced frequency sweep used to approximate the full Nyquist diagram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NyquistSweep {
    pub points: usize,
    /// The sweep spans `omega_c * 10^[-decades, decades]`.
    pub decades: f64,
}

impl Default for NyquistSweep {
    fn default() -> Self {
        NyquistSweep {
            points: 2000,
            decades: 4.0,
        }
    }
}

/// Result of the tau-homotopy check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellPosedness {
    /// Minimum distance over the tau grid.
    pub margin: f64,
    pub tau_at_min: f64,
    pub tau_steps: usize,
    /// The grid minimum is attained at `tau > 0`. A minimum at `tau = 0`
    /// means the loop without nonlinearity is the binding case.
    pub minimizer_ok: bool,
}

/// Stability, properness and oddness requirements for certification.
pub fn check_hypotheses(g: &TransferFunction, nl: &Nonlinearity) -> Result<()> {
    check_system(g)?;
    if !nl.is_odd() {
        return Err(Error::Certification(Hypothesis::OddNonlinearity));
    }
    Ok(())
}

fn check_system(g: &TransferFunction) -> Result<()> {
    let report = g.check_stability();
    if !report.stable {
        return Err(Error::Certification(Hypothesis::Stable));
    }
    if !report.strictly_proper {
        return Err(Error::Certification(Hypothesis::StrictlyProper));
    }
    Ok(())
}

/// Frequency response over a log sweep around the geometric mean of the
/// pole magnitudes, plus the limit points `G(0)` and `G(j inf)`.
pub fn full_nyquist_points(g: &TransferFunction, sweep: &NyquistSweep) -> Result<Vec<Complex64>> {
    let poles = g.poles();
    let omega_c = if poles.is_empty() {
        1.0
    } else {
        let log_mean = poles.iter().map(|p| p.norm().ln()).sum::<f64>() / poles.len() as f64;
        log_mean.exp()
    };
    let n = sweep.points.max(2);
    let mut points = Vec::with_capacity(n + 2);
    points.push(g.eval_freq(0.0)?);
    for i in 0..n {
        let e = -sweep.decades + 2.0 * sweep.decades * i as f64 / (n - 1) as f64;
        points.push(g.eval_freq(omega_c * 10f64.powf(e))?);
    }
    let at_infinity = if g.is_strictly_proper() {
        0.0
    } else {
        g.num().leading() / g.den().leading()
    };
    points.push(Complex64::new(at_infinity, 0.0));
    Ok(points)
}

/// `SRG(G)^{-1}` from the full Nyquist sweep.
pub fn inverse_full_srg(g: &TransferFunction, sweep: &NyquistSweep) -> Result<HyperbolicRegion> {
    Ok(hco(&full_nyquist_points(g, sweep)?)?.inverted())
}

/// Distance from a region to `-D[lo, hi]`.
pub fn margin_to(region: &HyperbolicRegion, interval: Interval) -> f64 {
    let disk = IntervalDisk::new(-interval.hi, -interval.lo)
        .expect("bound intervals satisfy lo <= hi");
    dist_region_disk(region, &disk)
}

/// Inverted SRG of `G` restricted to odd-harmonic inputs at one frequency.
#[derive(Debug, Clone)]
pub struct FrequencySlice {
    pub omega: f64,
    pub inverse_srg: HyperbolicRegion,
    /// The harmonic cap cut the sequence before the tail tolerance.
    pub truncated: bool,
}

impl FrequencySlice {
    pub fn new(g: &TransferFunction, omega: f64, settings: &HarmonicSettings) -> Result<Self> {
        let tail_tol = g.tail_tol(omega, settings.rel_tol)?;
        let samples = g.odd_harmonic_samples(omega, tail_tol, settings.k_cap)?;
        Ok(FrequencySlice {
            omega,
            inverse_srg: hco(&samples.points)?.inverted(),
            truncated: samples.truncated,
        })
    }

    /// `dist(SRG_{U_omega}(G)^{-1}, -D[lo, hi])`.
    pub fn margin(&self, interval: Interval) -> f64 {
        margin_to(&self.inverse_srg, interval)
    }
}

/// `r_{omega}` for an arbitrary bound interval, with default harmonic settings.
pub fn margin_at(g: &TransferFunction, omega: f64, interval: Interval) -> Result<f64> {
    if !(interval.lo <= interval.hi) {
        return Err(Error::InvalidInterval {
            alpha: interval.lo,
            beta: interval.hi,
        });
    }
    Ok(FrequencySlice::new(g, omega, &HarmonicSettings::default())?.margin(interval))
}

/// Minimum over a uniform tau grid of `dist(SRG(G)^{-1}, -tau D[a*, b*])`.
pub fn wellposedness_margin(
    g: &TransferFunction,
    bounds: &NonlinearityBounds,
    tau_steps: usize,
) -> Result<WellPosedness> {
    wellposedness_margin_with(g, bounds, tau_steps, &NyquistSweep::default(), 0.0)
}

pub fn wellposedness_margin_with(
    g: &TransferFunction,
    bounds: &NonlinearityBounds,
    tau_steps: usize,
    sweep: &NyquistSweep,
    zero_tol: f64,
) -> Result<WellPosedness> {
    check_system(g)?;
    if tau_steps < 2 {
        return Err(Error::Precondition(format!(
            "tau grid needs at least 2 points, got {tau_steps}"
        )));
    }
    let inverse = inverse_full_srg(g, sweep)?;
    let slope = bounds.slope(f64::INFINITY);
    let disk = IntervalDisk::new(slope.lo, slope.hi)?;
    let (mut margin, mut tau_at_min) = (f64::INFINITY, 0.0);
    for i in 0..tau_steps {
        let tau = i as f64 / (tau_steps - 1) as f64;
        let d = dist_region_disk(&inverse, &disk.scaled_negated(tau));
        if d < margin {
            margin = d;
            tau_at_min = tau;
        }
    }
    if margin <= zero_tol {
        return Err(Error::Certification(Hypothesis::PositiveMargin {
            tau: tau_at_min,
            margin,
        }));
    }
    Ok(WellPosedness {
        margin,
        tau_at_min,
        tau_steps,
        minimizer_ok: tau_at_min > 0.0,
    })
}

/// `1 / dist(SRG(G)^{-1}, -D[c*, d*])`, infinite when the sets touch.
pub fn global_l2_gain(g: &TransferFunction, nl: &Nonlinearity) -> Result<f64> {
    check_hypotheses(g, nl)?;
    let bounds = nl.bounds()?;
    wellposedness_margin(g, &bounds, 101)?;
    let inverse = inverse_full_srg(g, &NyquistSweep::default())?;
    let r = margin_to(&inverse, bounds.sector(f64::INFINITY));
    Ok(if r > 0.0 { 1.0 / r } else { f64::INFINITY })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plant() -> TransferFunction {
        TransferFunction::new(vec![1.0], vec![2.0, 1.0]).unwrap()
    }

    #[test]
    fn sine_wellposedness() {
        let b = Nonlinearity::Sine.bounds().unwrap();
        let wp = wellposedness_margin(&plant(), &b, 101).unwrap();
        assert!((wp.margin - 1.0).abs() < 1e-3, "{wp:?}");
        assert_eq!(wp.tau_at_min, 1.0);
        assert!(wp.minimizer_ok);
    }

    #[test]
    fn identity_wellposedness() {
        let b = Nonlinearity::identity().bounds().unwrap();
        let wp = wellposedness_margin(&plant(), &b, 11).unwrap();
        // tau = 0 shrinks the point disk to the origin, 2 away from Re z = 2.
        assert!((wp.margin - 2.0).abs() < 1e-3);
        assert_eq!(wp.tau_at_min, 0.0);
        assert!(!wp.minimizer_ok);
    }

    #[test]
    fn unstable_plant_rejected() {
        let g = TransferFunction::new(vec![1.0], vec![-1.0, 1.0]).unwrap();
        let b = Nonlinearity::Sine.bounds().unwrap();
        assert_eq!(
            wellposedness_margin(&g, &b, 101).unwrap_err(),
            Error::Certification(Hypothesis::Stable)
        );
        assert!(global_l2_gain(&g, &Nonlinearity::Sine).is_err());
    }

    #[test]
    fn touching_disk_fails_certification() {
        // 1/(s+2) inverted is Re z = 2; -D[-2, 1] = D[-1, 2] touches it.
        let b = NonlinearityBounds::constant(Interval::new(-2.0, 1.0), Interval::new(0.0, 1.0));
        match wellposedness_margin(&plant(), &b, 101) {
            Err(Error::Certification(Hypothesis::PositiveMargin { tau, margin })) => {
                assert_eq!(tau, 1.0);
                assert!(margin.abs() < 1e-12);
            }
            other => panic!("expected a margin failure, got {other:?}"),
        }
    }

    #[test]
    fn harmonic_margins_at_two_rad_per_second() {
        let g = plant();
        let c_star = crate::nonlinearity::sine_sector_floor();
        let sector = margin_at(&g, 2.0, Interval::new(c_star, 1.0)).unwrap();
        let center = -0.5 * (1.0 + c_star);
        let radius = 0.5 * (1.0 - c_star);
        let analytic = ((2.0 - center).powi(2) + 4.0).sqrt() - radius;
        assert!((sector - analytic).abs() < 1e-9, "{sector} vs {analytic}");
        assert!((sector - 2.5089).abs() < 2e-2);

        let slope = margin_at(&g, 2.0, Interval::new(-1.0, 1.0)).unwrap();
        assert!((slope - (8f64.sqrt() - 1.0)).abs() < 1e-9);

        let point = margin_at(&g, 2.0, Interval::new(1.0, 1.0)).unwrap();
        assert!((point - 13f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn global_gains() {
        let sine = global_l2_gain(&plant(), &Nonlinearity::Sine).unwrap();
        assert!((sine - 1.0 / 1.78277).abs() < 1e-2 * 0.5609);
        let id = global_l2_gain(&plant(), &Nonlinearity::identity()).unwrap();
        assert!((id - 1.0 / 3.0).abs() < 1e-3);
    }
}
