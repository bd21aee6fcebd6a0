//! Fixed-step RK4 integration of the Lur'e loop `x' = Ax + B(u - phi(Cx))`.

use serde::{Deserialize, Serialize};

use super::input::{rms, PeriodicInput};
use crate::error::{Error, Result};
use crate::lti::StateSpace;
use crate::nonlinearity::Nonlinearity;

/// State norm above which a run is declared divergent.
pub const DIVERGENCE_NORM: f64 = 1e9;
/// Default relative period-to-period tolerance for steady state.
pub const DEFAULT_STEADY_TOL: f64 = 1e-6;
/// Default cap on simulated periods.
pub const DEFAULT_MAX_PERIODS: usize = 200;
/// Upper bound on `dt * L` for the loop rate `L`, inside the RK4 real-axis
/// stability interval.
const RK4_STEP_LIMIT: f64 = 2.5;

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// Effective step, `T / steps_per_period`.
    pub dt: f64,
    pub steps_per_period: usize,
    pub times: Vec<f64>,
    pub u: Vec<f64>,
    pub e: Vec<f64>,
    pub y: Vec<f64>,
    /// Row-major `(times.len(), dim)` state trajectory.
    pub states: Vec<f64>,
    pub dim: usize,
}

impl SimResult {
    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    /// One period of the output, `steps_per_period` samples.
    pub period_samples: Vec<f64>,
    pub rms: f64,
    pub sup: f64,
    pub converged: bool,
    pub periods_used: usize,
}

/// Bound on the loop's rate of change: spectral radius of `A` plus the
/// feedback path `|B| |C| Lip(phi)`.
pub fn loop_rate(ss: &StateSpace, nl: &Nonlinearity) -> f64 {
    ss.fastest_mode() + ss.b.norm() * ss.c.norm() * lipschitz(nl)
}

fn lipschitz(nl: &Nonlinearity) -> f64 {
    nl.bounds()
        .map(|b| {
            let s = b.slope(f64::INFINITY);
            s.lo.abs().max(s.hi.abs())
        })
        .unwrap_or(1.0)
}

/// `min(T / 2000, 0.1 / L)`.
pub fn default_dt(ss: &StateSpace, nl: &Nonlinearity, period: f64) -> f64 {
    let rate = loop_rate(ss, nl);
    let dt = period / 2000.0;
    if rate > 0.0 {
        dt.min(0.1 / rate)
    } else {
        dt
    }
}

struct Integrator<'a> {
    n: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    nl: &'a Nonlinearity,
    inp: &'a PeriodicInput,
    dt: f64,
    m: usize,
    x: Vec<f64>,
    step: usize,
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl<'a> Integrator<'a> {
    fn new(
        ss: &StateSpace,
        nl: &'a Nonlinearity,
        inp: &'a PeriodicInput,
        dt: f64,
    ) -> Result<Self> {
        if ss.d != 0.0 {
            return Err(Error::Precondition(
                "simulation needs a strictly proper system (D = 0)".into(),
            ));
        }
        let period = inp.period();
        if !(dt > 0.0 && dt <= period / 200.0) {
            return Err(Error::Precondition(format!(
                "dt = {dt} must be positive and at most T/200 = {}",
                period / 200.0
            )));
        }
        let rate = loop_rate(ss, nl);
        if dt * rate > RK4_STEP_LIMIT {
            return Err(Error::Precondition(format!(
                "dt = {dt} too large for loop rate {rate}; need dt <= {}",
                RK4_STEP_LIMIT / rate
            )));
        }
        let n = ss.dim();
        let m = (period / dt).ceil() as usize;
        let a = (0..n * n).map(|i| ss.a[(i / n, i % n)]).collect();
        Ok(Integrator {
            n,
            a,
            b: ss.b.iter().copied().collect(),
            c: ss.c.iter().copied().collect(),
            nl,
            inp,
            dt: period / m as f64,
            m,
            x: vec![0.0; n],
            step: 0,
            k: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            tmp: vec![0.0; n],
        })
    }

    /// Input at `(step mod m + frac) dt`; the input is T-periodic, so
    /// reducing the step index keeps the discrete map exactly periodic.
    fn input(&self, frac: f64) -> f64 {
        let local = (self.step % self.m) as f64 + frac;
        self.inp.value(local * self.dt)
    }

    fn output(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    fn deriv(&self, x: &[f64], u: f64, out: &mut [f64]) {
        let e = u - self.nl.eval(self.output(x));
        for i in 0..self.n {
            let row = &self.a[i * self.n..(i + 1) * self.n];
            out[i] = row.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() + self.b[i] * e;
        }
    }

    /// `(u, e, y)` at the current state.
    fn signals(&self) -> (f64, f64, f64) {
        let u = self.input(0.0);
        let y = self.output(&self.x);
        (u, u - self.nl.eval(y), y)
    }

    fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    fn advance(&mut self) -> Result<()> {
        let (u0, u_half, u1) = (self.input(0.0), self.input(0.5), self.input(1.0));
        let h = self.dt;
        let mut k = std::mem::take(&mut self.k);
        let mut tmp = std::mem::take(&mut self.tmp);
        self.deriv(&self.x, u0, &mut k[0]);
        for (stage, (scale, u)) in [(0.5, u_half), (0.5, u_half), (1.0, u1)].into_iter().enumerate() {
            let (head, tail) = k.split_at_mut(stage + 1);
            for i in 0..self.n {
                tmp[i] = self.x[i] + scale * h * head[stage][i];
            }
            self.deriv(&tmp, u, &mut tail[0]);
        }
        for i in 0..self.n {
            self.x[i] += h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
        }
        self.k = k;
        self.tmp = tmp;
        self.step += 1;
        let norm = self.x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm <= DIVERGENCE_NORM) {
            return Err(Error::Diverged {
                time: self.time(),
                norm,
            });
        }
        Ok(())
    }
}

/// Integrates from `x(0) = 0` over `max_periods` periods, storing every step.
///
/// The step is shrunk so that an integer number of steps spans one period.
pub fn simulate_lure(
    ss: &StateSpace,
    nl: &Nonlinearity,
    inp: &PeriodicInput,
    dt: f64,
    max_periods: usize,
) -> Result<SimResult> {
    let mut it = Integrator::new(ss, nl, inp, dt)?;
    let total = it.m * max_periods;
    let mut res = SimResult {
        dt: it.dt,
        steps_per_period: it.m,
        times: Vec::with_capacity(total + 1),
        u: Vec::with_capacity(total + 1),
        e: Vec::with_capacity(total + 1),
        y: Vec::with_capacity(total + 1),
        states: Vec::with_capacity((total + 1) * it.n),
        dim: it.n,
    };
    loop {
        let (u, e, y) = it.signals();
        res.times.push(it.time());
        res.u.push(u);
        res.e.push(e);
        res.y.push(y);
        res.states.extend_from_slice(&it.x);
        if it.step == total {
            break;
        }
        it.advance()?;
    }
    Ok(res)
}

fn compare_windows(prev: &[f64], last: &[f64], tol: f64) -> bool {
    let diff: Vec<f64> = prev.iter().zip(last).map(|(a, b)| a - b).collect();
    let d = rms(&diff);
    d == 0.0 || d < tol * rms(last)
}

fn steady_from_window(window: &[f64], converged: bool, periods_used: usize) -> SteadyState {
    SteadyState {
        period_samples: window.to_vec(),
        rms: rms(window),
        sup: window.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
        converged,
        periods_used,
    }
}

/// Last full period of `y`, compared against the one before it.
pub fn extract_steady_state(sim: &SimResult, period: f64, tol: f64) -> SteadyState {
    let m = if sim.dt > 0.0 {
        (period / sim.dt).round() as usize
    } else {
        0
    };
    let periods = if m == 0 { 0 } else { (sim.y.len().saturating_sub(1)) / m };
    if periods == 0 {
        return steady_from_window(&sim.y, false, 0);
    }
    let last = &sim.y[(periods - 1) * m..periods * m];
    if periods < 3 {
        return steady_from_window(last, false, periods);
    }
    let prev = &sim.y[(periods - 2) * m..(periods - 1) * m];
    steady_from_window(last, compare_windows(prev, last, tol), periods)
}

/// Integrates period by period and stops at the first converged period
/// (never before the third), keeping only two windows in memory.
pub fn run_to_steady_state(
    ss: &StateSpace,
    nl: &Nonlinearity,
    inp: &PeriodicInput,
    dt: f64,
    max_periods: usize,
    tol: f64,
) -> Result<SteadyState> {
    let mut it = Integrator::new(ss, nl, inp, dt)?;
    let m = it.m;
    let mut prev = vec![0.0; m];
    let mut cur = vec![0.0; m];
    for p in 1..=max_periods.max(1) {
        for slot in cur.iter_mut() {
            *slot = it.signals().2;
            it.advance()?;
        }
        if p >= 3 && compare_windows(&prev, &cur, tol) {
            return Ok(steady_from_window(&cur, true, p));
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(steady_from_window(&prev, false, max_periods.max(1)))
}
