//! TOML run configuration.
//!
//! ```toml
//! seed = 1
//! system.num = [1.0]
//! system.den = [2.0, 1.0]
//! nonlinearity.kind = "sine"
//! grid.omega = { min = 0.1, max = 100.0, count = 40, spacing = "log" }
//! grid.U = { values = [0.0, 0.1, 1.0, inf] }
//! ```

use std::path::PathBuf;

use serde::Deserialize;
use srg_bode::gain::{AnalysisConfig, HarmonicSettings, NyquistSweep};
use srg_bode::sim::ValidationSettings;
use srg_bode::{Nonlinearity, TransferFunction};

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    system: Option<RawSystem>,
    nonlinearity: Option<RawNonlinearity>,
    grid: Option<RawGrids>,
    #[serde(default)]
    analysis: RawAnalysis,
    #[serde(default)]
    validate: RawValidate,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    num: Option<Vec<f64>>,
    den: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNonlinearity {
    kind: Option<String>,
    limit: Option<f64>,
    width: Option<f64>,
    gain: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrids {
    omega: Option<RawGrid>,
    #[serde(rename = "U")]
    u: Option<RawGrid>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    min: Option<f64>,
    max: Option<f64>,
    count: Option<usize>,
    spacing: Option<String>,
    values: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnalysis {
    tau_steps: Option<usize>,
    bisection_tol: Option<f64>,
    max_iter: Option<usize>,
    geometry_tol: Option<f64>,
    harmonic_rel_tol: Option<f64>,
    harmonic_k_cap: Option<usize>,
    nyquist_points: Option<usize>,
    nyquist_decades: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawValidate {
    points: Option<usize>,
    inputs_per_point: Option<usize>,
    margin: Option<f64>,
    steady_tol: Option<f64>,
    max_periods: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
}

/// Validated configuration with defaults filled in.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub analysis: AnalysisConfig,
    /// Name recorded in metadata, e.g. `saturation(limit=1)`.
    pub nonlinearity_label: String,
    pub validation: ValidationSettings,
    pub output_dir: PathBuf,
}

fn missing(field: &str) -> CliError {
    CliError::Config(format!("missing required field `{field}`"))
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("`{field}`: {msg}"))
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))?;

    let system = raw.system.ok_or_else(|| missing("system"))?;
    let num = system.num.ok_or_else(|| missing("system.num"))?;
    let den = system.den.ok_or_else(|| missing("system.den"))?;
    if den.is_empty() {
        return Err(invalid("system.den", "must not be empty"));
    }
    let g = TransferFunction::new(num, den).map_err(|e| invalid("system", e))?;

    let nl_raw = raw.nonlinearity.ok_or_else(|| missing("nonlinearity"))?;
    let (nonlinearity, nonlinearity_label) = parse_nonlinearity(nl_raw)?;

    let grid = raw.grid.ok_or_else(|| missing("grid"))?;
    let omega_grid = build_grid("grid.omega", grid.omega.ok_or_else(|| missing("grid.omega"))?)?;
    let u_grid = build_grid("grid.U", grid.u.ok_or_else(|| missing("grid.U"))?)?;

    let mut analysis = AnalysisConfig::new(g, nonlinearity, omega_grid, u_grid);
    let a = raw.analysis;
    if let Some(v) = a.tau_steps {
        analysis.tau_steps = v;
    }
    if let Some(v) = a.bisection_tol {
        analysis.bisection_tol = v;
    }
    if let Some(v) = a.max_iter {
        analysis.max_iter = v;
    }
    if let Some(v) = a.geometry_tol {
        analysis.geometry_tol = v;
    }
    let defaults = HarmonicSettings::default();
    analysis.harmonics = HarmonicSettings {
        rel_tol: a.harmonic_rel_tol.unwrap_or(defaults.rel_tol),
        k_cap: a.harmonic_k_cap.unwrap_or(defaults.k_cap),
    };
    let defaults = NyquistSweep::default();
    analysis.nyquist = NyquistSweep {
        points: a.nyquist_points.unwrap_or(defaults.points),
        decades: a.nyquist_decades.unwrap_or(defaults.decades),
    };
    analysis
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;

    let mut validation = ValidationSettings::default();
    let v = raw.validate;
    if let Some(x) = v.points {
        validation.points = x;
    }
    if let Some(x) = v.inputs_per_point {
        validation.inputs_per_point = x;
    }
    if let Some(x) = v.margin {
        if !(x >= 0.0) {
            return Err(invalid("validate.margin", "must be non-negative"));
        }
        validation.margin = x;
    }
    if let Some(x) = v.steady_tol {
        if !(x > 0.0) {
            return Err(invalid("validate.steady_tol", "must be positive"));
        }
        validation.steady_tol = x;
    }
    if let Some(x) = v.max_periods {
        validation.max_periods = x;
    }
    if let Some(seed) = raw.seed {
        validation.seed = seed;
    }

    Ok(RunConfig {
        analysis,
        nonlinearity_label,
        validation,
        output_dir: raw.output.dir.unwrap_or_else(|| PathBuf::from(".")),
    })
}

fn parse_nonlinearity(raw: RawNonlinearity) -> Result<(Nonlinearity, String), CliError> {
    let kind = raw.kind.ok_or_else(|| missing("nonlinearity.kind"))?;
    let positive = |field: &str, v: Option<f64>| -> Result<f64, CliError> {
        let v = v.ok_or_else(|| missing(field))?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(invalid(field, format!("must be positive, got {v}")))
        }
    };
    let unused = |fields: &[(&str, bool)]| -> Result<(), CliError> {
        match fields.iter().find(|(_, set)| *set) {
            Some((f, _)) => Err(invalid(f, format!("not used by kind `{kind}`"))),
            None => Ok(()),
        }
    };
    match kind.as_str() {
        "sine" => {
            unused(&[
                ("nonlinearity.limit", raw.limit.is_some()),
                ("nonlinearity.width", raw.width.is_some()),
                ("nonlinearity.gain", raw.gain.is_some()),
            ])?;
            Ok((Nonlinearity::Sine, "sine".into()))
        }
        "saturation" => {
            unused(&[
                ("nonlinearity.width", raw.width.is_some()),
                ("nonlinearity.gain", raw.gain.is_some()),
            ])?;
            let limit = positive("nonlinearity.limit", raw.limit)?;
            Ok((
                Nonlinearity::Saturation { limit },
                format!("saturation(limit={limit})"),
            ))
        }
        "deadzone" => {
            unused(&[
                ("nonlinearity.limit", raw.limit.is_some()),
                ("nonlinearity.gain", raw.gain.is_some()),
            ])?;
            let width = positive("nonlinearity.width", raw.width)?;
            Ok((
                Nonlinearity::Deadzone { width },
                format!("deadzone(width={width})"),
            ))
        }
        "linear" => {
            unused(&[
                ("nonlinearity.limit", raw.limit.is_some()),
                ("nonlinearity.width", raw.width.is_some()),
            ])?;
            let gain = raw.gain.unwrap_or(1.0);
            if !gain.is_finite() {
                return Err(invalid("nonlinearity.gain", "must be finite"));
            }
            Ok((Nonlinearity::linear(gain), format!("linear(gain={gain})")))
        }
        other => Err(invalid(
            "nonlinearity.kind",
            format!("unknown kind `{other}` (expected sine, saturation, deadzone or linear)"),
        )),
    }
}

fn build_grid(field: &str, raw: RawGrid) -> Result<Vec<f64>, CliError> {
    let values = match raw.values {
        Some(values) => {
            if raw.min.is_some() || raw.max.is_some() || raw.count.is_some() || raw.spacing.is_some()
            {
                return Err(invalid(field, "give either `values` or `min`/`max`/`count`, not both"));
            }
            values
        }
        None => {
            let min = raw.min.ok_or_else(|| missing(&format!("{field}.min")))?;
            let max = raw.max.ok_or_else(|| missing(&format!("{field}.max")))?;
            let count = raw.count.ok_or_else(|| missing(&format!("{field}.count")))?;
            let spacing = raw.spacing.as_deref().unwrap_or("log");
            if count == 0 {
                return Err(invalid(field, "count must be positive"));
            }
            if !(min.is_finite() && max.is_finite()) {
                return Err(invalid(field, "min and max must be finite"));
            }
            match spacing {
                "log" => {
                    if !(min > 0.0) {
                        return Err(invalid(field, "log spacing needs min > 0"));
                    }
                    spaced(min.log10(), max.log10(), count)
                        .into_iter()
                        .map(|e| 10f64.powf(e))
                        .collect()
                }
                "linear" => spaced(min, max, count),
                other => {
                    return Err(invalid(
                        &format!("{field}.spacing"),
                        format!("unknown spacing `{other}` (expected log or linear)"),
                    ))
                }
            }
        }
    };
    if values.is_empty() {
        return Err(invalid(field, "grid is empty"));
    }
    if let Some(w) = values.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(invalid(
            field,
            format!("must be strictly increasing ({} then {})", w[0], w[1]),
        ));
    }
    Ok(values)
}

fn spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}
