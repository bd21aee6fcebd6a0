//! Command implementations. Each command computes everything first and
//! writes its files in one atomic batch at the end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use srg_bode::gain::{
    analyze_point, gain_surface, inverse_full_srg, margin_to, FrequencyAsymptote, GainSurface,
    HarmonicSettings, NyquistSweep, WellPosedness,
};
use srg_bode::nonlinearity::Asymptotes;
use srg_bode::sim::{validate_surface, ValidationReport};
use srg_bode::{GainRecord, TransferFunction};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{format_float, lti_csv, read_surface_csv, surface_csv, OutputSet, SurfaceRow, PLOT_SCRIPT};

pub const SURFACE_CSV: &str = "surface.csv";
pub const SURFACE_JSON: &str = "surface.json";
pub const PLOT_PY: &str = "plot_surface.py";
pub const VALIDATION_JSON: &str = "validation.json";
pub const LTI_CSV: &str = "lti_reference.csv";

#[derive(Serialize)]
struct Tool {
    name: &'static str,
    version: &'static str,
}

const TOOL: Tool = Tool {
    name: env!("CARGO_PKG_NAME"),
    version: env!("CARGO_PKG_VERSION"),
};

#[derive(Serialize)]
struct SystemEcho<'a> {
    num: &'a [f64],
    den: &'a [f64],
}

#[derive(Serialize)]
struct Hypotheses {
    stable: bool,
    strictly_proper: bool,
    odd_nonlinearity: bool,
}

#[derive(Serialize)]
struct WellPosednessEcho {
    #[serde(flatten)]
    result: WellPosedness,
    /// The tau interval is checked on a grid only.
    approximate: bool,
}

#[derive(Serialize)]
struct Settings {
    tau_steps: usize,
    bisection_tol: f64,
    max_iter: usize,
    geometry_tol: f64,
    harmonics: HarmonicSettings,
    nyquist: NyquistSweep,
}

#[derive(Serialize)]
struct Grid<'a> {
    omega: &'a [f64],
    #[serde(rename = "U")]
    u: &'a [f64],
}

#[derive(Serialize)]
struct Timings {
    surface_ms: f64,
}

#[derive(Serialize)]
struct SurfaceMetadata<'a> {
    tool: Tool,
    system: SystemEcho<'a>,
    nonlinearity: &'a str,
    asymptotic_bounds: Asymptotes,
    hypotheses: Hypotheses,
    wellposedness: WellPosednessEcho,
    global_l2_gain: f64,
    settings: Settings,
    grid: Grid<'a>,
    records: usize,
    feasible_records: usize,
    asymptotes: &'a [FrequencyAsymptote],
    timings: Timings,
}

fn global_gain(cfg: &RunConfig) -> Result<f64, CliError> {
    let a = &cfg.analysis;
    let inverse = inverse_full_srg(&a.system, &a.nyquist)?;
    let r = margin_to(&inverse, a.nonlinearity.sector_bounds(f64::INFINITY)?);
    Ok(if r > a.geometry_tol { 1.0 / r } else { f64::INFINITY })
}

fn metadata_json(cfg: &RunConfig, surface: &GainSurface, elapsed_ms: f64) -> Result<Vec<u8>, CliError> {
    let a = &cfg.analysis;
    let meta = SurfaceMetadata {
        tool: TOOL,
        system: SystemEcho {
            num: a.system.num().coeffs(),
            den: a.system.den().coeffs(),
        },
        nonlinearity: &cfg.nonlinearity_label,
        asymptotic_bounds: a.nonlinearity.asymptotic_bounds()?,
        hypotheses: Hypotheses {
            stable: true,
            strictly_proper: true,
            odd_nonlinearity: true,
        },
        wellposedness: WellPosednessEcho {
            result: surface.wellposedness,
            approximate: true,
        },
        global_l2_gain: global_gain(cfg)?,
        settings: Settings {
            tau_steps: a.tau_steps,
            bisection_tol: a.bisection_tol,
            max_iter: a.max_iter,
            geometry_tol: a.geometry_tol,
            harmonics: a.harmonics,
            nyquist: a.nyquist,
        },
        grid: Grid {
            omega: &a.omega_grid,
            u: &a.u_grid,
        },
        records: surface.records.len(),
        feasible_records: surface.records.iter().filter(|r| r.feasible).count(),
        asymptotes: &surface.asymptotes,
        timings: Timings {
            surface_ms: elapsed_ms,
        },
    };
    to_json(&meta)
}

fn to_json(value: &impl Serialize) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Csv(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn out_dir(cfg: &RunConfig, out: Option<&Path>) -> PathBuf {
    out.map(Path::to_path_buf)
        .unwrap_or_else(|| cfg.output_dir.clone())
}

/// `surface.csv`, `surface.json` and `plot_surface.py`.
pub fn cmd_surface(
    cfg: &RunConfig,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<GainSurface, CliError> {
    let start = Instant::now();
    let surface = gain_surface(&cfg.analysis)?;
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let rows: Vec<SurfaceRow> = surface.records.iter().map(SurfaceRow::from).collect();

    let mut files = OutputSet::default();
    files.add(SURFACE_CSV, surface_csv(&rows)?);
    files.add(SURFACE_JSON, metadata_json(cfg, &surface, elapsed_ms)?);
    files.add(PLOT_PY, PLOT_SCRIPT);
    let dir = out_dir(cfg, out);
    let written = files.commit(&dir)?;

    let feasible = surface.records.iter().filter(|r| r.feasible).count();
    let _ = writeln!(
        stdout,
        "well-posedness margin r = {} (tau = {})",
        format_float(surface.wellposedness.margin),
        surface.wellposedness.tau_at_min
    );
    let _ = writeln!(
        stdout,
        "{} records ({} feasible) in {:.1} ms",
        surface.records.len(),
        feasible,
        elapsed_ms
    );
    for p in written {
        let _ = writeln!(stdout, "wrote {}", p.display());
    }
    Ok(surface)
}

/// Prints every field of the record at one `(omega, U)`.
pub fn cmd_analyze(
    cfg: &RunConfig,
    omega: f64,
    u: f64,
    stdout: &mut dyn Write,
) -> Result<GainRecord, CliError> {
    let (r, wp) = analyze_point(&cfg.analysis, omega, u)?;
    let lines = [
        ("omega", format_float(r.omega)),
        ("U", format_float(r.u)),
        ("r_omega_A", format_float(r.r_omega_a)),
        ("r_partial_omega_A", format_float(r.r_partial_omega_a)),
        ("A_bound", format_float(r.a_bound)),
        ("gamma", format_float(r.gamma)),
        ("r_omega_inf", format_float(r.r_omega_inf)),
        ("r_partial_omega_inf", format_float(r.r_partial_omega_inf)),
        ("bisection_iters", r.bisection_iters.to_string()),
        ("feasible", r.feasible.to_string()),
        ("wellposedness_margin", format_float(wp.margin)),
    ];
    for (k, v) in lines {
        let _ = writeln!(stdout, "{k} = {v}");
    }
    Ok(r)
}

/// Simulates random inputs against a computed or loaded surface and
/// writes `validation.json`. Violations are an error after the report is
/// written.
pub fn cmd_validate(
    cfg: &RunConfig,
    surface_csv_path: Option<&Path>,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<ValidationReport, CliError> {
    let records: Vec<GainRecord> = match surface_csv_path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            read_surface_csv(&text)?
                .iter()
                .map(SurfaceRow::to_record)
                .collect()
        }
        None => gain_surface(&cfg.analysis)?.records,
    };
    let report = validate_surface(
        &records,
        &cfg.analysis.system,
        &cfg.analysis.nonlinearity,
        &cfg.validation,
    )?;
    let mut files = OutputSet::default();
    files.add(VALIDATION_JSON, to_json(&report)?);
    let written = files.commit(&out_dir(cfg, out))?;

    let _ = writeln!(
        stdout,
        "{} simulations at {} points: {} violation(s), {} unconverged",
        report.simulations,
        report.points.len(),
        report.violations.len(),
        report.unconverged
    );
    for p in written {
        let _ = writeln!(stdout, "wrote {}", p.display());
    }
    if !report.passed {
        for v in &report.violations {
            let input = serde_json::to_string(&v.input).unwrap_or_default();
            let _ = writeln!(
                stderr,
                "violation: {:?} at omega = {}, U = {}: measured {} > bound {}; input {}",
                v.kind,
                format_float(v.omega),
                format_float(v.u),
                format_float(v.measured),
                format_float(v.bound),
                input
            );
        }
        return Err(CliError::Validation(report.violations.len()));
    }
    Ok(report)
}

/// `|G(j omega) / (1 + k G(j omega))|` with `k` the slope of the
/// nonlinearity at the origin.
pub fn lti_reference(
    g: &TransferFunction,
    slope_at_zero: f64,
    omegas: &[f64],
) -> Result<Vec<(f64, f64)>, CliError> {
    let closed = g.linearized_loop(slope_at_zero)?;
    omegas
        .iter()
        .map(|&w| Ok((w, closed.eval_freq(w)?.norm())))
        .collect()
}

pub fn cmd_lti_reference(
    cfg: &RunConfig,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<Vec<(f64, f64)>, CliError> {
    let a = &cfg.analysis;
    let s = a.nonlinearity.slope_bounds(0.0)?;
    let rows = lti_reference(&a.system, 0.5 * (s.lo + s.hi), &a.omega_grid)?;
    let mut files = OutputSet::default();
    files.add(LTI_CSV, lti_csv(&rows)?);
    for p in files.commit(&out_dir(cfg, out))? {
        let _ = writeln!(stdout, "wrote {}", p.display());
    }
    Ok(rows)
}
