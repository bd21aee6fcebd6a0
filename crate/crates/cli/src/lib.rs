//! `srg-bode` command-line front end: configuration parsing, command
//! dispatch and result files.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{parse_config, RunConfig};
pub use error::{CliError, EXIT_CERTIFICATION, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION};

#[derive(Debug, Parser)]
#[command(name = "srg-bode", version, about = "Certified nonlinear Bode surfaces for Lur'e systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Validation seed; overrides `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gain and amplitude bounds over the configured grid.
    Surface(Common),
    /// Bounds at a single (omega, U) point.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        omega: f64,
        /// Harmonic energy; `inf` gives the U -> infinity limit.
        #[arg(long = "U")]
        u: f64,
    },
    /// Simulate random inputs against the certified bounds.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        inputs_per_point: Option<usize>,
        /// Validate this surface CSV instead of recomputing it.
        #[arg(long)]
        surface: Option<PathBuf>,
    },
    /// Closed-loop gain of the loop linearized at the origin.
    LtiReference(Common),
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(&common.config).map_err(|e| CliError::io(&common.config, e))?;
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = common.seed {
        cfg.validation.seed = seed;
    }
    Ok(cfg)
}

/// Runs a parsed command.
pub fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Surface(common) => {
            let cfg = load(&common)?;
            commands::cmd_surface(&cfg, common.out.as_deref(), stdout).map(drop)
        }
        Command::Analyze { common, omega, u } => {
            let cfg = load(&common)?;
            commands::cmd_analyze(&cfg, omega, u, stdout).map(drop)
        }
        Command::Validate {
            common,
            points,
            inputs_per_point,
            surface,
        } => {
            let mut cfg = load(&common)?;
            if let Some(p) = points {
                cfg.validation.points = p;
            }
            if let Some(n) = inputs_per_point {
                cfg.validation.inputs_per_point = n;
            }
            commands::cmd_validate(
                &cfg,
                surface.as_deref(),
                common.out.as_deref(),
                stdout,
                stderr,
            )
            .map(drop)
        }
        Command::LtiReference(common) => {
            let cfg = load(&common)?;
            commands::cmd_lti_reference(&cfg, common.out.as_deref(), stdout).map(drop)
        }
    }
}

/// Parses arguments, runs the command and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "srg-bode: {e}");
            e.exit_code()
        }
    }
}
