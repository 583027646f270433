//! Command-line front end: config-file driven subcommands over the model
//! catalog, dispersion analysis, tuning, verification, experiments and the
//! Fourier toy model.
//!
//! Exit codes: 0 success, 1 domain error (bad physics inputs), 2 numerical
//! failure (instability, non-convergence, contaminated measurement), 3
//! config error (unknown keys, unparsable values, bad flags).

mod config;
mod run;

pub use config::{ConfigError, RunConfig};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::dispersion::DispersionError;
use crate::experiments::ExperimentError;
use crate::kernel::KernelError;
use crate::linalg::LinalgError;
use crate::model::ModelError;
use crate::theory::TheoryError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "lbmlab",
    version,
    about = "Lattice Boltzmann laboratory: MRT models, dispersion analysis, tuning, experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. Flag values override config-file values.
#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// Plain-text key=value config file; flags take precedence.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    /// Output directory for CSVs and the run manifest.
    #[arg(long, default_value = "lbmlab-out")]
    pub out: std::path::PathBuf,
    /// Worker cap; 1 produces byte-identical output to any other value.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Seed for optional perturbation tests; unused by the core pipelines.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Model name (D2Q5, D2Q9-AD, D2Q9-NS, D2Q13-NS, D3Q15-AD, D3Q19-AD).
    #[arg(long)]
    pub model: Option<String>,

    // Equilibrium parameters.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub d1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub d2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,

    // Relaxation rates by table symbol.
    #[arg(long, allow_negative_numbers = true)]
    pub s1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s3: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s4: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s5: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s6: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s8: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s10: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s11: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s12: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s14: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s15: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s16: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s17: Option<f64>,

    // Background velocity.
    #[arg(long, allow_negative_numbers = true)]
    pub vx: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub vy: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub vz: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Track the hydrodynamic modes over a k range and fit a1..a4.
    Dispersion {
        #[command(flatten)]
        common: CommonArgs,
        /// Wave direction angle(s) in degrees (2D); repeatable.
        #[arg(long, allow_negative_numbers = true)]
        theta: Vec<f64>,
        /// Wave direction as x,y,z (3D or override).
        #[arg(long)]
        dir: Option<String>,
        #[arg(long)]
        kmax: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Run a time-domain experiment (gaussian-dot, gaussian-vortex,
    /// plane-wave).
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        experiment: Option<String>,
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long)]
        ny: Option<usize>,
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long)]
        dump_every: Option<u64>,
        #[arg(long)]
        r0: Option<f64>,
        #[arg(long)]
        g0: Option<f64>,
        /// Transport coefficient for the analytic reference; defaults to the
        /// model's own closed-form value.
        #[arg(long)]
        chi: Option<f64>,
        /// Plane wave: integer wavevector as nx,ny.
        #[arg(long)]
        nk: Option<String>,
        /// Plane wave: domain size N (N x N nodes).
        #[arg(long)]
        domain: Option<usize>,
        /// Plane wave: initial transverse amplitude.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Solve a tuning condition and print the parameter assignments.
    Tune {
        #[command(flatten)]
        common: CommonArgs,
        /// isotropic-advection | zero-anomaly | quartic |
        /// null-hyperdiffusivity
        #[arg(long)]
        objective: Option<String>,
        /// Branch choice where the source offers two (1 or 2).
        #[arg(long)]
        route: Option<u8>,
        #[arg(long, allow_negative_numbers = true)]
        kappa: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        nu0: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        sigma1: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        sigma3: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        sigma4: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        sigma6: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        sigma8: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        sigma11: Option<f64>,
    },
    /// Compare closed-form transport coefficients against dispersion fits.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Fourier-space toy model of anomaly-induced vortex distortion.
    Toy {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long)]
        ny: Option<usize>,
        #[arg(long)]
        r0: Option<f64>,
        #[arg(long)]
        g0: Option<f64>,
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        /// Anomaly amplitude c in g(k) = 1 + c (cos 4t - cos 2t) k^2.
        #[arg(long)]
        anomaly: Option<f64>,
    },
    /// Max-modulus eigenvalue scan over the full wavevector grid.
    Stability {
        #[command(flatten)]
        common: CommonArgs,
        /// Grid points per axis over [-pi, pi].
        #[arg(long)]
        grid: Option<usize>,
    },
}

/// Entry point used by the binary; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are successful terminations; any
            // other parse problem is a config error (exit 3).
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
            let _ = err.print();
            return code;
        }
    };
    match run::dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("lbmlab: {err}");
            exit_code_for(&err)
        }
    }
}

/// Everything that can go wrong across the pipelines, classified for exit
/// codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Dispersion(#[from] DispersionError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

fn exit_code_for(err: &CliError) -> i32 {
    match err {
        CliError::Config(_) => EXIT_CONFIG,
        CliError::Io(_) => EXIT_CONFIG,
        CliError::Model(_) => EXIT_DOMAIN,
        CliError::Theory(e) => match e {
            TheoryError::Dispersion(d) => dispersion_code(d),
            _ => EXIT_DOMAIN,
        },
        CliError::Dispersion(d) => dispersion_code(d),
        CliError::Kernel(k) => match k {
            KernelError::NonPositiveDensity { .. } => EXIT_NUMERICAL,
            KernelError::Model(_) => EXIT_DOMAIN,
            _ => EXIT_CONFIG,
        },
        CliError::Experiment(e) => match e {
            ExperimentError::Instability { .. } | ExperimentError::Contaminated { .. } => {
                EXIT_NUMERICAL
            }
            ExperimentError::Kernel(KernelError::NonPositiveDensity { .. }) => EXIT_NUMERICAL,
            ExperimentError::Dispersion(d) => dispersion_code(d),
            ExperimentError::BadConfig(_) => EXIT_CONFIG,
            _ => EXIT_DOMAIN,
        },
    }
}

fn dispersion_code(err: &DispersionError) -> i32 {
    match err {
        DispersionError::Linalg(LinalgError::NonConvergence(_))
        | DispersionError::ModeCollision { .. }
        | DispersionError::BranchCrossing(..)
        | DispersionError::SeparationViolated { .. } => EXIT_NUMERICAL,
        _ => EXIT_DOMAIN,
    }
}
