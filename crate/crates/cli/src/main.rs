mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use razbound_core::Error;

/// Bounds, stability certificates and simulations for
/// u'(t) = mu u(t) + sigma u(t - a - c u(t)).
#[derive(Debug, Parser)]
#[command(name = "razbound", version, about)]
pub struct Cli {
    /// JSON file whose keys mirror the long flag names; flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct ShapeArgs {
    /// Delay offset a > 0 [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Delay slope c > 0 [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print M0, N0, tau0, tau and the region label.
    Constants {
        #[command(flatten)]
        model: ModelArgs,
        /// Upper bound to use when sigma > 0 (and for tau when larger than N0).
        #[arg(long, allow_negative_numbers = true)]
        n: Option<f64>,
    },
    /// Classify a (mu, sigma) point against the local stability region.
    Region {
        #[arg(long, allow_negative_numbers = true)]
        mu: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        sigma: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        a: Option<f64>,
    },
    /// Evaluate Q_k(v, x, y), its v-derivative and the quadrature oracle.
    QEval {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
        k: Option<u32>,
        #[arg(long, allow_negative_numbers = true)]
        v: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        x: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        y: Option<f64>,
    },
    /// Run the bound iteration to its limit and report the stability verdict.
    Bounds {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
        k: Option<u32>,
        /// Fixed-point tolerance [default: 1e-9]
        #[arg(long)]
        tol: Option<f64>,
        /// Certification threshold on max(|M|, N) [default: 1e-9]
        #[arg(long)]
        gas_tol: Option<f64>,
        /// [default: 10000]
        #[arg(long)]
        max_iter: Option<usize>,
        /// CSV of the bound pairs and settle times.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the equation and classify the long-run behaviour.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        /// Constant history value.
        #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["phi_factor", "phi_table"])]
        phi: Option<f64>,
        /// Constant history as a multiple of N0 [default: 0.99]
        #[arg(long, allow_negative_numbers = true, conflicts_with = "phi_table")]
        phi_factor: Option<f64>,
        /// CSV of `t,u` knots, interpolated monotonically.
        #[arg(long)]
        phi_table: Option<PathBuf>,
        /// [default: 200]
        #[arg(long)]
        t_end: Option<f64>,
        /// [default: min(1e-3, a/100)]
        #[arg(long)]
        step: Option<f64>,
        /// Length of the final stretch used for classification and tail range [default: 50]
        #[arg(long)]
        window: Option<f64>,
        /// Trajectory CSV (`t,u,udot`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Limit bounds over a (mu, sigma) grid.
    Sweep {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long, allow_negative_numbers = true)]
        mu_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        mu_max: Option<f64>,
        #[arg(long)]
        mu_count: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        sigma_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        sigma_max: Option<f64>,
        #[arg(long)]
        sigma_count: Option<usize>,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
        k: Option<u32>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        gas_tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write an SVG heatmap of `--field`.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// lower-improvement | upper-improvement | m-inf | n-inf [default: upper-improvement]
        #[arg(long)]
        field: Option<String>,
    },
    /// Sigma at which stability stops being certified, for each mu.
    GasBoundary {
        #[command(flatten)]
        shape: ShapeArgs,
        /// Explicit mu values (comma separated); overrides the range flags.
        #[arg(long = "mu-values", value_delimiter = ',', allow_hyphen_values = true)]
        mu_values: Vec<f64>,
        #[arg(long, allow_negative_numbers = true)]
        mu_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        mu_max: Option<f64>,
        #[arg(long)]
        mu_count: Option<usize>,
        /// 1, 2 or both [default: both]
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Limit bounds for both orders next to simulated tail ranges.
    Compare {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long, allow_negative_numbers = true)]
        mu: Option<f64>,
        #[arg(long = "sigma-values", value_delimiter = ',', allow_hyphen_values = true)]
        sigma_values: Vec<f64>,
        #[arg(long, allow_negative_numbers = true)]
        sigma_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        sigma_max: Option<f64>,
        #[arg(long)]
        sigma_count: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        window: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the oracle suites; exit 1 if any fails.
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, hide = true, allow_negative_numbers = true)]
        perturb: Option<f64>,
    },
}

/// Error with the process exit status it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Parse(_) | Error::StepTooLarge { .. } | Error::Io { .. } => {
                CliError::usage(e.to_string())
            }
            Error::Bracket { .. } | Error::Convergence { .. } | Error::DelayCollapse { .. } => {
                CliError::failure(e.to_string())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    match commands::run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
