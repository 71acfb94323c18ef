use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::check::OracleKind;
use crate::params::{StateFlags, VarySpec};

/// Quantum Cramér–Rao bounds for single-mode Gaussian states.
///
/// JSON goes to stdout, diagnostics to stderr. Exit status 0 on success,
/// 2 on usage or domain errors, 3 on computational failures.
#[derive(Parser, Debug)]
#[command(name = "qcrb", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Mean, covariance, purity and physicality of a state.
    #[command(allow_negative_numbers = true)]
    State(StateArgs),
    /// Fisher information and Cramér–Rao bound for one family.
    #[command(allow_negative_numbers = true)]
    Qfi(QfiArgs),
    /// Fisher matrix over several state parameters and its inverse.
    #[command(allow_negative_numbers = true)]
    QfiMatrix(QfiMatrixArgs),
    /// Fisher information of a family along a grid of one input.
    #[command(allow_negative_numbers = true)]
    Scan(ScanArgs),
    /// Best phase sensitivity of pure states at fixed photon numbers.
    PhaseScaling(PhaseScalingArgs),
    /// Compare closed forms, the generic engine and an oracle on random points.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
pub struct StateArgs {
    #[command(flatten)]
    pub state: StateFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QfiOracle {
    None,
    Fd,
    Fock,
}

#[derive(Args, Debug)]
pub struct QfiArgs {
    /// Family name (alpha, psi, sigma2, r, chi, n_th, purity, loss_eta, constant).
    #[arg(long)]
    pub family: String,
    #[command(flatten)]
    pub state: StateFlags,
    /// Number of independent repetitions.
    #[arg(long = "Q", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub q: u64,
    #[arg(long, value_enum, default_value_t = QfiOracle::None)]
    pub oracle: QfiOracle,
}

#[derive(Args, Debug)]
pub struct QfiMatrixArgs {
    /// Comma-separated parameter names, at least two.
    #[arg(long, value_delimiter = ',', required = true)]
    pub wrt: Vec<String>,
    #[command(flatten)]
    pub state: StateFlags,
    #[arg(long = "Q", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub q: u64,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long)]
    pub family: String,
    /// Grid as `name=start:stop:count`, e.g. `alpha=1:100:50`.
    #[arg(long, allow_hyphen_values = true)]
    pub vary: String,
    #[command(flatten)]
    pub state: StateFlags,
    #[arg(long = "Q", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub q: u64,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl ScanArgs {
    pub fn vary_spec(&self) -> crate::error::Result<VarySpec> {
        self.vary.parse()
    }
}

#[derive(Args, Debug)]
pub struct PhaseScalingArgs {
    /// Comma-separated total photon numbers.
    #[arg(long = "n-total", value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub n_total: Vec<f64>,
    /// Put every photon in the coherent amplitude (no squeezing).
    #[arg(long)]
    pub coherent_only: bool,
    /// CSV destination; when given, the fit is printed as JSON on stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub oracle: OracleKind,
    /// Comma-separated family names, or `all`.
    #[arg(long, default_value = "all")]
    pub families: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Points per family (default 100 for fd, 20 for fock).
    #[arg(long)]
    pub points: Option<usize>,
    /// Base points for the five-parameter matrix with the fock oracle
    /// (default 20 when all families are checked, else 0).
    #[arg(long)]
    pub matrix_points: Option<usize>,
}
