use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cvtele_core::verify::Level;

mod commands;
mod config;
mod error;
mod output;

use commands::{ExportArgs, FidelityArgs, GridArgs, SweepArgs, VerifyArgs};
use config::{Config, Range};
use error::CliError;
use output::Format;

/// Continuous-variable teleportation through a decohering two-mode squeezed
/// channel: noise tables, fidelities, grid exports and self-checks.
#[derive(Parser)]
#[command(name = "cvtele", version)]
struct Cli {
    /// Flat key = value file with default flag values
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the teleportation noise factor against direct transmission
    NoiseSweep {
        /// Channel squeezing s, as start:stop:steps or a single value
        #[arg(long)]
        squeezing: Option<Range>,
        /// Thermal photon number, as start:stop:steps or a single value
        #[arg(long)]
        nbar: Option<Range>,
        /// Renormalized time T in [0, 1], as start:stop:steps or a single value
        #[arg(long)]
        time: Option<Range>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare closed-form fidelities with grid overlaps
    FidelityTable {
        /// vacuum, fock:m or squeezed:s
        #[arg(long)]
        state: Option<String>,
        /// Noise factor, as start:stop:steps or a single value
        #[arg(long)]
        n_tau: Option<Range>,
        #[command(flatten)]
        grid: GridFlags,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the acceptance checks and print a JSON report
    Verify {
        #[arg(value_enum)]
        level: LevelArg,
        /// Report file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scale the noise factor used by the grid teleportation map
        #[arg(long, hide = true, default_value_t = 1.0)]
        corrupt_kernel: f64,
        /// Oracle probe points per axis
        #[arg(long, hide = true)]
        oracle_probes: Option<usize>,
    },
    /// Write input and teleported Wigner grids plus a summary
    TeleportExport {
        /// vacuum, fock:m, squeezed:s or coherent:re,im
        #[arg(long)]
        state: Option<String>,
        /// Noise factor; alternative to the channel flags
        #[arg(long)]
        n_tau: Option<f64>,
        #[arg(long)]
        squeezing: Option<f64>,
        #[arg(long)]
        nbar: Option<f64>,
        #[arg(long)]
        time: Option<f64>,
        #[command(flatten)]
        grid: GridFlags,
        /// Output directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GridFlags {
    /// Grid half-width (default 6)
    #[arg(long)]
    grid_extent: Option<f64>,
    /// Points per axis (default 256)
    #[arg(long)]
    grid_res: Option<usize>,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (default: stdout, or a file in $CVTELE_OUT_DIR)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

impl From<GridFlags> for GridArgs {
    fn from(g: GridFlags) -> Self {
        GridArgs {
            grid_extent: g.grid_extent,
            grid_res: g.grid_res,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match cli.command {
        Command::NoiseSweep { squeezing, nbar, time, output } => commands::noise_sweep(
            SweepArgs {
                squeezing,
                nbar,
                time,
                format: output.format,
                out: output.out,
            },
            &cfg,
        ),
        Command::FidelityTable { state, n_tau, grid, output } => commands::fidelity_table(
            FidelityArgs {
                state,
                n_tau,
                grid: grid.into(),
                format: output.format,
                out: output.out,
            },
            &cfg,
        ),
        Command::Verify { level, out, corrupt_kernel, oracle_probes } => commands::verify(
            VerifyArgs {
                level: match level {
                    LevelArg::Quick => Level::Quick,
                    LevelArg::Full => Level::Full,
                },
                out,
                corrupt_kernel,
                oracle_probes,
            },
            &cfg,
        ),
        Command::TeleportExport { state, n_tau, squeezing, nbar, time, grid, out } => commands::teleport_export(
            ExportArgs {
                state,
                n_tau,
                squeezing,
                nbar,
                time,
                grid: grid.into(),
                out,
            },
            &cfg,
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cvtele: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
