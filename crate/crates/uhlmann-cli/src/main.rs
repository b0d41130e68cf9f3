mod commands;
mod config;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "uhlmann",
    version,
    about = "Spin-j Uhlmann processes: temperature sweeps, critical temperatures, \
             cross-validation, purified-state protocol, and register circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the great-circle Loschmidt amplitude over a temperature grid
    Sweep(CommonArgs),
    /// Locate critical temperatures and label the phases between them
    Tstar(CommonArgs),
    /// Run the numeric-vs-analytic cross-validation matrix
    Verify(CommonArgs),
    /// Evolve the purified state and report transport residual and overlap
    Protocol(CommonArgs),
    /// Synthesize the preparation circuit and run the register protocol
    Circuit(CommonArgs),
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Spin j, integer or half-integer (0.5, 1, 1.5, ...)
    #[arg(long)]
    j: Option<String>,
    /// Larmor frequency omega0 > 0
    #[arg(long)]
    omega0: Option<f64>,
    /// Winding number of the loop
    #[arg(long)]
    winding: Option<u32>,
    /// Lower end of the temperature grid
    #[arg(long)]
    tmin: Option<f64>,
    /// Upper end of the temperature grid
    #[arg(long)]
    tmax: Option<f64>,
    /// Number of grid points
    #[arg(long)]
    count: Option<usize>,
    /// Grid spacing: linear or log
    #[arg(long, value_parser = ["linear", "log"])]
    spacing: Option<String>,
    /// Evolution / integrator steps
    #[arg(long)]
    steps: Option<usize>,
    /// Target tolerance for adaptive integration
    #[arg(long)]
    tolerance: Option<f64>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format: csv or json
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Flat key=value file overriding built-in defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Emit the raw amplitude argument instead of the snapped 0/pi phase
    #[arg(long)]
    raw_phase: bool,
    /// Interpret and report temperatures in units of omega0
    #[arg(long)]
    natural_units: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, runner): (&CommonArgs, commands::Runner) = match &cli.command {
        Command::Sweep(a) => (a, commands::cmd_sweep),
        Command::Tstar(a) => (a, commands::cmd_tstar),
        Command::Verify(a) => (a, commands::cmd_verify),
        Command::Protocol(a) => (a, commands::cmd_protocol),
        Command::Circuit(a) => (a, commands::cmd_circuit),
    };
    let cfg = match config::RunConfig::resolve(args) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match runner(&cfg) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
