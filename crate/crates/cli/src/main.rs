mod config;
mod error;
mod modes;
mod output;
mod run;
mod rwa;
mod witness;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::CliResult;

/// Non-Gaussian entanglement in superconducting circuits: mode solver,
/// rotating-wave reduction, scenario runs and witness evaluation.
#[derive(Parser)]
#[command(name = "nongauss", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the cavity spectrum and write it as CSV.
    Modes {
        #[arg(long)]
        config: PathBuf,
        /// Number of modes, overriding `[modes] count`.
        #[arg(long)]
        n_modes: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print resonant and counter-rotating terms of the expanded Hamiltonian.
    Rwa {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        tolerance: Option<f64>,
        /// keep, drop or constant-shift
        #[arg(long)]
        kerr: Option<String>,
        /// Write the tables here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario and write trajectory, summary and optional final state.
    Run {
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate witnesses on a saved state.
    Witness {
        #[arg(long)]
        state: PathBuf,
        /// Witness to evaluate; repeat for several. Defaults depend on the layout.
        #[arg(long = "witness")]
        witnesses: Vec<String>,
        /// Three bosonic subsystems, e.g. 0,1,2
        #[arg(long, value_delimiter = ',')]
        modes: Option<Vec<usize>>,
        /// Three qubit subsystems
        #[arg(long, value_delimiter = ',')]
        qubits: Option<Vec<usize>>,
        /// Three parties for negativity
        #[arg(long, value_delimiter = ',')]
        parties: Option<Vec<usize>>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario over a list of parameter values.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads, all cores by default.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

/// Finished normally, or finished with outputs written but a run that did
/// not converge in the Fock cutoff.
pub enum Outcome {
    Ok,
    NotConverged,
}

fn dispatch(cmd: Command) -> CliResult<Outcome> {
    match cmd {
        Command::Modes {
            config,
            n_modes,
            out,
        } => modes::run(&config, n_modes, &out),
        Command::Rwa {
            config,
            tolerance,
            kerr,
            out,
        } => rwa::run(&config, tolerance, kerr.as_deref(), out.as_deref()),
        Command::Run {
            scenario,
            config,
            out,
            seed,
        } => run::run(scenario.as_deref(), config.as_deref(), &out, seed),
        Command::Witness {
            state,
            witnesses,
            modes,
            qubits,
            parties,
            restarts,
            seed,
            out,
        } => witness::run(witness::Args {
            state,
            witnesses,
            modes,
            qubits,
            parties,
            restarts,
            seed,
            out,
        }),
        Command::Sweep { config, out, jobs } => run::sweep(&config, &out, jobs),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::NotConverged) => {
            eprintln!("warning: results not converged in the Fock cutoff");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
