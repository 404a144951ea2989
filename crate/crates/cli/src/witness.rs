use std::path::{Path, PathBuf};

use nongauss::hilbert::QuantumState;
use nongauss::witness::{WitnessContext, WitnessRegistry};

use crate::error::{CliError, CliResult};
use crate::output::write_atomic;
use crate::Outcome;

pub struct Args {
    pub state: PathBuf,
    pub witnesses: Vec<String>,
    pub modes: Option<Vec<usize>>,
    pub qubits: Option<Vec<usize>>,
    pub parties: Option<Vec<usize>>,
    pub restarts: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

fn triple(v: Option<Vec<usize>>, flag: &str) -> CliResult<Option<[usize; 3]>> {
    match v {
        None => Ok(None),
        Some(v) => <[usize; 3]>::try_from(v.as_slice())
            .map(Some)
            .map_err(|_| CliError::Config(format!("--{flag} takes exactly three indices"))),
    }
}

fn load_state(path: &Path) -> CliResult<QuantumState> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    Ok(QuantumState::from_json(&text)?)
}

pub fn run(args: Args) -> CliResult<Outcome> {
    let state = load_state(&args.state)?;
    let mut ctx = WitnessContext {
        modes: triple(args.modes, "modes")?,
        qubits: triple(args.qubits, "qubits")?,
        parties: triple(args.parties, "parties")?,
        ..WitnessContext::default()
    };
    if let Some(r) = args.restarts {
        ctx.restarts = r;
    }
    if let Some(s) = args.seed {
        ctx.seed = s;
    }
    let layout = state.layout();
    let names = if args.witnesses.is_empty() {
        let mut names: Vec<String> = Vec::new();
        if ctx.modes.is_some() || layout.boson_indices().len() >= 3 {
            names.extend(["vlf_s", "vlf_s_opt", "i1", "i2", "i3", "g1", "g2"].map(String::from));
        }
        if ctx.qubits.is_some() || layout.qubit_indices().len() >= 3 {
            names.push("dv".into());
        }
        if names.is_empty() && ctx.parties.is_none() {
            return Err(CliError::Config(
                "state has fewer than three bosons or qubits; name the parties".into(),
            ));
        }
        names.push("negativity".into());
        names
    } else {
        args.witnesses
    };
    let registry = WitnessRegistry::builtin();
    let reports = names
        .iter()
        .map(|n| registry.evaluate(n, &state, &ctx))
        .collect::<Result<Vec<_>, _>>()?;
    let json = serde_json::to_string_pretty(&reports)
        .map_err(|e| CliError::Numeric(e.to_string()))?
        + "\n";
    match &args.out {
        Some(path) => write_atomic(path, json)?,
        None => print!("{json}"),
    }
    Ok(Outcome::Ok)
}
