use std::fmt::Write;
use std::path::Path;

use nongauss::circuit::{effective_junction, mode_spectrum};

use crate::config::CliConfig;
use crate::error::{CliError, CliResult};
use crate::output::write_atomic;
use crate::Outcome;

const DEFAULT_MODES: usize = 5;

pub fn run(config: &Path, n_modes: Option<usize>, out: &Path) -> CliResult<Outcome> {
    let cfg = CliConfig::load(config)?;
    let circuit = cfg.require_circuit()?;
    let count = n_modes.or(cfg.modes.count).unwrap_or(DEFAULT_MODES);
    if count == 0 {
        return Err(CliError::Config("mode count must be positive".into()));
    }
    let e_bar = match cfg.modes.energy {
        Some(e) => e,
        None => effective_junction(&circuit.squid)?.e_bar,
    };
    let spec = mode_spectrum(&circuit.cavity, e_bar, count)?;
    // Without a junction the k = 0 root is absent and modes start at n = 1.
    let first = if e_bar == 0.0 { 1 } else { 0 };
    let mut csv = String::from("n,k_n,omega_n,c_n,l_n,edge_amplitude\n");
    for i in 0..spec.len() {
        let _ = writeln!(
            csv,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            i + first,
            spec.wavenumbers[i],
            spec.frequencies[i],
            spec.mode_caps[i],
            spec.mode_inds[i],
            spec.edge_amplitudes[i]
        );
    }
    write_atomic(out, csv)?;
    Ok(Outcome::Ok)
}
