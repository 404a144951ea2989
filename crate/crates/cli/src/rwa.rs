use std::fmt::Write;
use std::path::Path;

use nongauss::circuit::CircuitModel;
use nongauss::rwa::{
    classify_terms, default_tolerance, expand_total_hamiltonian, rwa_reduce, KerrMode,
    LadderMonomial,
};

use crate::config::{CliConfig, RwaSection};
use crate::error::{CliError, CliResult};
use crate::output::write_atomic;
use crate::Outcome;

const DEFAULT_MODES: usize = 3;

struct Problem {
    terms: Vec<LadderMonomial>,
    frequencies: Vec<f64>,
    drive: f64,
}

fn problem(cfg: &CliConfig, sec: &RwaSection) -> CliResult<Problem> {
    if let Some(terms) = &sec.terms {
        let frequencies = sec
            .frequencies
            .clone()
            .ok_or_else(|| CliError::Config("[rwa] terms need explicit frequencies".into()))?;
        let drive = sec
            .drive
            .or(cfg
                .circuit
                .map(|c| c.squid.pump_frequency)
                .filter(|w| *w > 0.0))
            .unwrap_or_else(|| frequencies.iter().take(3).sum());
        return Ok(Problem {
            terms: terms.clone(),
            frequencies,
            drive,
        });
    }
    let circuit = cfg.require_circuit()?;
    let modes = sec.modes.unwrap_or(DEFAULT_MODES);
    if modes == 0 {
        return Err(CliError::Config("[rwa] modes must be positive".into()));
    }
    let model = CircuitModel::derive(circuit, modes)?;
    let frequencies = match &sec.frequencies {
        Some(f) if f.len() != modes => {
            return Err(CliError::Config(format!(
                "[rwa] frequencies has {} entries for {modes} modes",
                f.len()
            )))
        }
        Some(f) => f.clone(),
        None => model.spectrum.frequencies.clone(),
    };
    let drive = sec
        .drive
        .or(Some(circuit.squid.pump_frequency).filter(|w| *w > 0.0))
        .unwrap_or_else(|| frequencies.iter().take(3).sum());
    let h = expand_total_hamiltonian(&frequencies, &model.couplings, circuit.squid.pump_amplitude)?;
    Ok(Problem {
        terms: h.interaction,
        frequencies,
        drive,
    })
}

pub fn run(
    config: &Path,
    tolerance: Option<f64>,
    kerr: Option<&str>,
    out: Option<&Path>,
) -> CliResult<Outcome> {
    let cfg = CliConfig::load(config)?;
    let sec = cfg.rwa.clone().unwrap_or_default();
    let kerr = match kerr {
        Some(k) => k.parse::<KerrMode>()?,
        None => sec.kerr,
    };
    let p = problem(&cfg, &sec)?;
    let tol = tolerance
        .or(sec.tolerance)
        .unwrap_or_else(|| default_tolerance(&p.frequencies));
    let class = classify_terms(&p.terms, &p.frequencies, p.drive, tol)?;
    let reduced = rwa_reduce(&p.terms, &p.frequencies, p.drive, tol, kerr)?;

    let mut text = String::new();
    let freqs: Vec<String> = p.frequencies.iter().map(|w| format!("{w:.9e}")).collect();
    let _ = writeln!(text, "# frequencies: {}", freqs.join(", "));
    let _ = writeln!(text, "# drive: {:.9e}  tolerance: {tol:.3e}", p.drive);
    let _ = writeln!(text);
    let _ = writeln!(text, "resonant ({} terms)", reduced.len());
    for t in &reduced {
        let _ = writeln!(text, "  {t}");
    }
    let _ = writeln!(text);
    let _ = writeln!(
        text,
        "counter-rotating ({} terms)",
        class.counter_rotating.len()
    );
    for d in &class.counter_rotating {
        let _ = writeln!(text, "  {:+.6e}  {}", d.detuning, d.term);
    }
    match out {
        Some(path) => write_atomic(path, text)?,
        None => print!("{text}"),
    }
    Ok(Outcome::Ok)
}
