use std::collections::BTreeSet;
use std::fmt::Write;
use std::path::Path;

use nongauss::scenario::{ScenarioConfig, ScenarioOutput, ScenarioRegistry};
use rayon::prelude::*;

use crate::config::{set_dotted, CliConfig};
use crate::error::{CliError, CliResult};
use crate::output::OutputSet;
use crate::Outcome;

fn stage(
    out: &ScenarioOutput,
    dir: &Path,
    prefix: &str,
    snapshot: bool,
    set: &mut OutputSet,
) -> CliResult<()> {
    set.add(
        dir.join(format!("{prefix}_trajectory.csv")),
        out.trajectory.to_csv(),
    );
    set.add(
        dir.join(format!("{prefix}_summary.json")),
        out.summary_json()? + "\n",
    );
    if snapshot {
        let last = out
            .trajectory
            .states
            .last()
            .ok_or_else(|| CliError::Numeric("trajectory has no states".into()))?;
        set.add(
            dir.join(format!("{prefix}_state.json")),
            last.to_json()? + "\n",
        );
    }
    Ok(())
}

pub fn run(
    scenario: Option<&str>,
    config: Option<&Path>,
    out: &Path,
    seed: Option<u64>,
) -> CliResult<Outcome> {
    let file = match config {
        Some(p) => CliConfig::load(p)?,
        None => CliConfig::default(),
    };
    let mut cfg = file.scenario_config(scenario)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let result = ScenarioRegistry::builtin().run(&cfg)?;
    let prefix = file
        .output
        .prefix
        .clone()
        .unwrap_or_else(|| cfg.name.clone());
    let mut set = OutputSet::default();
    stage(&result, out, &prefix, file.output.snapshot, &mut set)?;
    set.commit()?;
    Ok(if result.summary.converged {
        Outcome::Ok
    } else {
        Outcome::NotConverged
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

pub fn sweep(config: &Path, out: &Path, jobs: Option<usize>) -> CliResult<Outcome> {
    let file = CliConfig::load(config)?;
    let sweep = file
        .sweep
        .clone()
        .ok_or_else(|| CliError::Config("sweep needs a [sweep] section".into()))?;
    let base = file.scenario_config(None)?;
    let labels: Vec<String> = match &sweep.labels {
        Some(l) => l.clone(),
        None => (0..sweep.values.len())
            .map(|i| format!("run_{i:03}"))
            .collect(),
    };
    if labels.iter().collect::<BTreeSet<_>>().len() != labels.len() {
        return Err(CliError::Config("sweep labels must be distinct".into()));
    }
    let mut configs: Vec<ScenarioConfig> = Vec::with_capacity(labels.len());
    let mut shown: Vec<String> = Vec::with_capacity(labels.len());
    for v in &sweep.values {
        let json = serde_json::to_value(v).map_err(|e| CliError::Config(e.to_string()))?;
        shown.push(json.to_string());
        let mut cfg = base.clone();
        set_dotted(&mut cfg.params, &sweep.param, json)?;
        configs.push(cfg);
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let registry = ScenarioRegistry::builtin();
    let results: Vec<ScenarioOutput> = pool.install(|| {
        configs
            .par_iter()
            .map(|c| registry.run(c))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let prefix = file
        .output
        .prefix
        .clone()
        .unwrap_or_else(|| base.name.clone());
    let mut set = OutputSet::default();
    let witnesses: BTreeSet<&String> = results
        .iter()
        .flat_map(|r| r.summary.peaks.keys())
        .collect();
    let mut csv = String::from("label,value,converged,norm_drift,steps,g2_peak,s_peak");
    for w in &witnesses {
        let _ = write!(csv, ",peak_{w}");
    }
    csv.push('\n');
    for ((label, value), r) in labels.iter().zip(&shown).zip(&results) {
        stage(r, &out.join(label), &prefix, file.output.snapshot, &mut set)?;
        let s = &r.summary;
        let _ = write!(
            csv,
            "{},{},{},{:.16e},{},{},{}",
            csv_field(label),
            csv_field(value),
            s.converged,
            s.norm_drift,
            s.steps,
            opt(s.g2_peak),
            opt(s.s_peak)
        );
        for w in &witnesses {
            let _ = write!(csv, ",{}", opt(s.peaks.get(*w).copied()));
        }
        csv.push('\n');
    }
    set.add(out.join("sweep.csv"), csv);
    set.commit()?;
    Ok(if results.iter().all(|r| r.summary.converged) {
        Outcome::Ok
    } else {
        Outcome::NotConverged
    })
}
