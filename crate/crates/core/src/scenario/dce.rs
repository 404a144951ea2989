use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Plan, Scenario, ScenarioConfig, ScenarioDefaults, ScenarioOutput, TimeGrid};
use crate::dynamics::{DrivenGroup, Envelope, HamiltonianSpec, Trajectory};
use crate::error::{Error, Result};
use crate::hilbert::{vacuum, RegisterLayout};
use crate::rwa::{LadderMonomial, OpKind};

use OpKind::{Annihilate, Create, PauliMinus, PauliPlus, PauliZ};

/// Default beat period of the two-tone envelope.
const DEFAULT_WINDOW: f64 = 4.0 * PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DceParams {
    #[serde(default = "unit")]
    pub omega: f64,
    #[serde(default = "unit")]
    pub qubit_omega: f64,
    #[serde(default = "default_envelope")]
    pub envelope: Envelope,
    /// Averaging window for the photon-number trend.
    #[serde(default = "default_window")]
    pub window: f64,
}

fn unit() -> f64 {
    1.0
}

fn default_window() -> f64 {
    DEFAULT_WINDOW
}

/// Two tones whose frequencies sum to `ω + Ω`, beating with period 4π for
/// `ω = Ω = 1`.
fn default_envelope() -> Envelope {
    Envelope::TwoTone {
        amplitudes: [0.03, 0.03],
        frequencies: [0.75, 1.25],
        phases: [0.0, 0.0],
    }
}

impl Default for DceParams {
    fn default() -> Self {
        Self {
            omega: unit(),
            qubit_omega: unit(),
            envelope: default_envelope(),
            window: default_window(),
        }
    }
}

/// Averages of `values` over consecutive windows of length `width`, keeping
/// only windows fully covered by the grid.
pub fn window_means(times: &[f64], values: &[f64], width: f64) -> Vec<f64> {
    let (Some(&t0), Some(&t1)) = (times.first(), times.last()) else {
        return Vec::new();
    };
    let count = ((t1 - t0) / width + 1e-9).floor() as usize;
    (0..count)
        .filter_map(|k| {
            let (a, b) = (t0 + k as f64 * width, t0 + (k + 1) as f64 * width);
            let inside: Vec<f64> = times
                .iter()
                .zip(values)
                .filter(|(t, _)| **t >= a - 1e-12 && **t < b - 1e-12)
                .map(|(_, v)| *v)
                .collect();
            (!inside.is_empty()).then(|| inside.iter().sum::<f64>() / inside.len() as f64)
        })
        .collect()
}

/// Single mode coupled to a qubit through `g(t)·σx·(a + a†)`, with the
/// counter-rotating terms kept.
pub struct DceRabi;

impl Scenario for DceRabi {
    fn name(&self) -> &'static str {
        "dce-rabi"
    }

    fn description(&self) -> &'static str {
        "qubit-mode Rabi coupling with a modulated strength, vacuum start"
    }

    fn defaults(&self) -> ScenarioDefaults {
        ScenarioDefaults {
            cutoff: 8,
            grid: TimeGrid::new(0.0, 12.0 * DEFAULT_WINDOW, 12 * 32 + 1),
            witnesses: Vec::new(),
        }
    }

    fn prepare(&self, cfg: &ScenarioConfig, cutoff: usize) -> Result<Plan> {
        if cfg.circuit.is_some() {
            return Err(Error::InvalidParameter(
                "dce-rabi takes direct parameters only".into(),
            ));
        }
        let p: DceParams = cfg.parse_params()?;
        p.envelope.validate()?;
        if !(p.omega > 0.0 && p.qubit_omega > 0.0 && p.window > 0.0 && p.window.is_finite()) {
            return Err(Error::InvalidParameter(
                "dce-rabi needs positive omega, qubit_omega and window".into(),
            ));
        }
        let layout = RegisterLayout::hybrid(1, cutoff, 1)?;
        let c = |v: f64| Complex64::new(v, 0.0);
        let free = vec![
            LadderMonomial::undriven(vec![(0, Create), (0, Annihilate)], c(p.omega)),
            LadderMonomial::undriven(vec![(1, PauliZ)], c(0.5 * p.qubit_omega)),
        ];
        let mut coupling = Vec::new();
        for q in [PauliPlus, PauliMinus] {
            for b in [Create, Annihilate] {
                coupling.push(LadderMonomial::undriven(vec![(1, q), (0, b)], c(1.0)));
            }
        }
        Ok(Plan {
            hamiltonian: HamiltonianSpec {
                static_terms: free,
                driven: vec![DrivenGroup {
                    envelope: p.envelope,
                    terms: coupling,
                }],
                drive_frequency: 0.0,
            },
            initial: vacuum(&layout),
            rate: 0.0,
            axis: "t",
            companions: Vec::new(),
        })
    }

    fn observe(&self, traj: &mut Trajectory) -> Result<()> {
        let one = Complex64::new(1.0, 0.0);
        let n = LadderMonomial::undriven(vec![(0, Create), (0, Annihilate)], one);
        let aa = LadderMonomial::undriven(vec![(0, Annihilate), (0, Annihilate)], one);
        let pe = LadderMonomial::undriven(vec![(1, PauliPlus), (1, PauliMinus)], one);
        traj.record("n", |_, s| Ok(s.moment(&n)?.re))?;
        traj.record("pair_re", |_, s| Ok(s.moment(&aa)?.re))?;
        traj.record("pair_im", |_, s| Ok(s.moment(&aa)?.im))?;
        traj.record("p_excited", |_, s| Ok(s.moment(&pe)?.re))?;
        traj.record("qubit_entropy", |_, s| Ok(s.partial_trace(&[1])?.entropy()))?;
        Ok(())
    }

    fn finish(&self, cfg: &ScenarioConfig, out: &mut ScenarioOutput) -> Result<()> {
        let p: DceParams = cfg.parse_params()?;
        let means = window_means(&out.trajectory.times, out.series("n")?, p.window);
        let monotone = !means.is_empty() && means.windows(2).all(|w| w[1] > w[0]);
        let max = |name: &str| -> Result<f64> {
            Ok(out
                .series(name)?
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max))
        };
        let max_pe = max("p_excited")?;
        let max_entropy = max("qubit_entropy")?;
        let e = &mut out.summary.extras;
        e.insert("windows".into(), means.len() as f64);
        e.insert("windowed_monotone".into(), if monotone { 1.0 } else { 0.0 });
        e.insert("max_p_excited".into(), max_pe);
        e.insert("max_qubit_entropy".into(), max_entropy);
        out.summary
            .extra_series
            .insert("window_mean_n".into(), means);
        Ok(())
    }
}
