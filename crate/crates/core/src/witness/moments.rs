use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{bipartition_label, WitnessReport};
use crate::error::{Error, Result};
use crate::hilbert::{QuantumState, SubsystemKind};
use crate::rwa::{LadderMonomial, OpKind};

fn mono(factors: Vec<(usize, OpKind)>) -> LadderMonomial {
    LadderMonomial::undriven(factors, Complex64::new(1.0, 0.0))
}

fn others(alpha: usize) -> (usize, usize) {
    match alpha {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Moments shared by the bosonic non-Gaussian witnesses.
struct TripleMoments {
    triple: f64,
    norm2: f64,
    n: [f64; 3],
    /// `⟨N_β N_γ⟩` indexed by the singled-out mode α.
    nn: [f64; 3],
}

impl TripleMoments {
    fn new(state: &QuantumState, modes: [usize; 3]) -> Result<Self> {
        state.layout().require_kind(&modes, SubsystemKind::Boson)?;
        if modes[0] == modes[1] || modes[0] == modes[2] || modes[1] == modes[2] {
            return Err(Error::InvalidParameter(
                "witness modes must be distinct".into(),
            ));
        }
        let triple = state
            .moment(&mono(
                modes.iter().map(|&m| (m, OpKind::Annihilate)).collect(),
            ))?
            .norm();
        let norm2 = state.moment(&mono(vec![]))?.re;
        let mut n = [0.0; 3];
        let mut nn = [0.0; 3];
        for a in 0..3 {
            n[a] = state.moment(&mono(vec![(modes[a], OpKind::Number)]))?.re;
            let (b, c) = others(a);
            nn[a] = state
                .moment(&mono(vec![
                    (modes[b], OpKind::Number),
                    (modes[c], OpKind::Number),
                ]))?
                .re;
        }
        Ok(Self {
            triple,
            norm2,
            n,
            nn,
        })
    }

    fn normal_term(&self, a: usize) -> f64 {
        (self.n[a] * self.nn[a]).max(0.0).sqrt()
    }

    /// `√(⟨a_α a_α†⟩⟨a_β a_β† a_γ a_γ†⟩)` through `a a† = N + 1`.
    fn anti_normal_term(&self, a: usize) -> f64 {
        let (b, c) = others(a);
        let single = self.n[a] + self.norm2;
        let pair = self.nn[a] + self.n[b] + self.n[c] + self.norm2;
        (single * pair).max(0.0).sqrt()
    }

    fn base_report(&self, name: &str, value: f64) -> WitnessReport {
        let mut r = WitnessReport::new(name, value).with("abs_a1a2a3", self.triple);
        for a in 0..3 {
            let (b, c) = others(a);
            r = r
                .with(&format!("n{}", a + 1), self.n[a])
                .with(&format!("n{}n{}", b + 1, c + 1), self.nn[a]);
        }
        r
    }
}

/// `I_α = |⟨a₁a₂a₃⟩| − √(⟨N_α⟩⟨N_β N_γ⟩)`, with `alpha` in `0..3`.
pub fn hz_inseparability(
    state: &QuantumState,
    modes: [usize; 3],
    alpha: usize,
) -> Result<WitnessReport> {
    if alpha > 2 {
        return Err(Error::IndexOutOfRange {
            index: alpha,
            len: 3,
        });
    }
    let m = TripleMoments::new(state, modes)?;
    let bound = m.normal_term(alpha);
    let mut r = m
        .base_report(&format!("i{}", alpha + 1), m.triple - bound)
        .with("bound", bound);
    r.argmax_bipartition = Some(bipartition_label(alpha));
    Ok(r)
}

/// `G₁ = |⟨a₁a₂a₃⟩| − Σ_α √(⟨a_α a_α†⟩⟨a_β a_β† a_γ a_γ†⟩)`.
pub fn genuine_g1(state: &QuantumState, modes: [usize; 3]) -> Result<WitnessReport> {
    let m = TripleMoments::new(state, modes)?;
    let terms: Vec<f64> = (0..3).map(|a| m.anti_normal_term(a)).collect();
    let sum: f64 = terms.iter().sum();
    let mut r = m.base_report("g1", m.triple - sum).with("bound", sum);
    for (a, t) in terms.iter().enumerate() {
        r = r.with(&format!("term_{}", bipartition_label(a)), *t);
    }
    Ok(r)
}

/// `G₂ = |⟨a₁a₂a₃⟩| − max_α √(⟨N_α⟩⟨N_β N_γ⟩)`.
pub fn genuine_g2(state: &QuantumState, modes: [usize; 3]) -> Result<WitnessReport> {
    let m = TripleMoments::new(state, modes)?;
    let terms: Vec<f64> = (0..3).map(|a| m.normal_term(a)).collect();
    let (arg, max) =
        terms
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
            );
    let mut r = m.base_report("g2", m.triple - max).with("bound", max);
    for (a, t) in terms.iter().enumerate() {
        r = r.with(&format!("term_{}", bipartition_label(a)), *t);
    }
    r.argmax_bipartition = Some(bipartition_label(arg));
    Ok(r)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DvAggregate {
    Sum,
    #[default]
    Max,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DvOrdering {
    /// `m = σ⁺σ⁻`, the excited-state projector.
    #[default]
    Normal,
    /// `m = σ⁻σ⁺`, the ground-state projector.
    Antinormal,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DvOptions {
    #[serde(default)]
    pub aggregate: DvAggregate,
    #[serde(default)]
    pub ordering: DvOrdering,
}

/// `|⟨σ₁⁻σ₂⁻σ₃⁻⟩| − (Σ or max)_α √(⟨m_α⟩⟨m_β m_γ⟩)`.
pub fn dv_genuine(
    state: &QuantumState,
    qubits: [usize; 3],
    opts: DvOptions,
) -> Result<WitnessReport> {
    state.layout().require_kind(&qubits, SubsystemKind::Qubit)?;
    let proj = |q: usize| -> Vec<(usize, OpKind)> {
        match opts.ordering {
            DvOrdering::Normal => vec![(q, OpKind::PauliPlus), (q, OpKind::PauliMinus)],
            DvOrdering::Antinormal => vec![(q, OpKind::PauliMinus), (q, OpKind::PauliPlus)],
        }
    };
    let numerator = state
        .moment(&mono(
            qubits.iter().map(|&q| (q, OpKind::PauliMinus)).collect(),
        ))?
        .norm();
    let mut terms = [0.0; 3];
    let mut r = WitnessReport::new("dv", 0.0).with("numerator", numerator);
    for a in 0..3 {
        let (b, c) = others(a);
        let single = state.moment(&mono(proj(qubits[a])))?.re;
        let mut pf = proj(qubits[b]);
        pf.extend(proj(qubits[c]));
        let pair = state.moment(&mono(pf))?.re;
        terms[a] = (single * pair).max(0.0).sqrt();
        r = r
            .with(&format!("m{}", a + 1), single)
            .with(&format!("m{}m{}", b + 1, c + 1), pair)
            .with(&format!("term_{}", bipartition_label(a)), terms[a]);
    }
    let (arg, max) =
        terms
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
            );
    let bound = match opts.aggregate {
        DvAggregate::Sum => terms.iter().sum(),
        DvAggregate::Max => {
            r.argmax_bipartition = Some(bipartition_label(arg));
            max
        }
    };
    r.value = numerator - bound;
    r.detects = r.value > super::DETECTION_FLOOR;
    Ok(r.with("bound", bound))
}
