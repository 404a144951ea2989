//! Ladder-operator monomials and rotating-wave term selection.
//!
//! A monomial carries a drive sign `s ∈ {−1, 0, +1}` standing for the time
//! factor `e^{i s ω_d t}`. A `cos(ω_d t)` drive therefore expands into two
//! monomials with coefficient ½ and opposite drive signs. In the interaction
//! picture of the free Hamiltonian each creation factor on a subsystem of
//! frequency ω picks up `e^{+iωt}` and each annihilation factor `e^{−iωt}`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{CouplingTable, CouplingTensor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpKind {
    Create,
    Annihilate,
    PauliPlus,
    PauliMinus,
    PauliZ,
    Number,
}

impl OpKind {
    /// Interaction-picture phase sign: +1 for raising, −1 for lowering.
    pub fn rotation_sign(self) -> i32 {
        match self {
            OpKind::Create | OpKind::PauliPlus => 1,
            OpKind::Annihilate | OpKind::PauliMinus => -1,
            OpKind::PauliZ | OpKind::Number => 0,
        }
    }

    pub fn adjoint(self) -> OpKind {
        match self {
            OpKind::Create => OpKind::Annihilate,
            OpKind::Annihilate => OpKind::Create,
            OpKind::PauliPlus => OpKind::PauliMinus,
            OpKind::PauliMinus => OpKind::PauliPlus,
            k => k,
        }
    }

    pub fn is_bosonic(self) -> bool {
        matches!(self, OpKind::Create | OpKind::Annihilate | OpKind::Number)
    }

    pub fn name(self) -> &'static str {
        match self {
            OpKind::Create => "create",
            OpKind::Annihilate => "annihilate",
            OpKind::PauliPlus => "pauli-plus",
            OpKind::PauliMinus => "pauli-minus",
            OpKind::PauliZ => "pauli-z",
            OpKind::Number => "number",
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            OpKind::Create => "a†",
            OpKind::Annihilate => "a",
            OpKind::PauliPlus => "σ+",
            OpKind::PauliMinus => "σ-",
            OpKind::PauliZ => "σz",
            OpKind::Number => "N",
        }
    }
}

/// Product of single-subsystem operators times a complex coefficient.
///
/// Factors act right to left, so `factors[0]` is the leftmost operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderMonomial {
    pub factors: Vec<(usize, OpKind)>,
    pub coeff: Complex64,
    #[serde(default)]
    pub drive_sign: i8,
}

impl LadderMonomial {
    pub fn new(factors: Vec<(usize, OpKind)>, coeff: Complex64, drive_sign: i8) -> Self {
        Self {
            factors,
            coeff,
            drive_sign,
        }
    }

    pub fn undriven(factors: Vec<(usize, OpKind)>, coeff: Complex64) -> Self {
        Self::new(factors, coeff, 0)
    }

    /// Scalar multiple of the identity.
    pub fn identity(coeff: Complex64) -> Self {
        Self::new(Vec::new(), coeff, 0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.coeff.re.is_finite() && self.coeff.im.is_finite()) {
            return Err(Error::InvalidParameter(
                "non-finite term coefficient".into(),
            ));
        }
        if !(-1..=1).contains(&self.drive_sign) {
            return Err(Error::InvalidParameter(format!(
                "drive_sign must be -1, 0 or +1, got {}",
                self.drive_sign
            )));
        }
        Ok(())
    }

    /// Hermitian conjugate: reversed factor order, adjoint kinds, conjugated
    /// coefficient, flipped drive sign.
    pub fn conjugate(&self) -> Self {
        Self {
            factors: self
                .factors
                .iter()
                .rev()
                .map(|&(i, k)| (i, k.adjoint()))
                .collect(),
            coeff: self.coeff.conj(),
            drive_sign: -self.drive_sign,
        }
    }

    /// Reorders factors by subsystem. Operators on different subsystems
    /// commute, and the relative order within a subsystem is preserved.
    pub fn canonical(&self) -> Self {
        let mut factors = self.factors.clone();
        factors.sort_by_key(|&(i, _)| i);
        Self {
            factors,
            coeff: self.coeff,
            drive_sign: self.drive_sign,
        }
    }

    /// Net rotation sign of each subsystem touched by this term.
    pub fn net_signs(&self) -> BTreeMap<usize, i32> {
        let mut out = BTreeMap::new();
        for &(i, k) in &self.factors {
            *out.entry(i).or_insert(0) += k.rotation_sign();
        }
        out
    }

    fn same_operator(&self, other: &Self) -> bool {
        self.factors == other.factors && self.drive_sign == other.drive_sign
    }

    pub fn max_subsystem(&self) -> Option<usize> {
        self.factors.iter().map(|&(i, _)| i).max()
    }
}

impl std::fmt::Display for LadderMonomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({:+.6e}{:+.6e}i)", self.coeff.re, self.coeff.im)?;
        if self.factors.is_empty() {
            write!(f, " 1")?;
        }
        for &(i, k) in &self.factors {
            write!(f, " {}{}", k.symbol(), i)?;
        }
        match self.drive_sign {
            1 => write!(f, " e^(+iωd t)"),
            -1 => write!(f, " e^(-iωd t)"),
            _ => Ok(()),
        }
    }
}

/// Canonicalizes every term and merges those with identical operator
/// content, dropping exact zeros. First-appearance order is kept.
pub fn merge_terms(terms: &[LadderMonomial]) -> Vec<LadderMonomial> {
    let mut out: Vec<LadderMonomial> = Vec::new();
    let mut index: BTreeMap<(Vec<(usize, OpKind)>, i8), usize> = BTreeMap::new();
    for t in terms {
        let c = t.canonical();
        let key = (c.factors.clone(), c.drive_sign);
        match index.get(&key) {
            Some(&pos) => out[pos].coeff += c.coeff,
            None => {
                index.insert(key, out.len());
                out.push(c);
            }
        }
    }
    out.retain(|t| t.coeff != Complex64::new(0.0, 0.0));
    out
}

/// True when the conjugate of every term is present with the conjugate
/// coefficient, up to `tol` per coefficient.
pub fn is_conjugation_closed(terms: &[LadderMonomial], tol: f64) -> bool {
    let merged = merge_terms(terms);
    merged.iter().all(|t| {
        let c = t.conjugate().canonical();
        merged
            .iter()
            .find(|u| u.same_operator(&c))
            .map(|u| (u.coeff - c.coeff).norm() <= tol)
            .unwrap_or(c.coeff.norm() <= tol)
    })
}

/// Exponent of the interaction-picture phase `e^{iΩt}` attached to `term`.
pub fn interaction_frequency(
    term: &LadderMonomial,
    frequencies: &[f64],
    drive: f64,
) -> Result<f64> {
    let mut total = term.drive_sign as f64 * drive;
    for &(i, k) in &term.factors {
        let w = frequencies.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: frequencies.len(),
        })?;
        total += k.rotation_sign() as f64 * w;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetunedTerm {
    pub term: LadderMonomial,
    pub detuning: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TermClassification {
    pub resonant: Vec<LadderMonomial>,
    pub counter_rotating: Vec<DetunedTerm>,
}

/// Default resonance tolerance: `1e-6 · min ω`.
pub fn default_tolerance(frequencies: &[f64]) -> f64 {
    let min = frequencies
        .iter()
        .copied()
        .filter(|w| *w > 0.0)
        .fold(f64::INFINITY, f64::min);
    if min.is_finite() {
        1e-6 * min
    } else {
        0.0
    }
}

/// Rejects pairs of positive frequencies whose ratio is an integer within a
/// relative `1e-6`.
pub fn check_nondegenerate(frequencies: &[f64], subsystems: &[usize]) -> Result<()> {
    for (a, &i) in subsystems.iter().enumerate() {
        for &j in &subsystems[a + 1..] {
            let (wi, wj) = (frequencies[i], frequencies[j]);
            if wi <= 0.0 || wj <= 0.0 {
                continue;
            }
            let ratio = wi.max(wj) / wi.min(wj);
            if (ratio - ratio.round()).abs() <= 1e-6 * ratio {
                return Err(Error::DegenerateFrequencies(format!(
                    "ω{i} = {wi} and ω{j} = {wj} have integer ratio {:.0}",
                    ratio.round()
                )));
            }
        }
    }
    Ok(())
}

fn bosonic_subsystems(terms: &[LadderMonomial]) -> Vec<usize> {
    let mut out: Vec<usize> = terms
        .iter()
        .flat_map(|t| t.factors.iter())
        .filter(|(_, k)| k.is_bosonic())
        .map(|&(i, _)| i)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Splits `terms` into resonant and counter-rotating sets.
///
/// Fails if two bosonic subsystems touched by the terms have commensurate
/// frequencies, since the term-by-term selection is then ambiguous.
pub fn classify_terms(
    terms: &[LadderMonomial],
    frequencies: &[f64],
    drive: f64,
    tolerance: f64,
) -> Result<TermClassification> {
    if !(tolerance >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be non-negative, got {tolerance}"
        )));
    }
    let mut out = TermClassification::default();
    for t in terms {
        t.validate()?;
        interaction_frequency(t, frequencies, drive)?;
    }
    check_nondegenerate(frequencies, &bosonic_subsystems(terms))?;
    for t in terms {
        let detuning = interaction_frequency(t, frequencies, drive)?;
        if detuning.abs() <= tolerance {
            out.resonant.push(t.clone());
        } else {
            out.counter_rotating.push(DetunedTerm {
                term: t.clone(),
                detuning,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KerrMode {
    Keep,
    #[default]
    Drop,
    /// Replace the resonant quartics by their vacuum expectation value.
    ConstantShift,
}

impl std::str::FromStr for KerrMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "keep" => Ok(KerrMode::Keep),
            "drop" => Ok(KerrMode::Drop),
            "constant-shift" => Ok(KerrMode::ConstantShift),
            other => Err(Error::Unknown {
                what: "kerr mode",
                name: other.into(),
            }),
        }
    }
}

/// Undriven, purely bosonic and number conserving on every mode.
pub fn is_kerr_like(term: &LadderMonomial) -> bool {
    term.drive_sign == 0
        && !term.factors.is_empty()
        && term.factors.iter().all(|(_, k)| k.is_bosonic())
        && term.net_signs().values().all(|&s| s == 0)
}

/// `⟨0|word|0⟩` for a single-mode word in the untruncated Fock space.
fn vacuum_word(word: &[OpKind]) -> f64 {
    let mut amps = vec![1.0f64];
    for &k in word.iter().rev() {
        let mut next = vec![0.0; amps.len() + 1];
        for (n, &a) in amps.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match k {
                OpKind::Create => next[n + 1] += (n as f64 + 1.0).sqrt() * a,
                OpKind::Annihilate if n > 0 => next[n - 1] += (n as f64).sqrt() * a,
                OpKind::Number => next[n] += n as f64 * a,
                _ => {}
            }
        }
        amps = next;
    }
    amps[0]
}

/// Vacuum expectation of a bosonic monomial.
pub fn vacuum_expectation(term: &LadderMonomial) -> Complex64 {
    let mut per_mode: BTreeMap<usize, Vec<OpKind>> = BTreeMap::new();
    for &(i, k) in &term.factors {
        per_mode.entry(i).or_default().push(k);
    }
    term.coeff * per_mode.values().map(|w| vacuum_word(w)).product::<f64>()
}

/// Resonant part of `terms`, expressed in the interaction picture.
///
/// Kept terms are time independent there, so their drive sign is cleared.
/// Each drive factor already contributed its ½ when the cosine was split.
pub fn rwa_reduce(
    terms: &[LadderMonomial],
    frequencies: &[f64],
    drive: f64,
    tolerance: f64,
    kerr: KerrMode,
) -> Result<Vec<LadderMonomial>> {
    let class = classify_terms(terms, frequencies, drive, tolerance)?;
    let mut kept = Vec::new();
    let mut shift = Complex64::new(0.0, 0.0);
    for t in class.resonant {
        if is_kerr_like(&t) {
            match kerr {
                KerrMode::Keep => {}
                KerrMode::Drop => continue,
                KerrMode::ConstantShift => {
                    shift += vacuum_expectation(&t);
                    continue;
                }
            }
        }
        kept.push(LadderMonomial { drive_sign: 0, ..t });
    }
    if kerr == KerrMode::ConstantShift && shift != Complex64::new(0.0, 0.0) {
        kept.push(LadderMonomial::identity(shift));
    }
    Ok(merge_terms(&kept))
}

/// Lab-frame Hamiltonian of the pumped cavity split into the free part
/// `Σ ω_n a_n† a_n` and everything else.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpandedHamiltonian {
    pub free: Vec<LadderMonomial>,
    pub interaction: Vec<LadderMonomial>,
}

impl ExpandedHamiltonian {
    pub fn all_terms(&self) -> Vec<LadderMonomial> {
        self.free.iter().chain(&self.interaction).cloned().collect()
    }
}

/// Every ordered product `Σ T_{n…} X_n X_m …` with `X = a + a†`, scaled by
/// `scale` and split over the drive signs in `drive_signs`.
fn expand_power(
    tensor: &CouplingTensor,
    scale: f64,
    drive_signs: &[i8],
    out: &mut Vec<LadderMonomial>,
) {
    let rank = tensor.rank;
    let modes = tensor.modes;
    let choices = 2 * modes;
    let total = choices.pow(rank as u32);
    let mut digits = vec![0usize; rank];
    for _ in 0..total {
        let idx: Vec<usize> = digits.iter().map(|d| d / 2).collect();
        let value = tensor.get(&idx) * scale;
        if value != 0.0 {
            let factors: Vec<(usize, OpKind)> = digits
                .iter()
                .map(|d| {
                    let kind = if d % 2 == 0 {
                        OpKind::Create
                    } else {
                        OpKind::Annihilate
                    };
                    (d / 2, kind)
                })
                .collect();
            for &s in drive_signs {
                out.push(LadderMonomial::new(
                    factors.clone(),
                    Complex64::new(value, 0.0),
                    s,
                ));
            }
        }
        for slot in digits.iter_mut().rev() {
            *slot += 1;
            if *slot < choices {
                break;
            }
            *slot = 0;
        }
    }
}

/// Expands the quantized circuit Hamiltonian into merged monomials.
///
/// `H = Σ ω a†a + λ cos(ω_d t)[M̃1 X + M̃2 XX − M̃3 XXX + M̃4 XXXX] − Ñ4 XXXX`
pub fn expand_total_hamiltonian(
    frequencies: &[f64],
    table: &CouplingTable,
    pump_amplitude: f64,
) -> Result<ExpandedHamiltonian> {
    let modes = table.tilde.m1.modes;
    if frequencies.len() != modes {
        return Err(Error::LayoutMismatch(format!(
            "{} frequencies for {modes} coupling modes",
            frequencies.len()
        )));
    }
    let free = frequencies
        .iter()
        .enumerate()
        .map(|(n, &w)| {
            LadderMonomial::undriven(
                vec![(n, OpKind::Create), (n, OpKind::Annihilate)],
                Complex64::new(w, 0.0),
            )
        })
        .collect();
    let half = 0.5 * pump_amplitude;
    let t = &table.tilde;
    let mut raw = Vec::new();
    expand_power(&t.m1, half, &[1, -1], &mut raw);
    expand_power(&t.m2, half, &[1, -1], &mut raw);
    expand_power(&t.m3, -half, &[1, -1], &mut raw);
    expand_power(&t.m4, half, &[1, -1], &mut raw);
    expand_power(&t.n4, -1.0, &[0], &mut raw);
    Ok(ExpandedHamiltonian {
        free,
        interaction: merge_terms(&raw),
    })
}
