//! Truncated hybrid registers of bosonic modes and qubits.
//!
//! Basis ordering is big-endian: subsystem 0 is the slowest-varying index of
//! the flat basis. Qubit level 0 is the ground state, so `σ⁺|0⟩ = |1⟩` and
//! `σz = diag(−1, +1)`.
//!
//! Quadratures follow `x = (a + a†)/√2`, `p = i(a† − a)/√2`, giving vacuum
//! variance ½. Every covariance consumer in the crate relies on this.

mod moments;
mod operator;
mod state;

pub use moments::{covariance_matrix, uncertainty_min_eigenvalue};
pub use operator::{apply_to_basis, build_operator, build_sum, OperatorMatrix};
pub use state::{fock_state, ghz, hermitian_spectrum, vacuum, w_state, QuantumState, StateRepr};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubsystemKind {
    Boson,
    Qubit,
}

impl SubsystemKind {
    pub fn name(self) -> &'static str {
        match self {
            SubsystemKind::Boson => "boson",
            SubsystemKind::Qubit => "qubit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Subsystem {
    pub kind: SubsystemKind,
    pub dim: usize,
}

impl Subsystem {
    /// Bosonic mode keeping Fock levels `0..=cutoff`.
    pub fn boson(cutoff: usize) -> Self {
        Self {
            kind: SubsystemKind::Boson,
            dim: cutoff + 1,
        }
    }

    pub fn qubit() -> Self {
        Self {
            kind: SubsystemKind::Qubit,
            dim: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegisterLayout {
    pub subsystems: Vec<Subsystem>,
}

impl RegisterLayout {
    pub fn new(subsystems: Vec<Subsystem>) -> Result<Self> {
        let layout = Self { subsystems };
        layout.validate()?;
        Ok(layout)
    }

    pub fn validate(&self) -> Result<()> {
        if self.subsystems.is_empty() {
            return Err(Error::LayoutMismatch("register has no subsystems".into()));
        }
        for (i, s) in self.subsystems.iter().enumerate() {
            if s.dim < 2 {
                return Err(Error::LayoutMismatch(format!(
                    "subsystem {i} has dimension {} (< 2)",
                    s.dim
                )));
            }
            if s.kind == SubsystemKind::Qubit && s.dim != 2 {
                return Err(Error::LayoutMismatch(format!(
                    "qubit subsystem {i} has dimension {}",
                    s.dim
                )));
            }
        }
        self.subsystems
            .iter()
            .try_fold(1usize, |acc, s| acc.checked_mul(s.dim))
            .ok_or_else(|| Error::LayoutMismatch("total dimension overflows".into()))?;
        Ok(())
    }

    /// `modes` bosons with a common Fock cutoff.
    pub fn bosons(modes: usize, cutoff: usize) -> Result<Self> {
        Self::new(vec![Subsystem::boson(cutoff); modes])
    }

    pub fn qubits(count: usize) -> Result<Self> {
        Self::new(vec![Subsystem::qubit(); count])
    }

    /// Bosons first, then qubits.
    pub fn hybrid(modes: usize, cutoff: usize, qubits: usize) -> Result<Self> {
        let mut subs = vec![Subsystem::boson(cutoff); modes];
        subs.extend(std::iter::repeat(Subsystem::qubit()).take(qubits));
        Self::new(subs)
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.subsystems.iter().map(|s| s.dim).product()
    }

    pub fn kind(&self, index: usize) -> Result<SubsystemKind> {
        self.subsystems
            .get(index)
            .map(|s| s.kind)
            .ok_or(Error::IndexOutOfRange {
                index,
                len: self.len(),
            })
    }

    /// Flat-index stride of each subsystem.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.len()];
        for i in (0..self.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.subsystems[i + 1].dim;
        }
        strides
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for (slot, s) in out.iter_mut().zip(&self.subsystems).rev() {
            *slot = index % s.dim;
            index /= s.dim;
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.subsystems)
            .fold(0, |acc, (&d, s)| acc * s.dim + d)
    }

    /// Layout of the listed subsystems, in the order given.
    pub fn select(&self, keep: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        let mut subs = Vec::with_capacity(keep.len());
        for &k in keep {
            if k >= self.len() {
                return Err(Error::IndexOutOfRange {
                    index: k,
                    len: self.len(),
                });
            }
            if seen[k] {
                return Err(Error::InvalidParameter(format!(
                    "subsystem {k} listed twice"
                )));
            }
            seen[k] = true;
            subs.push(self.subsystems[k]);
        }
        Self::new(subs)
    }

    /// Indices of bosonic subsystems.
    pub fn boson_indices(&self) -> Vec<usize> {
        self.indices_of(SubsystemKind::Boson)
    }

    pub fn qubit_indices(&self) -> Vec<usize> {
        self.indices_of(SubsystemKind::Qubit)
    }

    fn indices_of(&self, kind: SubsystemKind) -> Vec<usize> {
        self.subsystems
            .iter()
            .enumerate()
            .filter(|(_, s)| s.kind == kind)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn require_kind(&self, indices: &[usize], kind: SubsystemKind) -> Result<()> {
        for &i in indices {
            let k = self.kind(i)?;
            if k != kind {
                return Err(Error::LayoutMismatch(format!(
                    "subsystem {i} is a {}, expected a {}",
                    k.name(),
                    kind.name()
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_roundtrip() {
        let l = RegisterLayout::hybrid(2, 3, 1).unwrap();
        assert_eq!(l.dim(), 32);
        assert_eq!(l.strides(), vec![8, 2, 1]);
        for i in 0..l.dim() {
            assert_eq!(l.index(&l.digits(i)), i);
        }
        assert_eq!(l.digits(1), vec![0, 0, 1]);
        assert_eq!(l.digits(8), vec![1, 0, 0]);
    }

    #[test]
    fn rejects_bad_layouts() {
        assert!(RegisterLayout::new(vec![]).is_err());
        assert!(RegisterLayout::new(vec![Subsystem {
            kind: SubsystemKind::Boson,
            dim: 1
        }])
        .is_err());
        assert!(RegisterLayout::new(vec![Subsystem {
            kind: SubsystemKind::Qubit,
            dim: 3
        }])
        .is_err());
    }

    #[test]
    fn select_checks_indices() {
        let l = RegisterLayout::hybrid(3, 2, 3).unwrap();
        assert_eq!(
            l.select(&[4, 1]).unwrap().subsystems[0].kind,
            SubsystemKind::Qubit
        );
        assert!(l.select(&[6]).is_err());
        assert!(l.select(&[1, 1]).is_err());
    }
}
