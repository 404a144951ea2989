use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{bipartition_label, WitnessReport};
use crate::error::{Error, Result};
use crate::hilbert::{QuantumState, StateRepr};

fn check_bipartition(n: usize, part: &[usize]) -> Result<()> {
    if part.is_empty() || part.len() >= n {
        return Err(Error::InvalidParameter(
            "bipartition must be a proper, non-empty subset".into(),
        ));
    }
    for (k, &i) in part.iter().enumerate() {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        if part[..k].contains(&i) {
            return Err(Error::InvalidParameter(format!(
                "subsystem {i} listed twice"
            )));
        }
    }
    Ok(())
}

/// Negativity of a pure state from its Schmidt coefficients,
/// `((Σ s)² − Σ s²)/2`.
pub fn schmidt_negativity(state: &QuantumState, part: &[usize]) -> Result<f64> {
    let layout = state.layout();
    check_bipartition(layout.len(), part)?;
    let psi = state
        .amplitudes()
        .ok_or_else(|| Error::InvalidParameter("Schmidt route needs a pure state".into()))?;
    let rest: Vec<usize> = (0..layout.len()).filter(|i| !part.contains(i)).collect();
    let da: usize = part.iter().map(|&i| layout.subsystems[i].dim).product();
    let db: usize = rest.iter().map(|&i| layout.subsystems[i].dim).product();
    let mut m = DMatrix::from_element(da, db, Complex64::new(0.0, 0.0));
    for (i, amp) in psi.iter().enumerate() {
        let d = layout.digits(i);
        let a = part
            .iter()
            .fold(0, |acc, &s| acc * layout.subsystems[s].dim + d[s]);
        let b = rest
            .iter()
            .fold(0, |acc, &s| acc * layout.subsystems[s].dim + d[s]);
        m[(a, b)] = *amp;
    }
    let s = m.singular_values();
    let sum: f64 = s.iter().sum();
    let sq: f64 = s.iter().map(|v| v * v).sum();
    Ok(((sum * sum - sq) / 2.0).max(0.0))
}

/// `(‖ρ^{T_A}‖₁ − Tr ρ)/2` by explicit partial transposition.
fn transpose_negativity(state: &QuantumState, part: &[usize]) -> Result<f64> {
    let layout = state.layout();
    check_bipartition(layout.len(), part)?;
    let rho = state.density_matrix();
    let dim = layout.dim();
    let digits: Vec<Vec<usize>> = (0..dim).map(|i| layout.digits(i)).collect();
    let mut pt = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for i in 0..dim {
        for j in 0..dim {
            let (mut di, mut dj) = (digits[i].clone(), digits[j].clone());
            for &s in part {
                std::mem::swap(&mut di[s], &mut dj[s]);
            }
            pt[(layout.index(&di), layout.index(&dj))] = rho[(i, j)];
        }
    }
    let ev = crate::hilbert::hermitian_spectrum(&pt);
    let abs: f64 = ev.iter().map(|v| v.abs()).sum();
    let tr: f64 = ev.iter().sum();
    Ok(((abs - tr) / 2.0).max(0.0))
}

/// Negativity across `part | rest`. Pure states go through the Schmidt
/// decomposition, mixed ones through the partial transpose.
pub fn ppt_negativity(state: &QuantumState, part: &[usize]) -> Result<f64> {
    match state.repr() {
        StateRepr::Pure(_) => schmidt_negativity(state, part),
        StateRepr::Density(_) => transpose_negativity(state, part),
    }
}

/// Negativity on each single-vs-pair split of three parties; the value is
/// the largest of the three.
pub fn negativity_scan(state: &QuantumState, parties: [usize; 3]) -> Result<WitnessReport> {
    let layout = state.layout();
    let reduced;
    let target = if layout.len() == 3 && parties == [0, 1, 2] {
        state
    } else {
        reduced = state.partial_trace(&parties)?;
        &reduced
    };
    let mut r = WitnessReport::new("negativity", 0.0);
    let mut best = (0, f64::NEG_INFINITY);
    for a in 0..3 {
        let n = ppt_negativity(target, &[a])?;
        r = r.with(&format!("neg_{}", bipartition_label(a)), n);
        if n > best.1 {
            best = (a, n);
        }
    }
    r.value = best.1;
    r.detects = r.value > super::DETECTION_FLOOR;
    r.argmax_bipartition = Some(bipartition_label(best.0));
    Ok(r)
}
