use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::hermitian_spectrum;
use super::{QuantumState, SubsystemKind};
use crate::error::Result;
use crate::rwa::{LadderMonomial, OpKind};

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Symmetrized quadrature covariance matrix over `modes`, ordered
/// `(x_1 … x_m, p_1 … p_m)`.
///
/// Built from `⟨a_i a_j⟩`, `⟨a_i† a_j⟩` and `⟨a_i⟩`. The commutator term on
/// the diagonal is taken as exactly ½, which keeps the truncated result equal
/// to the untruncated one.
pub fn covariance_matrix(state: &QuantumState, modes: &[usize]) -> Result<DMatrix<f64>> {
    state.layout().require_kind(modes, SubsystemKind::Boson)?;
    let m = modes.len();
    let mut alpha = vec![Complex64::new(0.0, 0.0); m];
    for (k, &i) in modes.iter().enumerate() {
        alpha[k] = state.moment(&LadderMonomial::undriven(
            vec![(i, OpKind::Annihilate)],
            one(),
        ))?;
    }
    let mut v = DMatrix::zeros(2 * m, 2 * m);
    for (r, &i) in modes.iter().enumerate() {
        for (s, &j) in modes.iter().enumerate() {
            let aa = state.moment(&LadderMonomial::undriven(
                vec![(i, OpKind::Annihilate), (j, OpKind::Annihilate)],
                one(),
            ))?;
            let ba = state.moment(&LadderMonomial::undriven(
                vec![(i, OpKind::Create), (j, OpKind::Annihilate)],
                one(),
            ))?;
            let delta = if r == s { 0.5 } else { 0.0 };
            let (ar, ai) = (alpha[r], alpha[s]);
            v[(r, s)] = aa.re + ba.re + delta - 2.0 * ar.re * ai.re;
            v[(m + r, m + s)] = -aa.re + ba.re + delta - 2.0 * ar.im * ai.im;
            let xp = aa.im + ba.im - 2.0 * ar.re * ai.im;
            v[(r, m + s)] = xp;
            v[(m + s, r)] = xp;
        }
    }
    Ok(v)
}

/// Smallest eigenvalue of `V + (i/2)Ω` with `Ω = [[0, I], [−I, 0]]`; the
/// uncertainty relation requires it to be non-negative.
pub fn uncertainty_min_eigenvalue(v: &DMatrix<f64>) -> f64 {
    let n = v.nrows();
    let m = n / 2;
    let mut h = DMatrix::from_fn(n, n, |r, c| Complex64::new(v[(r, c)], 0.0));
    for k in 0..m {
        h[(k, m + k)] += Complex64::new(0.0, 0.5);
        h[(m + k, k)] -= Complex64::new(0.0, 0.5);
    }
    hermitian_spectrum(&h)[0]
}
