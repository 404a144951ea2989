use nalgebra::DMatrix;
use nongauss::hilbert::*;
use nongauss::rwa::{LadderMonomial, OpKind};
use num_complex::Complex64;
use proptest::prelude::*;

use OpKind::{Annihilate, Create, PauliMinus, PauliPlus, PauliZ};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn op(layout: &RegisterLayout, factors: Vec<(usize, OpKind)>) -> DMatrix<Complex64> {
    build_operator(&LadderMonomial::undriven(factors, c(1.0)), layout)
        .unwrap()
        .to_dense()
}

fn random_pure(layout: &RegisterLayout, re: &[f64], im: &[f64]) -> QuantumState {
    let amps: Vec<Complex64> = re
        .iter()
        .zip(im)
        .map(|(&a, &b)| Complex64::new(a, b))
        .collect();
    let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    QuantumState::pure(layout, amps.into_iter().map(|a| a / n).collect()).unwrap()
}

fn amplitudes(dim: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(-1.0f64..1.0, dim),
        prop::collection::vec(-1.0f64..1.0, dim),
    )
        .prop_filter("nonzero", |(re, im)| {
            re.iter().chain(im).any(|v| v.abs() > 1e-3)
        })
}

#[test]
fn ladder_matrix_elements() {
    let l = RegisterLayout::bosons(1, 5).unwrap();
    let a = op(&l, vec![(0, Annihilate)]);
    for n in 1..=5 {
        assert!((a[(n - 1, n)] - c((n as f64).sqrt())).norm() < 1e-15);
    }
    let q = RegisterLayout::qubits(1).unwrap();
    let z = op(&q, vec![(0, PauliZ)]);
    assert_eq!((z[(0, 0)].re, z[(1, 1)].re), (-1.0, 1.0));
    assert_eq!(op(&q, vec![(0, PauliPlus)])[(1, 0)], c(1.0));
}

#[test]
fn big_endian_ordering() {
    let l = RegisterLayout::hybrid(1, 2, 1).unwrap();
    assert_eq!(l.dim(), 6);
    assert_eq!(l.index(&[2, 1]), 5);
    assert_eq!(l.index(&[1, 0]), 2);
    assert_eq!(l.digits(3), vec![1, 1]);
    let s = fock_state(&l, &[1, 1]).unwrap();
    assert_eq!(s.amplitudes().unwrap()[3], c(1.0));
}

#[test]
fn commutator_is_identity_below_cutoff() {
    let cutoff = 6;
    let l = RegisterLayout::bosons(2, cutoff).unwrap();
    for m in 0..2 {
        let comm =
            op(&l, vec![(m, Annihilate), (m, Create)]) - op(&l, vec![(m, Create), (m, Annihilate)]);
        for i in 0..l.dim() {
            let n = l.digits(i)[m];
            let want = if n < cutoff { 1.0 } else { -(cutoff as f64) };
            assert!((comm[(i, i)] - c(want)).norm() < 1e-12);
        }
        let off = comm
            .iter()
            .enumerate()
            .filter(|(k, _)| k % (l.dim() + 1) != 0)
            .map(|(_, v)| v.norm());
        assert!(off.fold(0.0, f64::max) < 1e-15);
    }
}

#[test]
fn qubit_algebra() {
    let l = RegisterLayout::qubits(1).unwrap();
    let anti = op(&l, vec![(0, PauliPlus), (0, PauliMinus)])
        + op(&l, vec![(0, PauliMinus), (0, PauliPlus)]);
    assert!((anti - DMatrix::identity(2, 2)).norm() < 1e-15);
    let comm = op(&l, vec![(0, PauliPlus), (0, PauliMinus)])
        - op(&l, vec![(0, PauliMinus), (0, PauliPlus)]);
    assert!((comm - op(&l, vec![(0, PauliZ)])).norm() < 1e-15);
}

#[test]
fn vacuum_covariance_is_half_identity() {
    let l = RegisterLayout::bosons(3, 3).unwrap();
    let v = covariance_matrix(&vacuum(&l), &[0, 1, 2]).unwrap();
    assert!((v - DMatrix::identity(6, 6) * 0.5).norm() < 1e-15);
}

#[test]
fn ghz_and_w_reductions() {
    let l = RegisterLayout::qubits(3).unwrap();
    let g = ghz(&l).unwrap();
    let r = g.partial_trace(&[0]).unwrap();
    assert!((r.purity() - 0.5).abs() < 1e-14);
    assert!((r.entropy() - 2f64.ln()).abs() < 1e-12);
    let w = w_state(&l).unwrap().partial_trace(&[1, 2]).unwrap();
    assert!((w.purity() - 5.0 / 9.0).abs() < 1e-14);
}

#[test]
fn malformed_states_rejected() {
    let l = RegisterLayout::bosons(1, 1).unwrap();
    assert!(QuantumState::pure(&l, vec![c(1.0), c(1.0)]).is_err());
    assert!(QuantumState::pure(&l, vec![c(1.0)]).is_err());
    let neg = DMatrix::from_row_slice(2, 2, &[c(1.5), c(0.0), c(0.0), c(-0.5)]);
    assert!(QuantumState::density(&l, neg).is_err());
    assert!(RegisterLayout::bosons(1, 0).is_err());
    assert!(RegisterLayout::bosons(0, 3).is_err());
}

#[test]
fn json_round_trip() {
    let l = RegisterLayout::hybrid(1, 2, 1).unwrap();
    let s = random_pure(
        &l,
        &[0.1, 0.5, -0.3, 0.2, 0.7, 0.0],
        &[0.0, 0.2, 0.1, -0.4, 0.0, 0.3],
    );
    let back = QuantumState::from_json(&s.to_json().unwrap()).unwrap();
    assert_eq!(back.layout(), s.layout());
    assert!((back.amplitudes().unwrap() - s.amplitudes().unwrap()).norm() < 1e-15);
}

proptest! {
    #[test]
    fn partial_trace_preserves_trace((re, im) in amplitudes(24), keep in 0usize..3) {
        let l = RegisterLayout::new(vec![Subsystem::boson(2), Subsystem::qubit(), Subsystem::boson(3)]).unwrap();
        let s = random_pure(&l, &re, &im);
        let r = s.partial_trace(&[keep]).unwrap();
        prop_assert!((r.density_matrix().trace() - c(1.0)).norm() < 1e-12);
        let rd = s.to_density().partial_trace(&[keep]).unwrap();
        prop_assert!((rd.density_matrix() - r.density_matrix()).norm() < 1e-12);
        prop_assert!(r.spectrum().iter().all(|&p| p > -1e-12));
        // Pure bipartition: both sides share a spectrum.
        let rest: Vec<usize> = (0..3).filter(|&i| i != keep).collect();
        let other = s.partial_trace(&rest).unwrap();
        prop_assert!((r.purity() - other.purity()).abs() < 1e-12);
    }

    #[test]
    fn product_states_factorize((re1, im1) in amplitudes(3), (re2, im2) in amplitudes(2)) {
        let a = random_pure(&RegisterLayout::bosons(1, 2).unwrap(), &re1, &im1);
        let b = random_pure(&RegisterLayout::qubits(1).unwrap(), &re2, &im2);
        let ab = QuantumState::product(&[a.clone(), b.clone()]).unwrap();
        prop_assert!((ab.norm() - 1.0).abs() < 1e-12);
        let ra = ab.partial_trace(&[0]).unwrap();
        prop_assert!((ra.purity() - 1.0).abs() < 1e-12);
        prop_assert!((ra.density_matrix() - a.density_matrix()).norm() < 1e-12);
        let rb = ab.partial_trace(&[1]).unwrap();
        prop_assert!((rb.density_matrix() - b.density_matrix()).norm() < 1e-12);
    }

    #[test]
    fn covariance_obeys_uncertainty((re, im) in amplitudes(16)) {
        let l = RegisterLayout::bosons(2, 3).unwrap();
        let s = random_pure(&l, &re, &im);
        let v = covariance_matrix(&s, &[0, 1]).unwrap();
        prop_assert!((v.clone() - v.transpose()).norm() < 1e-12);
        prop_assert!(uncertainty_min_eigenvalue(&v) > -1e-10);
    }

    #[test]
    fn moments_match_dense_expectation((re, im) in amplitudes(18), m in 0usize..2) {
        let l = RegisterLayout::new(vec![Subsystem::boson(2), Subsystem::boson(2), Subsystem::qubit()]).unwrap();
        let s = random_pure(&l, &re, &im);
        let t = LadderMonomial::undriven(vec![(m, Create), (1 - m, Annihilate), (2, PauliMinus)], c(1.0));
        let dense = op(&l, t.factors.clone());
        let v = s.amplitudes().unwrap();
        let want = (v.adjoint() * dense * v)[(0, 0)];
        prop_assert!((s.moment(&t).unwrap() - want).norm() < 1e-12);
        prop_assert!((s.to_density().moment(&t).unwrap() - want).norm() < 1e-12);
    }
}
