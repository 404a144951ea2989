use std::f64::consts::PI;

use nongauss::dynamics::*;
use nongauss::hilbert::*;
use nongauss::rwa::{rwa_reduce, KerrMode, LadderMonomial, OpKind};
use num_complex::Complex64;

use OpKind::{Annihilate, Create, PauliMinus, PauliPlus, PauliZ};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn mono(factors: Vec<(usize, OpKind)>, v: f64) -> LadderMonomial {
    LadderMonomial::undriven(factors, c(v))
}

fn number(m: usize, w: f64) -> LadderMonomial {
    mono(vec![(m, Create), (m, Annihilate)], w)
}

fn triple(g0: f64) -> HamiltonianSpec {
    let up = mono(vec![(0, Create), (1, Create), (2, Create)], g0);
    HamiltonianSpec::from_static(vec![up.conjugate(), up])
}

fn occupation(s: &QuantumState, m: usize) -> f64 {
    s.moment(&number(m, 1.0)).unwrap().re
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

#[test]
fn jaynes_cummings_period() {
    let g = 0.05;
    let l = RegisterLayout::hybrid(1, 3, 1).unwrap();
    let jc = mono(vec![(0, Annihilate), (1, PauliPlus)], g);
    let h = HamiltonianSpec::from_static(vec![jc.conjugate(), jc]);
    let psi0 = fock_state(&l, &[0, 1]).unwrap();
    let times = linspace(0.0, PI / g, 41);
    let traj = evolve(&h, &psi0, &times, StepControl::default()).unwrap();
    let pe = mono(vec![(1, PauliPlus), (1, PauliMinus)], 1.0);
    for (t, s) in times.iter().zip(&traj.states) {
        let want = (g * t).cos().powi(2);
        assert!((s.moment(&pe).unwrap().re - want).abs() < 1e-7, "t = {t}");
    }
}

#[test]
fn rabi_model_reduces_to_jaynes_cummings() {
    let (w, g) = (1.0, 0.01);
    let l = RegisterLayout::hybrid(1, 4, 1).unwrap();
    let mut full = vec![number(0, w), mono(vec![(1, PauliZ)], 0.5 * w)];
    for a in [Annihilate, Create] {
        for s in [PauliPlus, PauliMinus] {
            full.push(mono(vec![(0, a), (1, s)], g));
        }
    }
    let coupling = full[2..].to_vec();
    let kept = rwa_reduce(&coupling, &[w, w], 0.0, 1e-9, KerrMode::Keep).unwrap();
    assert_eq!(kept.len(), 2);
    let rwa = HamiltonianSpec::from_static(kept);
    let full = HamiltonianSpec::from_static(full);
    let psi0 = fock_state(&l, &[0, 1]).unwrap();
    let times = linspace(0.0, PI / (2.0 * g), 21);
    let a = evolve(&full, &psi0, &times, StepControl::default()).unwrap();
    let b = evolve(&rwa, &psi0, &times, StepControl::default()).unwrap();
    let pe = mono(vec![(1, PauliPlus), (1, PauliMinus)], 1.0);
    for (sa, sb) in a.states.iter().zip(&b.states) {
        let (x, y) = (sa.moment(&pe).unwrap().re, sb.moment(&pe).unwrap().re);
        assert!((x - y).abs() < 0.02, "{x} vs {y}");
    }
    let compiled = full.compile(&l).unwrap();
    let e0 = compiled.energy(0.0, &a.states[0]).unwrap();
    let e1 = compiled
        .energy(*times.last().unwrap(), a.states.last().unwrap())
        .unwrap();
    assert!((e1 - e0).abs() < 1e-7);
}

#[test]
fn driven_triple_model_matches_its_rotating_wave_reduction() {
    let g0 = 0.01;
    let w = [10.0, 13.7, 19.1];
    let wd: f64 = w.iter().sum();
    let up = vec![(0, Create), (1, Create), (2, Create)];
    let down = vec![(0, Annihilate), (1, Annihilate), (2, Annihilate)];
    // 2g₀ cos(ω_d t)(a†a†a† + aaa), split over both drive signs.
    let mut driven = Vec::new();
    for s in [1i8, -1] {
        driven.push(LadderMonomial::new(up.clone(), c(g0), s));
        driven.push(LadderMonomial::new(down.clone(), c(g0), s));
    }
    let kept = rwa_reduce(&driven, &w, wd, 1e-9, KerrMode::Keep).unwrap();
    assert_eq!(kept.len(), 2);
    assert!(kept.iter().all(|t| (t.coeff - c(g0)).norm() < 1e-15));

    let mut lab = driven.clone();
    lab.extend((0..3).map(|m| number(m, w[m])));
    let lab = HamiltonianSpec {
        static_terms: lab,
        driven: Vec::new(),
        drive_frequency: wd,
    };
    let l = RegisterLayout::bosons(3, 4).unwrap();
    let times: Vec<f64> = [0.0, 0.02, 0.05, 0.1].iter().map(|x| x / g0).collect();
    let a = evolve(&lab, &vacuum(&l), &times, StepControl::default()).unwrap();
    let b = evolve(
        &HamiltonianSpec::from_static(kept),
        &vacuum(&l),
        &times,
        StepControl::default(),
    )
    .unwrap();
    for k in 1..times.len() {
        for m in 0..3 {
            let (x, y) = (occupation(&a.states[k], m), occupation(&b.states[k], m));
            assert!(
                (x - y).abs() <= 0.05 * y,
                "g0t = {}: {x} vs {y}",
                g0 * times[k]
            );
        }
    }
}

#[test]
fn integrator_matches_eigendecomposition_on_down_conversion() {
    let l = RegisterLayout::bosons(3, 8).unwrap();
    let h = triple(1.0);
    let times = linspace(0.0, 0.3, 7);
    let traj = evolve(&h, &vacuum(&l), &times, StepControl::default()).unwrap();
    let prop = ExpmPropagator::new(&h, &l).unwrap();
    for (t, s) in times.iter().zip(&traj.states) {
        let ex = prop.propagate(&vacuum(&l), *t).unwrap();
        let d = s.amplitudes().unwrap() - ex.amplitudes().unwrap();
        assert!(d.norm() < 1e-7, "t = {t}: {}", d.norm());
    }
}

#[test]
fn driven_displacement_matches_closed_form() {
    // H = ω a†a + f(t)(a + a†) gives a coherent state with
    // α(t) = −i e^{−iωt} ∫₀ᵗ f(s) e^{iωs} ds.
    let w = 1.0;
    let env = Envelope::Cosine {
        amplitude: 0.05,
        frequency: 0.9,
        phase: 0.3,
    };
    let h = HamiltonianSpec {
        static_terms: vec![number(0, w)],
        driven: vec![DrivenGroup {
            envelope: env.clone(),
            terms: vec![
                mono(vec![(0, Annihilate)], 1.0),
                mono(vec![(0, Create)], 1.0),
            ],
        }],
        drive_frequency: 0.0,
    };
    let l = RegisterLayout::bosons(1, 14).unwrap();
    let times = linspace(0.0, 20.0, 11);
    let traj = evolve(&h, &vacuum(&l), &times, StepControl::default()).unwrap();
    let a = mono(vec![(0, Annihilate)], 1.0);
    for (t, s) in times.iter().zip(&traj.states) {
        let n = 4000;
        let dt = t / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..=n {
            let x = i as f64 * dt;
            let wgt = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += Complex64::from_polar(env.eval(x), w * x) * wgt;
        }
        let alpha =
            Complex64::new(0.0, -1.0) * Complex64::from_polar(1.0, -w * t) * acc * (dt / 3.0);
        assert!((s.moment(&a).unwrap() - alpha).norm() < 1e-8, "t = {t}");
    }
}

#[test]
fn tighter_control_reduces_norm_drift() {
    let l = RegisterLayout::bosons(3, 6).unwrap();
    let h = triple(1.0);
    let times = linspace(0.0, 0.5, 11);
    let loose = StepControl {
        atol: 1e-5,
        rtol: 1e-4,
        ..StepControl::default()
    };
    let a = evolve(&h, &vacuum(&l), &times, loose).unwrap();
    let b = evolve(&h, &vacuum(&l), &times, StepControl::default()).unwrap();
    assert!(b.max_norm_drift() < a.max_norm_drift());
    assert!(b.max_norm_drift() < 1e-8);
    assert!(b.steps > a.steps);
}

#[test]
fn strongly_driven_truncation_is_flagged() {
    let h = triple(1.0);
    let times = linspace(0.0, 1.0, 11);
    let run = |cut: usize| {
        let l = RegisterLayout::bosons(3, cut)?;
        let mut traj = evolve(&h, &vacuum(&l), &times, StepControl::default())?;
        traj.record("n1", |_, s| Ok(occupation(s, 0)))?;
        Ok(traj)
    };
    let report = cutoff_sweep(run, &[4, 6], 1e-6).unwrap();
    assert!(!report.converged());
    assert_eq!(report.offenders(), vec!["n1".to_string()]);

    let weak = linspace(0.0, 0.1, 11);
    let run = |cut: usize| {
        let l = RegisterLayout::bosons(3, cut)?;
        let mut traj = evolve(&h, &vacuum(&l), &weak, StepControl::default())?;
        traj.record("n1", |_, s| Ok(occupation(s, 0)))?;
        Ok(traj)
    };
    assert!(cutoff_sweep(run, &[6, 8], 1e-6).unwrap().converged());
}

#[test]
fn invalid_inputs_rejected() {
    let l = RegisterLayout::bosons(1, 3).unwrap();
    let h = HamiltonianSpec::from_static(vec![number(0, 1.0)]);
    let psi = vacuum(&l);
    assert!(evolve(&h, &psi, &[0.0, 1.0, 0.5], StepControl::default()).is_err());
    let bad = StepControl {
        atol: 0.0,
        ..StepControl::default()
    };
    assert!(evolve(&h, &psi, &[0.0, 1.0], bad).is_err());
    let on_qubit = HamiltonianSpec::from_static(vec![mono(vec![(0, PauliZ)], 1.0)]);
    assert!(evolve(&on_qubit, &psi, &[0.0, 1.0], StepControl::default()).is_err());
    assert!(ExpmPropagator::new(
        &HamiltonianSpec {
            static_terms: vec![],
            driven: vec![DrivenGroup {
                envelope: Envelope::Constant { value: 1.0 },
                terms: vec![number(0, 1.0)],
            }],
            drive_frequency: 0.0,
        },
        &l
    )
    .is_err());
}
