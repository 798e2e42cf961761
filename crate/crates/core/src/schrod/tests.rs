use num_complex::Complex64;

use super::*;
use crate::dds::{build_damped, integrate_reference, StepControl};
use crate::helmholtz::{build_system, HelmholtzProblem};
use crate::linalg::ZERO;

fn scalar_damped(t: Option<f64>) -> DampedSystem {
    let a = CMatrix::from_element(1, 1, real(1.0));
    let b = CVector::from_element(1, real(1.0));
    let sys = build_damped(&a, &b, (-1.0f64).exp()).unwrap();
    match t {
        Some(t) => sys.with_final_time(t),
        None => sys,
    }
}

fn helmholtz_damped(t: Option<f64>) -> DampedSystem {
    let h = build_system(&HelmholtzProblem::new(10.0, 4).unwrap()).unwrap();
    let sys = build_damped(&h.dense(), &h.rhs, 1e-3).unwrap();
    match t {
        Some(t) => sys.with_final_time(t),
        None => sys,
    }
}

fn schrod(sys: &DampedSystem, profile: Profile, m: u32, domain: PDomain) -> SchrodSystem {
    build_schrod(sys, &SchrodOptions { profile, domain, m, epsilon: 1e-3, strict: false }).unwrap()
}

#[test]
fn homogenized_blocks() {
    let sys = helmholtz_damped(Some(40.0));
    let (mf, vf0) = homogenize(&sys).unwrap();
    let d = sys.dim();
    assert_eq!(mf.view((0, 0), (d, d)).into_owned(), sys.generator);
    assert!(mf.rows(d, d).iter().all(|z| *z == ZERO));
    for i in 0..d {
        for j in 0..d {
            let want = if i == j { real(1.0 / 40.0) } else { ZERO };
            assert_eq!(mf[(i, d + j)], want);
        }
    }
    assert!(vf0.rows(0, d).iter().all(|z| *z == ZERO));
    assert_eq!(vf0.rows(d, d).into_owned(), &sys.forcing * real(40.0));
}

#[test]
fn homogenized_flow_matches_reference_integrator() {
    let sys = helmholtz_damped(Some(60.0));
    let (mf, vf0) = homogenize(&sys).unwrap();
    let vf = (&mf * real(sys.t_final)).exp() * &vf0;
    let reference = integrate_reference(&sys, sys.t_final, StepControl::default()).unwrap();
    let d = sys.dim();
    assert!((vf.rows(0, d) - &reference).norm() < 1e-6 * reference.norm());
    // the auxiliary block never moves
    assert!((vf.rows(d, d) - vf0.rows(d, d)).norm() < 1e-12 * vf0.norm());
}

#[test]
fn split_reassembles_and_is_hermitian() {
    let sys = helmholtz_damped(None);
    let (mf, _) = homogenize(&sys).unwrap();
    let (h1, h2) = hermitian_split(&mf);
    assert!(linalg::hermitian_defect(&h1) <= 1e-12 * linalg::max_abs(&h1));
    assert!(linalg::hermitian_defect(&h2) <= 1e-12 * linalg::max_abs(&h2));
    let back = &h1 + &h2 * I;
    assert!(linalg::max_abs(&(back - &mf)) <= 1e-15);
}

#[test]
fn recovery_threshold_is_one_half() {
    for sys in [scalar_damped(None), helmholtz_damped(None), helmholtz_damped(Some(7.3))] {
        let (mf, _) = homogenize(&sys).unwrap();
        let (h1, _) = hermitian_split(&mf);
        let (_, hi) = hermitian_bounds(&h1).unwrap();
        assert!((hi * sys.t_final - 0.5).abs() < 1e-12);
    }
}

#[test]
fn scalar_h1_spectrum() {
    // A = [1], γ = 2, T = 1: eigenvalues ±1/2 and (-2 ± √5)/2
    let (mf, _) = homogenize(&scalar_damped(None)).unwrap();
    let (h1, _) = hermitian_split(&mf);
    let ev = linalg::hermitian_eigenvalues(&h1);
    let s5 = 5f64.sqrt();
    let want = [(-2.0 - s5) / 2.0, -0.5, (-2.0 + s5) / 2.0, 0.5];
    for (got, want) in ev.iter().zip(want) {
        assert!((got - want).abs() < 1e-14);
    }
}

#[test]
fn zero_forcing_stays_zero() {
    let a = CMatrix::identity(2, 2);
    let sys = build_damped(&a, &CVector::zeros(2), 0.1).unwrap();
    let s = schrod(&sys, Profile::Cubic, 5, PDomain::default());
    assert!(s.vf0.iter().all(|z| *z == ZERO));
    let out = evolve(&s, &s.initial_state(), EvolveOptions::default()).unwrap();
    assert!(out.w.iter().all(|z| *z == ZERO));
}

#[test]
fn evolution_is_unitary() {
    let sys = helmholtz_damped(None);
    let s = schrod(&sys, Profile::Exponential, 7, PDomain::default());
    let out = evolve(&s, &s.initial_state(), EvolveOptions::default()).unwrap();
    assert!((out.norm_ratio() - 1.0).abs() < 1e-9);
}

#[test]
fn zero_time_returns_initial_state() {
    let sys = helmholtz_damped(None);
    let s = schrod(&sys, Profile::Cubic, 6, PDomain::default());
    let w0 = s.initial_state();
    let out = evolve_at(&s, &w0, &[0.0], EvolveOptions::default()).unwrap();
    assert_eq!(out[0].w, w0);
}

#[test]
fn mode_evolution_matches_dense_generator() {
    let sys = scalar_damped(Some(2.0));
    let s = schrod(&sys, Profile::Cubic, 5, PDomain::Fixed { left: 6.0, right: 6.0 });
    let w0 = s.initial_state();
    let out = evolve(&s, &w0, EvolveOptions::default()).unwrap();
    let gen = dense_generator(&s);
    let flat0 = CVector::from_iterator(w0.len(), w0.transpose().iter().copied());
    let flat = (&gen * (-I * s.t_final)).exp() * flat0;
    let got = CVector::from_iterator(out.w.len(), out.w.transpose().iter().copied());
    assert!((got - &flat).norm() < 1e-8 * flat.norm());
}

#[test]
fn propagators_agree() {
    let sys = helmholtz_damped(Some(30.0));
    let s = schrod(&sys, Profile::Cubic, 4, PDomain::default());
    let w0 = s.initial_state();
    let run = |p| evolve(&s, &w0, EvolveOptions { propagator: p, ..Default::default() }).unwrap().w;
    let spectral = run(Propagator::Spectral);
    for p in [Propagator::ScalingSquaring, Propagator::Krylov] {
        assert!((run(p) - &spectral).norm() < 1e-8 * spectral.norm(), "{p:?}");
    }
}

#[test]
fn thread_count_does_not_change_result() {
    let sys = helmholtz_damped(None);
    let s = schrod(&sys, Profile::Cubic, 5, PDomain::default());
    let w0 = s.initial_state();
    let one = evolve(&s, &w0, EvolveOptions { threads: 1, ..Default::default() }).unwrap();
    let three = evolve(&s, &w0, EvolveOptions { threads: 3, ..Default::default() }).unwrap();
    assert_eq!(one.w, three.w);
}

#[test]
fn recovery_blocks() {
    let sys = helmholtz_damped(None);
    let s = schrod(&sys, Profile::Cubic, 9, PDomain::default());
    let out = evolve(&s, &s.initial_state(), EvolveOptions::default()).unwrap();
    let rec = recover(&out, &s.grid, s.p_diamond, RecoveryStrategy::OnePoint).unwrap();
    assert!(rec.p >= 0.5 && rec.p - s.grid.dp() < 0.5);
    let tf = &sys.forcing * real(sys.t_final);
    assert!((&rec.r - &tf).norm() < 1e-3 * tf.norm());

    let reference = integrate_reference(&sys, sys.t_final, StepControl::default()).unwrap();
    let v_ref = reference.rows(0, 16).into_owned();
    assert!((&rec.v - &v_ref).norm() < 1e-3 * v_ref.norm());

    // plateau: the three smallest admissible nodes agree
    let at = |k: usize| out.at_node(k).rows(0, 16) * real(s.grid.node(k).exp());
    for k in rec.node + 1..rec.node + 3 {
        assert!((at(k) - &rec.v).norm() < 1e-3 * v_ref.norm());
    }

    let integral = recover(&out, &s.grid, s.p_diamond, RecoveryStrategy::Integral).unwrap();
    assert!((&integral.v - &v_ref).norm() < 1e-2 * v_ref.norm());
}

#[test]
fn recovery_needs_an_admissible_node() {
    let grid = PGrid::new(4.0, 0.4, 16).unwrap();
    let state = EvolvedState { w: CMatrix::zeros(16, 4), time: 1.0, norm0: 1.0, norm_t: 1.0 };
    assert!(matches!(recover(&state, &grid, 0.5, RecoveryStrategy::OnePoint), Err(Error::RecoveryDomain { .. })));
}

#[test]
fn wider_domain_does_not_move_the_solution() {
    let sys = helmholtz_damped(None);
    let base = schrod(&sys, Profile::Cubic, 9, PDomain::default());
    let wide =
        schrod(&sys, Profile::Cubic, 10, PDomain::Fixed { left: 2.0 * base.grid.left, right: 2.0 * base.grid.right });
    let v = |s: &SchrodSystem| {
        let out = evolve(s, &s.initial_state(), EvolveOptions::default()).unwrap();
        recover(&out, &s.grid, s.p_diamond, RecoveryStrategy::OnePoint).unwrap().v
    };
    let (a, b) = (v(&base), v(&wide));
    assert!((&a - &b).norm() < 1e-3 * a.norm());
}

#[test]
fn profile_scales_rows() {
    let grid = PGrid::new(2.0, 2.0, 8).unwrap();
    let vf0 = CVector::from_vec(vec![real(1.0), Complex64::new(0.0, 2.0)]);
    let w = init_profile(Profile::Exponential, &grid, &vf0);
    for k in 0..8 {
        let psi = (-grid.node(k).abs()).exp();
        assert_eq!(w[(k, 0)], real(psi));
        assert_eq!(w[(k, 1)], Complex64::new(0.0, 2.0 * psi));
    }
}
