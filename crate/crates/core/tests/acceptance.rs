//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria 2 and 3 ask for the envelope `e^{-σt}‖x‖`, which the critically
//! damped mode exceeds by its `(1 + σt)` factor. They are evaluated as stated
//! and listed in `EXPECTED_FAILURES`; the run fails on any other failure and
//! also if one of those two starts passing.

use std::f64::consts::{E, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use schrodhelm::dds::{
    build_damped, build_damped_with, integrate_reference, reference_trajectory, DampedSystem, StepControl,
};
use schrodhelm::diagnostics::{self, measurement_report, recovery_index_set, DEFAULT_LOG_CAP};
use schrodhelm::experiment::{run_experiment, ExperimentConfig, TimeSpec};
use schrodhelm::helmholtz::{
    apply_interior_stencil, build_preconditioned, build_system, dirichlet_laplacian_eigenvalues,
    preconditioned_dirichlet_spectrum, shifted_wavenumber, HelmholtzProblem, PreconditionMode, RightBoundary,
};
use schrodhelm::linalg::{real, CMatrix, CVector, I, ZERO};
use schrodhelm::schrod::{
    build_schrod, dense_generator, evolve, hermitian_bounds, hermitian_split, homogenize, recover, EvolveOptions,
    PDomain, Profile, RecoveryStrategy, SchrodOptions, SchrodSystem,
};

/// Criteria that cannot hold for critically damped flows, with the reason.
const EXPECTED_FAILURES: &[(u32, &str)] = &[
    (2, "critically damped modes decay as (1 + σt)e^{-σt}, above the e^{-σt} envelope"),
    (3, "at T = log(1/ε)/σ the flow error alone is ε(1 + log(1/ε)) ≈ 7.9ε"),
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn helmholtz(k: f64, cells: usize) -> (CMatrix, CVector) {
    let sys = build_system(&HelmholtzProblem::with_cells(k, cells).unwrap()).unwrap();
    (sys.dense(), sys.rhs)
}

fn lift(sys: &DampedSystem, profile: Profile, m: u32, domain: PDomain, epsilon: f64) -> SchrodSystem {
    build_schrod(sys, &SchrodOptions { profile, domain, m, epsilon, strict: false }).unwrap()
}

fn run_lift(s: &SchrodSystem) -> (CVector, f64) {
    let out = evolve(s, &s.initial_state(), EvolveOptions::default()).unwrap();
    let rec = recover(&out, &s.grid, s.p_diamond, RecoveryStrategy::OnePoint).unwrap();
    (rec.v, out.norm_ratio())
}

fn rel(a: &CVector, b: &CVector) -> f64 {
    (a - b).norm() / b.norm()
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0_f64;
    for k in [10.0, 30.0] {
        for n in 4..=9 {
            let h = 0.5f64.powi(n);
            let k_hat = shifted_wavenumber(k, h).unwrap();
            let u: Vec<Complex64> = (0..=(1usize << n)).map(|j| (I * (k * j as f64 * h)).exp()).collect();
            let res = apply_interior_stencil(k_hat, h, &u);
            worst = worst.max(res.iter().fold(0.0, |a, z| a.max(z.norm())));
        }
    }
    check(worst <= 1e-12, format!("max interior residual {worst:.2e} (tol 1e-12)"))
}

fn decay_ratio(a: &CMatrix, b: &CVector) -> (f64, f64) {
    let sys = build_damped(a, b, 1e-3).unwrap();
    let x = sys.steady_state().unwrap();
    let s = sys.singular_values.min;
    let n = b.len();
    let times: Vec<f64> = (1..=32).map(|i| i as f64 * sys.t_final / 32.0).collect();
    let traj = reference_trajectory(&sys, &times, StepControl::default()).unwrap();
    let mut stated = 0.0_f64;
    let mut corrected = 0.0_f64;
    for (t, v) in times.iter().zip(traj.iter()) {
        let err = (v.rows(0, n) - &x).norm();
        let env = (-s * t).exp() * x.norm();
        stated = stated.max(err / env);
        corrected = corrected.max(err / (env * (1.0 + s * t)));
    }
    (stated, corrected)
}

fn criterion_2() -> Outcome {
    let mut cases = vec![helmholtz(10.0, 16)];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..5 {
        let a = CMatrix::from_fn(16, 16, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let b = CVector::from_fn(16, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        cases.push((a, b));
    }
    let ratios: Vec<(f64, f64)> = cases.iter().map(|(a, b)| decay_ratio(a, b)).collect();
    let stated = ratios.iter().map(|r| r.0).fold(0.0, f64::max);
    let corrected = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    check(
        stated <= 1.0 + 1e-6,
        format!("max ‖v-x‖/(e^(-σt)‖x‖) = {stated:.3} (tol 1+1e-6); with (1+σt) factor: {corrected:.3}"),
    )
}

fn criterion_3(unitarity: &mut Vec<f64>) -> Outcome {
    let eps: f64 = 1e-3;
    let (a, b) = helmholtz(10.0, 16);
    let sv = schrodhelm::extreme_singular_values(&a).unwrap();
    let t = (1.0 / eps).ln() / sv.min;
    let sys = build_damped_with(&a, &b, sv, eps, Some(t)).unwrap();
    let x = sys.steady_state().unwrap();
    let s = lift(&sys, Profile::Cubic, 9, PDomain::default(), eps);
    let (v, ratio) = run_lift(&s);
    unitarity.push(ratio);
    let err = rel(&v, &x);
    let flow = integrate_reference(&sys, t, StepControl::default()).unwrap();
    let flow_err = rel(&flow.rows(0, 16).into_owned(), &x);
    let spectral = rel(&v, &flow.rows(0, 16).into_owned());
    check(
        err <= 2e-3,
        format!("T = {t:.3}: error vs dense solve {err:.3e} (tol 2e-3); flow error {flow_err:.3e}, spectral term {spectral:.3e}"),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let random = CMatrix::from_fn(8, 8, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let configs: Vec<DampedSystem> = vec![
        build_damped(&CMatrix::from_element(1, 1, real(1.0)), &CVector::from_element(1, real(1.0)), (-1.0f64).exp())
            .unwrap(),
        {
            let (a, b) = helmholtz(10.0, 16);
            build_damped(&a, &b, 1e-3).unwrap()
        },
        build_damped(&random, &CVector::from_element(8, real(1.0)), 1e-2).unwrap().with_final_time(3.7),
    ];
    let mut worst = 0.0_f64;
    for sys in &configs {
        let (mf, _) = homogenize(sys).unwrap();
        let (h1, _) = hermitian_split(&mf);
        let (_, hi) = hermitian_bounds(&h1).unwrap();
        worst = worst.max((hi * sys.t_final - 0.5).abs());
    }
    check(worst <= 1e-12, format!("max |λ_max(H1) T - 1/2| = {worst:.2e} over 3 configurations"))
}

fn criterion_6(unitarity: &mut Vec<f64>) -> Outcome {
    let sys = build_damped(&CMatrix::from_element(1, 1, real(1.0)), &CVector::from_element(1, real(1.0)), 0.1).unwrap();
    let s = lift(&sys, Profile::Cubic, 5, PDomain::default(), 0.1);
    let w0 = s.initial_state();
    let out = evolve(&s, &w0, EvolveOptions::default()).unwrap();
    unitarity.push(out.norm_ratio());
    let flat = |m: &CMatrix| CVector::from_iterator(m.len(), m.transpose().iter().copied());
    let dense = (dense_generator(&s) * (-I * s.t_final)).exp() * flat(&w0);
    let err = (flat(&out.w) - &dense).norm() / dense.norm();
    check(err <= 1e-8, format!("N_p = 32, T = {}: mode vs dense generator {err:.2e} (tol 1e-8)", s.t_final))
}

fn criterion_7(unitarity: &mut Vec<f64>) -> Outcome {
    let (a, b) = helmholtz(10.0, 16);
    let sys = build_damped(&a, &b, 1e-3).unwrap();
    let reference = integrate_reference(&sys, sys.t_final, StepControl::default()).unwrap().rows(0, 16).into_owned();
    let mut slopes = Vec::new();
    for (profile, need) in [(Profile::Exponential, 0.9), (Profile::Cubic, 1.9)] {
        let mut dps = Vec::new();
        let mut errs = Vec::new();
        for m in 6..=9 {
            let s = lift(&sys, profile, m, PDomain::default(), 1e-3);
            let (v, ratio) = run_lift(&s);
            unitarity.push(ratio);
            dps.push(s.grid.dp());
            errs.push(rel(&v, &reference));
        }
        slopes.push((profile, diagnostics::fit_loglog_slope(&dps, &errs), need));
    }
    let pass = slopes.iter().all(|(_, s, need)| s >= need);
    let detail = slopes.iter().map(|(p, s, need)| format!("{p}: slope {s:.2} (need ≥ {need})")).collect::<Vec<_>>();
    check(pass, detail.join(", "))
}

fn criterion_8() -> Outcome {
    let problem = HelmholtzProblem::with_cells(10.0, 16).unwrap().with_right_boundary(RightBoundary::Dirichlet(ZERO));
    let sys = build_system(&problem).unwrap();
    let mu_sq = dirichlet_laplacian_eigenvalues(16);
    let mut spectrum_err = 0.0_f64;
    let mut max_mod = 0.0_f64;
    let mut ratios = Vec::new();
    for mode in [PreconditionMode::RealShift, PreconditionMode::ImaginaryShift] {
        let pre = build_preconditioned(&sys, mode).unwrap();
        let mut got: Vec<Complex64> = pre.operator.clone().schur().eigenvalues().unwrap().iter().copied().collect();
        let mut want = preconditioned_dirichlet_spectrum(sys.k_hat, &mu_sq, mode);
        let key = |z: &Complex64| (z.re, z.im);
        got.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        want.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        for (g, w) in got.iter().zip(&want) {
            spectrum_err = spectrum_err.max((g - w).norm());
            max_mod = max_mod.max(g.norm());
        }
        ratios.push(pre.kappa_estimate() / sys.condition_number());
    }
    let pass = spectrum_err <= 1e-10 && max_mod <= 1.0 + 1e-12 && ratios.iter().all(|r| *r <= 0.2);
    check(
        pass,
        format!(
            "spectrum error {spectrum_err:.2e}, max |λ| = {max_mod:.6}, κ(PA)/κ(A) = {:.3} (real), {:.3} (imag)",
            ratios[0], ratios[1]
        ),
    )
}

fn criterion_9() -> Outcome {
    let five_pi = PDomain::Fixed { left: 5.0 * PI, right: 5.0 * PI };
    let base = ExperimentConfig { m: 8, lr: five_pi, checkpoints: 0, ..Default::default() };
    let pre = run_experiment(&ExperimentConfig {
        n: 6,
        t: TimeSpec::Fixed(50.0),
        precondition: PreconditionMode::RealShift,
        ..base.clone()
    })
    .unwrap();
    let plain = run_experiment(&ExperimentConfig { n: 4, t: TimeSpec::Fixed(1000.0), ..base }).unwrap();
    let (e_pre, e_plain) = (pre.metric("err_x_l2").unwrap(), plain.metric("err_x_l2").unwrap());
    check(
        e_pre <= 2.0 * e_plain,
        format!("preconditioned n=6, T=50: {e_pre:.3e}; plain n=4, T=1000: {e_plain:.3e} (need ≤ 2x)"),
    )
}

fn criterion_10() -> Outcome {
    let (a, b) = helmholtz(10.0, 16);
    let sys = build_damped(&a, &b, 1e-3).unwrap();
    let s = lift(&sys, Profile::Exponential, 8, PDomain::default(), 1e-3);
    let out = evolve(&s, &s.initial_state(), EvolveOptions::default()).unwrap();
    let rec = recover(&out, &s.grid, s.p_diamond, RecoveryStrategy::OnePoint).unwrap();
    let r = measurement_report(&out, &s.grid, s.profile, s.p_diamond, DEFAULT_LOG_CAP, &rec.v, &b, s.t_final).unwrap();
    let dp = s.grid.dp();
    let ratio = r.ce0 * r.ce0 / (r.ce * r.ce);
    let bound = 1.0 / (2.0 * E) * (1.0 + 5.0 * dp);
    let direct: f64 = recovery_index_set(&s.grid, s.p_diamond, DEFAULT_LOG_CAP)
        .iter()
        .map(|&k| out.w.row(k).columns(0, 16).norm_squared())
        .sum::<f64>()
        / (out.norm0 * out.norm0);
    let chain = (r.pr0 * r.pr_star * r.v_fraction - direct).abs();
    check(
        ratio <= bound && chain <= 1e-10,
        format!("Ce0²/Ce² = {ratio:.4} (bound {bound:.4}), chain defect {chain:.1e} (tol 1e-10)"),
    )
}

fn criterion_11() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (k, cells) in [(10.0, 16), (20.0, 32), (30.0, 48)] {
        let cfg = ExperimentConfig { k, cells: Some(cells), m: 8, checkpoints: 0, ..Default::default() };
        let rep = run_experiment(&cfg).unwrap();
        let c = rep.metric("g_repeats").unwrap() / (rep.metric("kappa_a").unwrap() * (1.0 / cfg.epsilon).ln());
        parts.push(format!("k={k}: {c:.3}"));
        worst = worst.max(c);
    }
    check(worst <= 10.0, format!("g/(κ log(1/ε)): {} (need C ≤ 10)", parts.join(", ")))
}

fn main() -> ExitCode {
    let mut unitarity = Vec::new();
    let mut results: Vec<(u32, Outcome, Duration, Option<Duration>)> = Vec::new();
    let mut run = |id: u32, limit: Option<Duration>, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let out = f();
        results.push((id, out, start.elapsed(), limit));
    };
    let secs = Duration::from_secs;
    run(1, Some(secs(1)), &mut criterion_1);
    run(2, Some(secs(30)), &mut criterion_2);
    run(3, Some(secs(120)), &mut || criterion_3(&mut unitarity));
    run(5, None, &mut criterion_5);
    run(6, Some(secs(10)), &mut || criterion_6(&mut unitarity));
    run(7, Some(secs(300)), &mut || criterion_7(&mut unitarity));
    run(8, None, &mut criterion_8);
    run(9, Some(secs(180)), &mut criterion_9);
    run(10, None, &mut criterion_10);
    run(11, None, &mut criterion_11);
    let worst = unitarity.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    results.push((
        4,
        check(worst <= 1e-9, format!("max |‖W(T)‖/‖W(0)‖ - 1| = {worst:.1e} over {} runs", unitarity.len())),
        Duration::ZERO,
        None,
    ));
    results.sort_by_key(|r| r.0);

    let mut unexpected = 0;
    for (id, out, elapsed, limit) in &results {
        let in_time = limit.map_or(true, |l| *elapsed <= l);
        let pass = out.pass && in_time;
        let expected = EXPECTED_FAILURES.iter().find(|(e, _)| e == id);
        let timing = match limit {
            Some(l) => format!(" [{:.2}s, limit {}s]", elapsed.as_secs_f64(), l.as_secs()),
            None => format!(" [{:.2}s]", elapsed.as_secs_f64()),
        };
        println!("{} criterion {id}: {}{timing}", if pass { "PASS" } else { "FAIL" }, out.detail);
        match (pass, expected) {
            (false, Some((_, why))) => println!("     expected failure: {why}"),
            (false, None) => unexpected += 1,
            (true, Some(_)) => {
                println!("     criterion {id} passed but is listed as an expected failure");
                unexpected += 1;
            }
            (true, None) => {}
        }
    }
    let passed = results.iter().filter(|r| r.1.pass).count();
    println!("acceptance: {passed}/{} criteria pass, {unexpected} unexpected outcome(s)", results.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
