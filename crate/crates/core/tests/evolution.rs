use nlslab::evolution::{evolve_observed, monotonicity_check, virial_residual, Stepper};
use nlslab::io::{write_trace, TRACE_MAGIC};
use nlslab::scaling::{locate_omega1, membership, AnalysisConfig};
use nlslab::{evolve, solve_ground_state, EvolutionConfig, GridFunction, Parameters, ShootingConfig, Verdict};
use num_complex::Complex64;

fn l2_distance(u: &[Complex64], v: &[Complex64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

#[test]
fn standing_wave_keeps_its_modulus() {
    let params = Parameters::canonical(1.0);
    let g = solve_ground_state(&params, &ShootingConfig::default()).unwrap();
    let u0 = g.to_grid(32.0, 1024, 1.0).unwrap();
    let phi: Vec<f64> = u0.values().iter().map(|z| z.re).collect();
    let mut worst: f64 = 0.0;
    let tr = evolve_observed(&u0, &params, &EvolutionConfig::default(), |_, u| {
        let e = u.values().iter().zip(&phi).map(|(z, f)| (z.norm() - f).abs()).fold(0.0, f64::max);
        worst = worst.max(e);
    })
    .unwrap();
    assert_eq!(tr.verdict, Verdict::RanToHorizon);
    assert!(worst < 1e-6, "{worst}");
    assert!(tr.conservation_holds());
    assert_eq!(tr.trusted_prefix(), tr.len());
    // the phase rotates at rate ω
    let mid = u0.n() / 2;
    let z = tr.final_state.values()[mid] / phi[mid];
    let expected = Complex64::from_polar(1.0, params.omega * 5.0);
    assert!((z - expected).norm() < 1e-5, "{z}");
    let vr = virial_residual(&tr).unwrap();
    assert!(vr.absolute < 1e-6, "{vr:?}");
}

#[test]
fn gentle_dilations_run_to_horizon() {
    let params = Parameters::canonical(1.0);
    let g = solve_ground_state(&params, &ShootingConfig::default()).unwrap();
    let config = EvolutionConfig {
        t_end: 1.0,
        ..Default::default()
    };
    for lambda in [0.97, 1.03] {
        let tr = evolve(&g.to_grid(32.0, 1024, lambda).unwrap(), &params, &config).unwrap();
        assert_eq!(tr.verdict, Verdict::RanToHorizon, "λ={lambda}");
        assert!(tr.conservation_holds());
        let vr = virial_residual(&tr).unwrap();
        assert!(vr.within(config.virial_tolerance), "λ={lambda}: {}", vr.relative);
    }
}

#[test]
fn free_gaussian_variance() {
    let params = Parameters::new(1, 0.0, 0.0, 3.0, 7.0, 1.0);
    let u0 = GridFunction::from_real_fn(32.0, 1024, |x| (-x * x / 2.0).exp()).unwrap();
    let config = EvolutionConfig {
        t_end: 1.0,
        ..Default::default()
    };
    let tr = evolve(&u0, &params, &config).unwrap();
    // ‖xu‖² = √π/2 (1 + 4t²) and P = ‖u_x‖² = √π/2
    let half = std::f64::consts::PI.sqrt() / 2.0;
    for (t, v) in tr.times.iter().zip(&tr.virial) {
        let exact = half * (1.0 + 4.0 * t * t);
        assert!((v - exact).abs() < 1e-6 * exact, "t={t}");
    }
    let vr = virial_residual(&tr).unwrap();
    assert!(vr.within(1e-6), "{}", vr.relative);
}

fn fixed_steps(u0: &GridFunction, params: &Parameters, dt: f64, t: f64) -> Vec<Complex64> {
    let mut stepper = Stepper::new(u0.n(), u0.half_width(), params, true);
    let mut u = u0.values().to_vec();
    for _ in 0..(t / dt).round() as usize {
        stepper.step(&mut u, dt);
    }
    u
}

#[test]
fn splitting_is_second_order() {
    let params = Parameters::canonical(1.0);
    let g = solve_ground_state(&params, &ShootingConfig::default()).unwrap();
    let u0 = g.to_grid(32.0, 512, 1.03).unwrap();
    let runs: Vec<Vec<Complex64>> = [8e-3, 4e-3, 2e-3, 1e-3]
        .iter()
        .map(|&dt| fixed_steps(&u0, &params, dt, 0.4))
        .collect();
    for w in runs.windows(3) {
        let ratio = l2_distance(&w[0], &w[1]) / l2_distance(&w[1], &w[2]);
        assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
    }
}

#[test]
fn time_reversal() {
    let params = Parameters::canonical(1.0);
    let g = solve_ground_state(&params, &ShootingConfig::default()).unwrap();
    let u0 = g.to_grid(32.0, 512, 1.03).unwrap();
    let mut stepper = Stepper::new(u0.n(), u0.half_width(), &params, false);
    let mut u = u0.values().to_vec();
    for _ in 0..200 {
        stepper.step(&mut u, 2e-3);
    }
    u.iter_mut().for_each(|z| *z = z.conj());
    for _ in 0..200 {
        stepper.step(&mut u, 2e-3);
    }
    u.iter_mut().for_each(|z| *z = z.conj());
    let err = l2_distance(&u, u0.values()) / l2_distance(u0.values(), &vec![Complex64::new(0.0, 0.0); u.len()]);
    assert!(err < 1e-11, "{err}");
}

#[test]
fn grid_resolution_converges() {
    let params = Parameters::canonical(1.0);
    let g = solve_ground_state(&params, &ShootingConfig::default()).unwrap();
    let run = |n: usize| {
        let u0 = g.to_grid(32.0, n, 1.03).unwrap();
        let u = fixed_steps(&u0, &params, 1e-3, 0.2);
        GridFunction::new(32.0, u).unwrap()
    };
    let fine = run(2048);
    let err = |n: usize| {
        let u = run(n);
        let stride = 2048 / n;
        let on: Vec<Complex64> = (0..n).map(|j| fine.values()[stride * j]).collect();
        l2_distance(u.values(), &on) / l2_distance(&on, &vec![Complex64::new(0.0, 0.0); n])
    };
    let (e512, e1024) = (err(512), err(1024));
    assert!(e1024 < 1e-8, "{e1024}");
    assert!(e1024 < 1e-2 * e512, "{e512} {e1024}");
}

/// Dilated ground state above the energy threshold, run until collapse.
#[test]
fn dilated_wave_collapses_with_decreasing_virial() {
    let template = Parameters::canonical(1.0);
    let solver = ShootingConfig::default();
    let w1 = locate_omega1(&template, [1.0, 4.0], &solver, 1e-4).unwrap().omega1;
    let params = template.with_omega(4.0 * w1);
    let g = solve_ground_state(&params, &solver).unwrap();
    let u0 = g.to_grid(8.0, 16384, 1.1).unwrap();
    let analysis = AnalysisConfig::default();
    let m = membership(&u0, &g, &analysis).unwrap();
    assert!(m.in_b, "{m:?}");
    let config = EvolutionConfig {
        dt0: 2e-5,
        t_end: 1.0,
        cfl_safety: 0.002,
        dt_floor: 5e-8,
        blowup_gradient_factor: 10.0,
        ..Default::default()
    };
    let tr = evolve(&u0, &params, &config).unwrap();
    assert!(tr.verdict.is_blowup(), "{:?}", tr.verdict);
    let rep = monotonicity_check(&tr, g.energy(), &m, analysis.slack_tolerance).unwrap();
    assert!(rep.samples_checked >= 5 && rep.worst_excess < 0.0);
    assert!(rep.max_nehari < 0.0 && rep.max_virial < 0.0);

    let mut out = Vec::new();
    write_trace(&mut out, &tr).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with(TRACE_MAGIC));
    assert!(text.contains("# verdict = BLOWUP t_detect="));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), tr.len());
}
