use nlslab::scaling::{
    lemma2_check, lemma_ep_check, locate_omega1, membership, nehari_slope, theorem1_window, verify_shape, AnalysisConfig,
};
use nlslab::{
    critical_points, norms, rescale, solve_ground_state, Error, GroundState, Parameters, RadialProfile, ScalingCurve,
    ShootingConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ground(omega: f64) -> GroundState {
    solve_ground_state(&Parameters::canonical(omega), &ShootingConfig::default()).unwrap()
}

/// Sign changes of E and E' on a dense log grid, as index cells.
fn dense_sign_scan(c: &ScalingCurve, lo: f64, hi: f64, n: usize) -> (Vec<f64>, Vec<usize>, Vec<usize>) {
    let step = (hi / lo).ln() / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| lo * (step * i as f64).exp()).collect();
    let e = |l: f64| c.c2 * l * l - c.c_alpha * l.powf(c.alpha) - c.c_beta * l.powf(c.beta);
    let de = |l: f64| 2.0 * c.c2 * l - c.alpha * c.c_alpha * l.powf(c.alpha - 1.0) - c.beta * c.c_beta * l.powf(c.beta - 1.0);
    let (mut zeros, mut stationary) = (vec![], vec![]);
    for i in 0..n - 1 {
        if (e(grid[i]) > 0.0) != (e(grid[i + 1]) > 0.0) {
            zeros.push(i);
        }
        if (de(grid[i]) > 0.0) != (de(grid[i + 1]) > 0.0) {
            stationary.push(i);
        }
    }
    (grid, zeros, stationary)
}

fn random_curve(rng: &mut ChaCha8Rng) -> ScalingCurve {
    loop {
        let alpha = rng.gen_range(0.2..1.9);
        let beta = rng.gen_range(2.1..6.0);
        let c2 = rng.gen_range(0.5..2.0);
        let ca = rng.gen_range(0.01..c2);
        let cb = rng.gen_range(0.01..c2);
        let c = ScalingCurve::from_coefficients(c2, ca, cb, alpha, beta);
        // keep all four points inside [1e-3, 1e3]
        let inside = c.energy(1.0) > 0.0
            && c.energy(1e-3) < 0.0
            && c.denergy(1e-3) < 0.0
            && c.energy(1e3) < 0.0
            && c.denergy(1e3) < 0.0;
        if inside {
            return c;
        }
    }
}

#[test]
fn random_curves_against_dense_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..30 {
        let c = random_curve(&mut rng);
        let pts = critical_points(&c).unwrap();
        let (grid, zeros, stationary) = dense_sign_scan(&c, 1e-3, 1e3, 1_000_000);
        assert_eq!(zeros.len(), 2, "{c:?}");
        assert_eq!(stationary.len(), 2, "{c:?}");
        let within = |x: f64, i: usize| grid[i.saturating_sub(1)] <= x && x <= grid[(i + 2).min(grid.len() - 1)];
        assert!(within(pts.lambda1, stationary[0]), "{c:?}");
        assert!(within(pts.lambda2, zeros[0]), "{c:?}");
        assert!(within(pts.lambda3, stationary[1]), "{c:?}");
        assert!(within(pts.lambda4, zeros[1]), "{c:?}");
        assert!(verify_shape(&c, &pts, (1e-3, 1e3), 20_000).holds());
    }
}

#[test]
fn ground_state_sits_at_the_maximum() {
    for omega in [4.0, 16.0, 64.0] {
        let g = ground(omega);
        let curve = ScalingCurve::from_norms(&g.diagnostics.base(), &g.params);
        let pts = critical_points(&curve).unwrap();
        assert!((pts.lambda3 - 1.0).abs() < 1e-5, "ω={omega}: {}", pts.lambda3);
        assert!(theorem1_window(&g).unwrap() > 1.0);
    }
    // E(φ_ω) < 0 at ω = 1, so there is no four-point structure
    let g = ground(1.0);
    let curve = ScalingCurve::from_norms(&g.diagnostics.base(), &g.params);
    assert!(matches!(critical_points(&curve), Err(Error::NotPositiveEnergy { .. })));
}

#[test]
fn membership_examples() {
    let g = ground(16.0);
    let config = AnalysisConfig::default();
    let v = rescale(&g.profile, 1.05).unwrap();
    let m = membership(&v, &g, &config).unwrap();
    assert!(m.in_b, "{m:?}");
    assert!(!membership(&g.profile, &g, &config).unwrap().in_b);
    let m = membership(&rescale(&g.profile, 0.5).unwrap(), &g, &config).unwrap();
    assert!(!m.in_b && !m.virial_negative.holds);
    let low = ground(1.0);
    assert!(matches!(membership(&low.profile, &low, &config), Err(Error::HypothesisFailure(_))));
}

fn perturbed(g: &GroundState, rng: &mut ChaCha8Rng) -> RadialProfile {
    let eps = rng.gen_range(-0.1..0.0);
    let bump = rng.gen_range(-0.1..0.1);
    let width = rng.gen_range(0.1..1.0);
    let values = g
        .profile
        .r
        .iter()
        .zip(&g.profile.values)
        .map(|(&r, &v)| v * (1.0 + eps + bump * (r / width) * (-(r / width).powi(2)).exp()))
        .collect();
    RadialProfile::new(g.profile.r.clone(), values, 1).unwrap()
}

#[test]
fn lemma2_on_virial_zero_perturbations() {
    let g = ground(16.0);
    let config = AnalysisConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for _ in 0..60 {
        let v = perturbed(&g, &mut rng);
        let curve = ScalingCurve::from_norms(&norms(&v, &g.params).unwrap().base(), &g.params);
        let Ok(pts) = critical_points(&curve) else { continue };
        let w = rescale(&v, pts.lambda3).unwrap();
        let rep = norms(&w, &g.params).unwrap();
        if !(rep.energy > 0.0 && rep.nehari < 0.0) {
            continue;
        }
        let r = lemma2_check(&w, &g, &config).unwrap();
        assert!(r.holds && r.margin > 0.0, "{r:?}");
        assert!(r.lambda0 > 0.0 && r.lambda0 < 1.0);
        assert!(r.nehari_at_lambda0.abs() < 1e-8 * r.action);
        assert!(r.nehari_rescaled.abs() < 1e-6 * r.action);
        assert!(r.action_at_lambda0 >= r.d_omega * (1.0 - 1e-9));
        checked += 1;
    }
    assert!(checked >= 20, "only {checked} admissible inputs");
    // P ≠ 0
    let off = rescale(&g.profile, 0.9).unwrap();
    assert!(matches!(lemma2_check(&off, &g, &config), Err(Error::HypothesisFailure(_))));
    // P = 0 but K > 0
    let values = g.profile.values.iter().map(|v| 1.05 * v).collect();
    let v = RadialProfile::new(g.profile.r.clone(), values, 1).unwrap();
    let curve = ScalingCurve::from_norms(&norms(&v, &g.params).unwrap().base(), &g.params);
    let w = rescale(&v, critical_points(&curve).unwrap().lambda3).unwrap();
    assert!(matches!(lemma2_check(&w, &g, &config), Err(Error::HypothesisFailure(_))));
}

#[test]
fn lemma_ep_along_the_dilation_window() {
    let g = ground(16.0);
    let config = AnalysisConfig::default();
    let upper = theorem1_window(&g).unwrap();
    for i in 1..=20 {
        let lambda = 1.0 + (upper - 1.0) * i as f64 / 21.0;
        let v = rescale(&g.profile, lambda).unwrap();
        let r = lemma_ep_check(&v, &g, &config).unwrap();
        assert!(r.holds && r.slack >= -1e-8, "λ={lambda}: {r:?}");
        assert!(r.energy_at_lambda0 >= r.ground_energy - 1e-8);
        assert!(r.energy_at_lambda3 >= r.energy_at_lambda0 - 1e-8);
        assert!(r.energy - r.virial >= r.energy_at_lambda3 - 1e-8);
    }
    let outside = rescale(&g.profile, 0.9).unwrap();
    assert!(matches!(lemma_ep_check(&outside, &g, &config), Err(Error::HypothesisFailure(_))));
}

#[test]
fn nehari_slope_two_ways() {
    for omega in [4.0, 16.0] {
        let g = ground(omega);
        let s = nehari_slope(&g, &g.profile, 1e-4).unwrap();
        assert!(s.analytic < 0.0);
        assert!((s.analytic - s.finite_difference).abs() <= 1e-6 * s.analytic.abs(), "{s:?}");
    }
}

#[test]
fn omega1_on_the_canonical_instance() {
    let template = Parameters::canonical(1.0);
    let config = ShootingConfig::default();
    let rep = locate_omega1(&template, [1.0, 4.0], &config, 1e-6).unwrap();
    assert!(rep.all_signs_agree());
    assert!(rep.omega1 > 1.0 && rep.omega1 < 4.0);
    let e = |w: f64| solve_ground_state(&template.with_omega(w), &config).unwrap().energy();
    assert!(e(0.9 * rep.omega1) < 0.0 && e(1.1 * rep.omega1) > 0.0);
    assert!(matches!(
        locate_omega1(&template, [4.0, 8.0], &config, 1e-6),
        Err(Error::NoSignChange { .. })
    ));
}
