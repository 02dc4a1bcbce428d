use nlslab::groundstate::{first_integral, shoot, Trajectory};
use nlslab::io::{read_profile, write_profile};
use nlslab::{omega_sweep, solve_ground_state, Error, Parameters, ShootingConfig};

/// Positive root of ω = 2a/(p+1)·φ^{p-1} + 2b/(q+1)·φ^{q-1} by plain bisection.
fn amplitude_oracle(params: &Parameters) -> f64 {
    let f = |x: f64| {
        params.omega
            - 2.0 * params.a / (params.p + 1.0) * x.powf(params.p - 1.0)
            - 2.0 * params.b / (params.q + 1.0) * x.powf(params.q - 1.0)
    };
    let (mut lo, mut hi) = (1e-12, 1.0);
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Single-power soliton of -φ'' + ωφ = cφ^e in one dimension.
fn soliton(c: f64, e: f64, omega: f64, x: f64) -> f64 {
    let amp = ((e + 1.0) * omega / (2.0 * c)).powf(1.0 / (e - 1.0));
    amp * (0.5 * (e - 1.0) * omega.sqrt() * x).cosh().powf(-2.0 / (e - 1.0))
}

#[test]
fn canonical_identities() {
    let config = ShootingConfig::default();
    for omega in [1.0, 4.0, 16.0, 64.0] {
        let g = solve_ground_state(&Parameters::canonical(omega), &config).unwrap();
        assert!(g.nehari_residual() <= 1e-6, "ω={omega}: {}", g.nehari_residual());
        assert!(g.pohozaev_residual() <= 1e-6, "ω={omega}: {}", g.pohozaev_residual());
        assert!(g.profile.is_ground_state_shaped(1e-8));
        let d = &g.diagnostics;
        assert_eq!(d.action, d.energy + 0.5 * omega * d.mass);
    }
}

#[test]
fn amplitude_matches_first_integral_root() {
    let config = ShootingConfig::default();
    for omega in [0.5, 1.0, 3.0, 10.0] {
        let params = Parameters::canonical(omega);
        let g = solve_ground_state(&params, &config).unwrap();
        let oracle = amplitude_oracle(&params);
        assert!((g.phi0 - oracle).abs() < 1e-8 * oracle, "ω={omega}: {} vs {oracle}", g.phi0);
    }
    // 1 = φ₀²/2 + φ₀⁶/4 at ω = 1
    let x = amplitude_oracle(&Parameters::canonical(1.0));
    assert!((x * x / 2.0 + x.powi(6) / 4.0 - 1.0).abs() < 1e-14);
}

#[test]
fn septic_soliton() {
    let params = Parameters::new(1, 0.0, 1.0, 3.0, 7.0, 1.0);
    let g = solve_ground_state(&params, &ShootingConfig::default()).unwrap();
    assert!((g.phi0 - 4f64.powf(1.0 / 6.0)).abs() < 1e-7);
    let err = g
        .profile
        .r
        .iter()
        .zip(&g.profile.values)
        .map(|(&r, &v)| (v - 4f64.powf(1.0 / 6.0) * (3.0 * r).cosh().powf(-1.0 / 3.0)).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-6, "{err}");
}

#[test]
fn cubic_soliton() {
    for omega in [1.0, 2.5] {
        let params = Parameters::new(1, 1.0, 0.0, 3.0, 7.0, omega);
        let g = solve_ground_state(&params, &ShootingConfig::default()).unwrap();
        let err = g
            .profile
            .r
            .iter()
            .zip(&g.profile.values)
            .map(|(&r, &v)| (v - soliton(1.0, 3.0, omega, r)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "ω={omega}: {err}");
    }
}

#[test]
fn shooting_classification() {
    let params = Parameters::new(1, 0.0, 1.0, 3.0, 7.0, 1.0);
    let c = ShootingConfig::default();
    assert!(matches!(shoot(4f64.powf(1.0 / 6.0), &params, &c).unwrap(), Trajectory::Decays { .. }));
    assert!(matches!(shoot(2.0, &params, &c).unwrap(), Trajectory::CrossesZero { .. }));
    assert!(matches!(shoot(0.5, &params, &c).unwrap(), Trajectory::Diverges { .. }));
    assert!(first_integral(4f64.powf(1.0 / 6.0), &params).abs() < 1e-14);
}

#[test]
fn higher_dimensions() {
    let config = ShootingConfig::default();
    for params in [
        Parameters::new(2, 1.0, 1.0, 2.0, 4.0, 1.0),
        Parameters::new(2, 1.0, 1.0, 2.5, 5.0, 4.0),
        Parameters::new(3, 1.0, 1.0, 1.5, 3.0, 1.0),
        Parameters::new(3, 1.0, 1.0, 2.0, 4.0, 2.0),
    ] {
        let g = solve_ground_state(&params, &config).unwrap();
        assert!(g.nehari_residual() <= 1e-6 && g.pohozaev_residual() <= 1e-6, "{params:?}");
        assert!(g.profile.is_ground_state_shaped(1e-8));
    }
}

#[test]
fn sweep_properties() {
    let omegas: Vec<f64> = (0..=10).map(|k| 2f64.powi(k)).collect();
    let sweep = omega_sweep(&omegas, &Parameters::canonical(1.0), &ShootingConfig::default(), false).unwrap();
    assert_eq!(sweep.len(), omegas.len());
    // d(ω) is increasing, and d'(ω) = M/2 > 0
    assert!(sweep.windows(2).all(|w| w[1].action() > w[0].action()));
    // the L^{p+1}/L^{q+1} ratio decays along the tail
    let ratios: Vec<f64> = sweep.iter().map(|g| g.power_ratio()).collect();
    assert!(ratios[3..].windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
    assert!(ratios.last().unwrap() < &0.01);
    assert!(sweep[0].energy() < 0.0 && sweep.last().unwrap().energy() > 0.0);
    for g in &sweep {
        assert!(g.nehari_residual() <= 1e-6 && g.pohozaev_residual() <= 1e-6);
    }
}

#[test]
fn parallel_sweep_agrees_with_warm_start() {
    let omegas = [1.0, 2.0, 3.0, 5.0];
    let config = ShootingConfig::default();
    let warm = omega_sweep(&omegas, &Parameters::canonical(1.0), &config, false).unwrap();
    let cold = omega_sweep(&omegas, &Parameters::canonical(1.0), &config, true).unwrap();
    for (w, c) in warm.iter().zip(&cold) {
        assert!((w.phi0 - c.phi0).abs() < 1e-12 * w.phi0);
    }
}

#[test]
fn single_point_sweep_is_a_solve() {
    let config = ShootingConfig::default();
    let s = omega_sweep(&[3.0], &Parameters::canonical(1.0), &config, false).unwrap();
    let g = solve_ground_state(&Parameters::canonical(3.0), &config).unwrap();
    assert_eq!(s[0].phi0, g.phi0);
}

#[test]
fn explicit_bracket() {
    let params = Parameters::canonical(1.0);
    let config = ShootingConfig {
        phi0_bracket: Some([1.0, 1.2]),
        ..Default::default()
    };
    let g = solve_ground_state(&params, &config).unwrap();
    assert!((g.phi0 - amplitude_oracle(&params)).abs() < 1e-8);
    let bad = ShootingConfig {
        phi0_bracket: Some([1.2, 1.5]),
        ..Default::default()
    };
    assert!(matches!(solve_ground_state(&params, &bad), Err(Error::BracketingFailure { .. })));
}

#[test]
fn profile_file_round_trip() {
    let g = solve_ground_state(&Parameters::canonical(4.0), &ShootingConfig::default()).unwrap();
    let dir = std::env::temp_dir().join(format!("nlslab-profile-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("phi.txt");
    write_profile(std::fs::File::create(&path).unwrap(), &g).unwrap();
    let back = read_profile(std::io::BufReader::new(std::fs::File::open(&path).unwrap())).unwrap();
    assert_eq!(back.profile.values, g.profile.values);
    assert_eq!(back.params, g.params);
    std::fs::remove_dir_all(&dir).unwrap();
}
