//! Ground states of the stationary equation
//!
//! ```text
//! -Δφ + ωφ - a|φ|^{p-1}φ - b|φ|^{q-1}φ = 0
//! ```
//!
//! computed by shooting on the radial ODE `φ'' + (N-1)/r φ' = ωφ - g(φ)`
//! with `φ(0) = φ₀`, `φ'(0) = 0`. Too small an amplitude turns back up before
//! reaching zero, too large an amplitude crosses zero; bisection on φ₀
//! isolates the positive decaying solution in between.
//!
//! Forward shooting only follows the decaying branch until the round-off
//! component along the growing mode catches up, so the tail beyond that
//! point is rebuilt by integrating inward from Rmax, where the decaying mode
//! is the stable direction, and matching at an interior radius.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{norms, FunctionalReport};
use crate::grid::GridFunction;
use crate::ode::{integrate, Tolerance};
use crate::params::Parameters;
use crate::profile::RadialProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShootingConfig {
    /// Amplitude bracket `[lo, hi]`; located automatically when absent.
    pub phi0_bracket: Option<[f64; 2]>,
    /// Relative local error tolerance of the Dormand–Prince integrator.
    pub ode_tol: f64,
    /// Absolute truncation radius; defaults to `rmax_scaled / √ω`.
    pub rmax: Option<f64>,
    pub rmax_scaled: f64,
    /// Number of radial samples including r = 0.
    pub samples: usize,
    /// Relative width at which the amplitude bisection stops.
    pub bisect_tol: f64,
    /// A trajectory decays once φ < decay_threshold·φ₀ with φ' < 0.
    pub decay_threshold: f64,
    /// A trajectory diverges once φ > diverge_factor·φ₀ (or turns back up).
    pub diverge_factor: f64,
    /// Relative tolerance of the Nehari and Pohozaev identities.
    pub identity_tolerance: f64,
    /// Largest admissible terminal value relative to φ₀.
    pub tail_tolerance: f64,
    /// Forward solution is trusted down to match_level·φ₀ before the tail takes over.
    pub match_level: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig {
            phi0_bracket: None,
            ode_tol: 1e-10,
            rmax: None,
            rmax_scaled: 30.0,
            samples: 6001,
            bisect_tol: 1e-14,
            decay_threshold: 1e-10,
            diverge_factor: 1.5,
            identity_tolerance: 1e-6,
            tail_tolerance: 1e-8,
            match_level: 1e-6,
        }
    }
}

impl ShootingConfig {
    pub fn rmax_for(&self, params: &Parameters) -> f64 {
        self.rmax
            .unwrap_or(self.rmax_scaled / params.omega.sqrt())
    }

    fn tolerance(&self, phi0: f64) -> Tolerance {
        Tolerance {
            rtol: self.ode_tol,
            atol: self.ode_tol * 1e-14 * phi0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Trajectory {
    CrossesZero { r: f64 },
    Diverges { r: f64 },
    Decays { r: f64 },
}

/// Outcome of an integration that does not stop at the decay threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Verdict {
    Crosses,
    Diverges,
    Undecided,
}

fn rhs(params: Parameters) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    let nm1 = params.dim as f64 - 1.0;
    move |r, y| {
        let friction = if nm1 > 0.0 { nm1 / r * y[1] } else { 0.0 };
        [y[1], params.omega * y[0] - params.nonlinearity(y[0]) - friction]
    }
}

/// Taylor start φ(r) = φ₀ + c₂r² + c₄r⁴ that removes the (N-1)/r singularity.
fn series_start(phi0: f64, params: &Parameters, r: f64) -> [f64; 2] {
    let n = params.dim as f64;
    let f = params.omega * phi0 - params.nonlinearity(phi0);
    let fprime = params.omega
        - params.a * params.p * phi0.abs().powf(params.p - 1.0)
        - params.b * params.q * phi0.abs().powf(params.q - 1.0);
    let c2 = f / (2.0 * n);
    let c4 = fprime * c2 / (4.0 * n + 8.0);
    [
        phi0 + c2 * r * r + c4 * r.powi(4),
        2.0 * c2 * r + 4.0 * c4 * r.powi(3),
    ]
}

fn start_point(phi0: f64, params: &Parameters) -> (f64, [f64; 2]) {
    if params.dim == 1 {
        (0.0, [phi0, 0.0])
    } else {
        let rs = 1e-3 / params.omega.sqrt();
        (rs, series_start(phi0, params, rs))
    }
}

/// 2V(φ₀) = ωφ₀² - 2a/(p+1)φ₀^{p+1} - 2b/(q+1)φ₀^{q+1}; in one dimension
/// φ'² = 2V(φ) - 2V(φ₀) along every trajectory.
pub fn first_integral(phi0: f64, params: &Parameters) -> f64 {
    let Parameters { a, b, p, q, omega, .. } = *params;
    omega * phi0 * phi0
        - 2.0 * a / (p + 1.0) * phi0.powf(p + 1.0)
        - 2.0 * b / (q + 1.0) * phi0.powf(q + 1.0)
}

fn run(
    phi0: f64,
    params: &Parameters,
    config: &ShootingConfig,
    decay_threshold: Option<f64>,
) -> Result<(Option<Trajectory>, f64)> {
    let (r0, y0) = start_point(phi0, params);
    let r_end = 4.0 * config.rmax_for(params);
    let mut h = 1e-3 / params.omega.sqrt();
    let mut found = None;
    let out = integrate(
        rhs(*params),
        r0,
        y0,
        r_end,
        &mut h,
        config.tolerance(phi0),
        |r, y| {
            found = if y[0] <= 0.0 {
                Some(Trajectory::CrossesZero { r })
            } else if y[0] > config.diverge_factor * phi0 || y[1] > 0.0 {
                Some(Trajectory::Diverges { r })
            } else if decay_threshold.is_some_and(|t| y[0] < t * phi0) {
                Some(Trajectory::Decays { r })
            } else {
                None
            };
            found.is_none()
        },
    )?;
    Ok((found, out.t))
}

fn decide(phi0: f64, params: &Parameters, config: &ShootingConfig) -> Result<Verdict> {
    Ok(match run(phi0, params, config, None)?.0 {
        Some(Trajectory::CrossesZero { .. }) => Verdict::Crosses,
        Some(Trajectory::Diverges { .. }) => Verdict::Diverges,
        _ => Verdict::Undecided,
    })
}

/// Classify the trajectory started at amplitude `phi0`.
pub fn shoot(phi0: f64, params: &Parameters, config: &ShootingConfig) -> Result<Trajectory> {
    if !(phi0 > 0.0) {
        return Err(Error::InvalidInput(format!("amplitude must be > 0, got {phi0}")));
    }
    let params = params.validate_stationary()?;
    let (found, r_last) = run(phi0, &params, config, Some(config.decay_threshold))?;
    let found = found.unwrap_or(Trajectory::Decays { r: r_last });
    if params.dim == 1 {
        // In 1-D the first integral decides exactly: a trajectory on the
        // homoclinic orbit has 2V(φ₀) = 0 up to round-off.
        let v = first_integral(phi0, &params);
        if v.abs() <= 1e-12 * params.omega * phi0 * phi0 {
            let r = match found {
                Trajectory::CrossesZero { r } | Trajectory::Diverges { r } | Trajectory::Decays { r } => r,
            };
            return Ok(Trajectory::Decays { r });
        }
    }
    Ok(found)
}

/// Amplitude at which ωφ - g(φ) changes sign; below it φ'' > 0 at the origin.
fn turning_amplitude(params: &Parameters) -> f64 {
    let f = |x: f64| params.omega - params.rotation_rate(x);
    let mut hi = 1.0;
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
    0.5 * (lo + hi)
}

fn check_bracket(lo: f64, hi: f64, params: &Parameters, config: &ShootingConfig) -> Result<bool> {
    Ok(lo > 0.0
        && lo < hi
        && decide(lo, params, config)? == Verdict::Diverges
        && decide(hi, params, config)? == Verdict::Crosses)
}

fn auto_bracket(params: &Parameters, config: &ShootingConfig) -> Result<[f64; 2]> {
    // Just above the equilibrium amplitude the orbit oscillates and turns back up.
    let turn = turning_amplitude(params);
    let lo = turn * (1.0 + 1e-3);
    if decide(lo, params, config)? != Verdict::Diverges {
        return Err(Error::BracketingFailure { lo, hi: lo });
    }
    let mut hi = 1.5 * turn;
    for _ in 0..60 {
        if decide(hi, params, config)? == Verdict::Crosses {
            return Ok([lo, hi]);
        }
        hi *= 1.5;
    }
    Err(Error::BracketingFailure { lo, hi })
}

/// Bisect the amplitude; returns the final `[lo, hi]` bracket.
fn bisect_amplitude(
    mut lo: f64,
    mut hi: f64,
    params: &Parameters,
    config: &ShootingConfig,
) -> Result<[f64; 2]> {
    while hi - lo > config.bisect_tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match decide(mid, params, config)? {
            Verdict::Crosses => hi = mid,
            Verdict::Diverges => lo = mid,
            Verdict::Undecided => return Ok([mid, mid]),
        }
    }
    Ok([lo, hi])
}

/// Forward trajectory sampled at `r[i]` until it crosses, turns or diverges.
fn forward_samples(
    phi0: f64,
    r: &[f64],
    params: &Parameters,
    config: &ShootingConfig,
) -> Result<Vec<[f64; 2]>> {
    let f = rhs(*params);
    let tol = config.tolerance(phi0);
    let mut out = vec![[phi0, 0.0]];
    let (mut t, mut y) = start_point(phi0, params);
    let mut h = 1e-3 / params.omega.sqrt();
    for &ri in &r[1..] {
        let o = integrate(&f, t, y, ri, &mut h, tol, |_, _| true)?;
        t = ri;
        y = o.y;
        if y[0] <= 0.0 || y[1] >= 0.0 || y[0] > config.diverge_factor * phi0 {
            break;
        }
        out.push(y);
    }
    Ok(out)
}

/// Decaying solution integrated inward from `r[last]` to `r[stop]`, starting
/// from the asymptotic log-derivative -√ω - (N-1)/(2r).
fn backward_tail(
    amplitude: f64,
    r: &[f64],
    stop: usize,
    params: &Parameters,
    config: &ShootingConfig,
) -> Result<Vec<[f64; 2]>> {
    let f = rhs(*params);
    let m = r.len();
    let rmax = r[m - 1];
    let kappa = params.omega.sqrt() + 0.5 * (params.dim as f64 - 1.0) / rmax;
    let tol = Tolerance {
        rtol: config.ode_tol,
        atol: config.ode_tol * 1e-6 * amplitude,
    };
    let mut y = [amplitude, -kappa * amplitude];
    let mut out = vec![[0.0; 2]; m - stop];
    out[m - 1 - stop] = y;
    let mut h = 1e-3 / params.omega.sqrt();
    for i in (stop..m - 1).rev() {
        let o = integrate(&f, r[i + 1], y, r[i], &mut h, tol, |_, _| true)?;
        y = o.y;
        out[i - stop] = y;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundState {
    pub params: Parameters,
    pub profile: RadialProfile,
    /// Shooting amplitude φ(0).
    pub phi0: f64,
    /// Functionals evaluated on the profile.
    pub diagnostics: FunctionalReport,
    /// Final amplitude bracket of the bisection.
    pub bracket: [f64; 2],
    /// Radius where the inward tail was joined to the shot.
    pub match_radius: f64,
}

impl GroundState {
    /// d(ω) = S_ω(φ_ω).
    pub fn action(&self) -> f64 {
        self.diagnostics.action
    }

    pub fn energy(&self) -> f64 {
        self.diagnostics.energy
    }

    /// |K_ω(φ)| / (‖∇φ‖² + ω‖φ‖²).
    pub fn nehari_residual(&self) -> f64 {
        let d = &self.diagnostics;
        d.nehari.abs() / (d.grad2 + self.params.omega * d.mass)
    }

    /// |P(φ)| / ‖∇φ‖².
    pub fn pohozaev_residual(&self) -> f64 {
        self.diagnostics.virial.abs() / self.diagnostics.grad2
    }

    /// ‖φ‖_{p+1}^{p+1} / ‖φ‖_{q+1}^{q+1}.
    pub fn power_ratio(&self) -> f64 {
        self.diagnostics.lp / self.diagnostics.lq
    }

    /// (β-2)b/(q+1)·lq - (2-α)a/(p+1)·lp; has the sign of E(φ_ω) because P(φ_ω) = 0.
    pub fn energy_sign_indicator(&self) -> f64 {
        let Parameters { a, b, p, q, .. } = self.params;
        let (alpha, beta) = (self.params.alpha(), self.params.beta());
        (beta - 2.0) * b / (q + 1.0) * self.diagnostics.lq
            - (2.0 - alpha) * a / (p + 1.0) * self.diagnostics.lp
    }

    /// φ(|x|) at an arbitrary radius.
    pub fn evaluate(&self, r: f64) -> f64 {
        self.profile.evaluate(r)
    }

    /// Sample φ^λ(x) = λ^{1/2} φ(λ|x|) on the periodic grid `[-L, L)` with `n` points.
    pub fn to_grid(&self, half_width: f64, n: usize, lambda: f64) -> Result<GridFunction> {
        if self.params.dim != 1 {
            return Err(Error::InvalidInput(format!(
                "grid sampling needs N = 1, ground state has N = {}",
                self.params.dim
            )));
        }
        if !(lambda > 0.0) {
            return Err(Error::InvalidInput(format!("scaling factor must be > 0, got {lambda}")));
        }
        let amp = lambda.sqrt();
        GridFunction::from_real_fn(half_width, n, |x| amp * self.profile.evaluate(lambda * x))
    }
}

/// Solve for the positive radial ground state at `params.omega`.
pub fn solve_ground_state(params: &Parameters, config: &ShootingConfig) -> Result<GroundState> {
    let params = params.validate_stationary()?;
    let [lo, hi] = match config.phi0_bracket {
        Some([lo, hi]) => {
            if !check_bracket(lo, hi, &params, config)? {
                return Err(Error::BracketingFailure { lo, hi });
            }
            [lo, hi]
        }
        None => auto_bracket(&params, config)?,
    };
    finish(lo, hi, &params, config)
}

fn finish(lo: f64, hi: f64, params: &Parameters, config: &ShootingConfig) -> Result<GroundState> {
    let bracket = bisect_amplitude(lo, hi, params, config)?;
    let phi0 = 0.5 * (bracket[0] + bracket[1]);

    let m = config.samples.max(16);
    let rmax = config.rmax_for(params);
    let dr = rmax / (m - 1) as f64;
    let r: Vec<f64> = (0..m).map(|i| i as f64 * dr).collect();

    let mid = forward_samples(phi0, &r, params, config)?;
    let low = forward_samples(bracket[0], &r, params, config)?;
    let high = forward_samples(bracket[1], &r, params, config)?;
    let usable = mid.len().min(low.len()).min(high.len());
    let mut stop = 0;
    for i in 1..usable {
        let v = mid[i][0];
        if v < config.match_level * phi0 || (high[i][0] - low[i][0]).abs() > 1e-6 * v {
            break;
        }
        stop = i;
    }
    if stop < 8 {
        return Err(Error::TruncationTooSmall {
            terminal: mid.get(stop).map_or(phi0, |y| y[0]),
            phi0,
        });
    }

    let mut samples: Vec<[f64; 2]> = mid[..=stop].to_vec();
    if stop < m - 1 {
        let target = mid[stop][0];
        let decay = params.omega.sqrt();
        let geom = (r[stop] / rmax).powf(0.5 * (params.dim as f64 - 1.0));
        let mut amplitude = target * (-decay * (rmax - r[stop])).exp() * geom;
        let mut tail = backward_tail(amplitude, &r, stop, params, config)?;
        for _ in 0..6 {
            let ratio = target / tail[0][0];
            if (ratio - 1.0).abs() < 1e-13 {
                break;
            }
            amplitude *= ratio;
            tail = backward_tail(amplitude, &r, stop, params, config)?;
        }
        samples.extend_from_slice(&tail[1..]);
    }

    let values: Vec<f64> = samples.iter().map(|y| y[0]).collect();
    let slopes: Vec<f64> = samples.iter().map(|y| y[1]).collect();
    let terminal = *values.last().unwrap();
    if terminal.abs() > config.tail_tolerance * phi0 {
        return Err(Error::TruncationTooSmall { terminal, phi0 });
    }
    let profile = RadialProfile::with_slopes(r.clone(), values, Some(slopes), params.dim)?;
    let diagnostics = norms(&profile, params)?;
    let gs = GroundState {
        params: *params,
        profile,
        phi0,
        diagnostics,
        bracket,
        match_radius: r[stop],
    };
    let tol = config.identity_tolerance;
    for (name, residual) in [
        ("Nehari", gs.nehari_residual()),
        ("Pohozaev", gs.pohozaev_residual()),
    ] {
        if !(residual <= tol) {
            return Err(Error::IdentityViolation {
                name,
                residual,
                tolerance: tol,
            });
        }
    }
    Ok(gs)
}

/// Exponents bounding how fast φ₀ can grow with ω: `[slowest, fastest]`.
fn amplitude_growth_exponents(params: &Parameters) -> [f64; 2] {
    let mut exps = vec![];
    if params.a > 0.0 {
        exps.push(1.0 / (params.p - 1.0));
    }
    if params.b > 0.0 {
        exps.push(1.0 / (params.q - 1.0));
    }
    let lo = exps.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = exps.iter().copied().fold(0.0, f64::max);
    [lo, hi]
}

/// Ground states along an increasing list of frequencies.
///
/// Sequential mode warm-starts each bracket from the previous amplitude
/// (falling back to a cold bracket when the guess does not separate);
/// parallel mode solves every point from a cold bracket.
pub fn omega_sweep(
    omegas: &[f64],
    template: &Parameters,
    config: &ShootingConfig,
    parallel: bool,
) -> Result<Vec<GroundState>> {
    if omegas.is_empty() || omegas.iter().any(|w| !(*w > 0.0)) || omegas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "sweep frequencies must be positive and strictly increasing".into(),
        ));
    }
    if parallel {
        return omegas
            .par_iter()
            .map(|&w| solve_ground_state(&template.with_omega(w), config))
            .collect();
    }
    let [slow, fast] = amplitude_growth_exponents(template);
    let mut out: Vec<GroundState> = Vec::with_capacity(omegas.len());
    for &w in omegas {
        let params = template.with_omega(w).validate_stationary()?;
        let gs = match out.last() {
            Some(prev) if config.phi0_bracket.is_none() => {
                let ratio = w / prev.params.omega;
                let lo = prev.phi0 * ratio.powf(slow) * (1.0 - 1e-3);
                let hi = prev.phi0 * ratio.powf(fast) * (1.0 + 1e-3);
                if check_bracket(lo, hi, &params, config)? {
                    finish(lo, hi, &params, config)?
                } else {
                    solve_ground_state(&params, config)?
                }
            }
            _ => solve_ground_state(&params, config)?,
        };
        out.push(gs);
    }
    Ok(out)
}
