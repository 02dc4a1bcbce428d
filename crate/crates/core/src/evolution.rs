//! Split-step Fourier integration of `i uₜ = -u_xx - a|u|^{p-1}u - b|u|^{q-1}u`
//! on the periodic box [-L, L), with sampled diagnostics and blowup detection.
//!
//! Each step is the Strang composition N(dt/2) ∘ L(dt) ∘ N(dt/2) of the exact
//! nonlinear phase rotation and the exact linear flow `û ← e^{-ik²dt} û`.
//! Both substeps are isometries of the discrete L² norm.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{grid_norms_unchecked, FunctionalReport, Summation};
use crate::grid::{wavenumbers, GridFunction, SpectralPlan};
use crate::params::Parameters;
use crate::scaling::BMembership;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    /// Initial (and largest) time step.
    pub dt0: f64,
    pub t_end: f64,
    /// Largest nonlinear phase rotation allowed per step.
    pub cfl_safety: f64,
    /// Gradient growth ‖∇u(t)‖ / ‖∇u₀‖ required for a blowup verdict.
    pub blowup_gradient_factor: f64,
    /// Step size below which the step counts as collapsed.
    pub dt_floor: f64,
    /// Allowed relative mass/energy drift per unit time.
    pub conservation_tolerance: f64,
    /// 2/3-rule truncation after each nonlinear substep.
    pub dealias: bool,
    /// Width of the edge band, as a fraction of L, watched for mass leaking
    /// towards the periodic boundary.
    pub boundary_band: f64,
    /// Largest mass fraction allowed in the edge band during the run.
    pub leak_tolerance: f64,
    /// Largest mass fraction allowed in the edge band of the initial datum.
    pub initial_leak_tolerance: f64,
    /// A sample is trusted while the upper half of the spectrum carries at
    /// most this fraction of ‖∇u‖² ...
    pub trust_tail_tolerance: f64,
    /// ... and the relative energy drift stays below this.
    pub trust_energy_tolerance: f64,
    /// Relative tolerance of the sampled virial identity.
    pub virial_tolerance: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            dt0: 5e-5,
            t_end: 5.0,
            cfl_safety: 0.1,
            blowup_gradient_factor: 1e3,
            dt_floor: 1e-12,
            conservation_tolerance: 1e-8,
            dealias: true,
            boundary_band: 0.1,
            leak_tolerance: 1e-6,
            initial_leak_tolerance: 1e-8,
            trust_tail_tolerance: 1e-8,
            trust_energy_tolerance: 1e-6,
            virial_tolerance: 1e-4,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidInput(format!("evolution config: {what}")));
        if !(self.dt0 > 0.0) {
            return bad("dt0 must be > 0");
        }
        if !(self.t_end > 0.0) {
            return bad("t_end must be > 0");
        }
        if !(self.blowup_gradient_factor > 1.0) {
            return bad("blowup_gradient_factor must be > 1");
        }
        if !(self.cfl_safety > 0.0) || !(self.dt_floor > 0.0) || self.dt_floor >= self.dt0 {
            return bad("need cfl_safety > 0 and 0 < dt_floor < dt0");
        }
        if !(self.boundary_band > 0.0 && self.boundary_band < 1.0) {
            return bad("boundary_band must lie in (0, 1)");
        }
        Ok(())
    }

    /// Steps per trace sample, max(1, floor(0.01/dt0)).
    pub fn sample_stride(&self) -> usize {
        ((0.01 / self.dt0).floor() as usize).max(1)
    }

    /// Time between trace samples.
    pub fn sample_interval(&self) -> f64 {
        self.sample_stride() as f64 * self.dt0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    RanToHorizon,
    Blowup { t_detect: f64 },
    StepCollapse { t: f64 },
}

impl Verdict {
    pub fn is_blowup(&self) -> bool {
        matches!(self, Verdict::Blowup { .. })
    }

    /// Time of the blowup or collapse verdict.
    pub fn time(&self) -> Option<f64> {
        match *self {
            Verdict::RanToHorizon => None,
            Verdict::Blowup { t_detect } => Some(t_detect),
            Verdict::StepCollapse { t } => Some(t),
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::RanToHorizon => write!(f, "RAN_TO_HORIZON"),
            Verdict::Blowup { t_detect } => write!(f, "BLOWUP t_detect={t_detect:?}"),
            Verdict::StepCollapse { t } => write!(f, "STEP_COLLAPSE t={t:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionTrace {
    pub params: Parameters,
    pub config: EvolutionConfig,
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    pub k_omega: Vec<f64>,
    #[serde(rename = "P")]
    pub p: Vec<f64>,
    pub grad_norm: Vec<f64>,
    /// ‖xu(t)‖² with x measured from the initial mass centroid.
    pub virial: Vec<f64>,
    /// Fraction of ‖∇u‖² in the upper half of the spectrum.
    pub spectral_tail: Vec<f64>,
    /// Sum of the absolute energy terms, the scale of energy drift.
    pub energy_scale: Vec<f64>,
    pub trusted: Vec<bool>,
    pub verdict: Verdict,
    pub centroid: f64,
    pub steps: usize,
    pub min_dt: f64,
    /// Field at the last sample (or at detection).
    pub final_state: GridFunction,
}

impl EvolutionTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest |M(t) - M(0)| / M(0).
    pub fn max_mass_drift(&self) -> f64 {
        let m0 = self.mass[0];
        self.mass.iter().map(|m| (m - m0).abs() / m0).fold(0.0, f64::max)
    }

    /// Relative energy drift |E(t) - E(0)| / scale(0) at every sample.
    pub fn energy_drift(&self) -> Vec<f64> {
        let (e0, s0) = (self.energy[0], self.energy_scale[0]);
        self.energy.iter().map(|e| (e - e0).abs() / s0).collect()
    }

    /// True when mass and energy drift stay below conservation_tolerance·t at
    /// every trusted sample (t ≥ one sample interval).
    pub fn conservation_holds(&self) -> bool {
        let tol = self.config.conservation_tolerance;
        let floor = self.config.sample_interval();
        let m0 = self.mass[0];
        let de = self.energy_drift();
        (0..self.len()).filter(|&i| self.trusted[i]).all(|i| {
            let allowed = tol * self.times[i].max(floor);
            (self.mass[i] - m0).abs() / m0 <= allowed && de[i] <= allowed
        })
    }

    /// Samples from the start up to (excluding) the first untrusted one.
    pub fn trusted_prefix(&self) -> usize {
        self.trusted.iter().position(|t| !t).unwrap_or(self.len())
    }
}

/// Reusable split-step integrator for one grid size and parameter set.
#[derive(Debug, Clone)]
pub struct Stepper {
    params: Parameters,
    plan: SpectralPlan,
    k2: Vec<f64>,
    keep: Option<Vec<bool>>,
}

impl Stepper {
    pub fn new(n: usize, half_width: f64, params: &Parameters, dealias: bool) -> Self {
        let k = wavenumbers(n, half_width);
        let keep = dealias.then(|| {
            (0..n)
                .map(|j| {
                    let m = if j < n / 2 { j } else { n - j };
                    3 * m <= n
                })
                .collect()
        });
        Stepper {
            params: *params,
            plan: SpectralPlan::new(n),
            k2: k.iter().map(|k| k * k).collect(),
            keep,
        }
    }

    fn nonlinear(&self, u: &mut [Complex64], tau: f64) {
        let Parameters { a, b, p, q, .. } = self.params;
        let (hp, hq) = (half_power(p), half_power(q));
        for z in u.iter_mut() {
            let s = z.norm_sqr();
            let rate = a * hp(s) + b * hq(s);
            *z *= Complex64::from_polar(1.0, tau * rate);
        }
    }

    fn truncate(&self, spec: &mut [Complex64]) {
        if let Some(keep) = &self.keep {
            for (c, &k) in spec.iter_mut().zip(keep) {
                if !k {
                    *c = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// One Strang step of size `dt` in place.
    pub fn step(&mut self, u: &mut [Complex64], dt: f64) {
        self.nonlinear(u, 0.5 * dt);
        self.plan.forward(u);
        self.truncate(u);
        for (c, k2) in u.iter_mut().zip(&self.k2) {
            *c *= Complex64::from_polar(1.0, -k2 * dt);
        }
        self.plan.inverse(u);
        self.nonlinear(u, 0.5 * dt);
        if self.keep.is_some() {
            self.plan.forward(u);
            self.truncate(u);
            self.plan.inverse(u);
        }
    }

    /// Largest nonlinear rotation rate a|u|^{p-1} + b|u|^{q-1} over the grid.
    pub fn max_rate(&self, u: &[Complex64]) -> f64 {
        let m = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
        self.params.rotation_rate(m)
    }
}

/// s ↦ s^{(e-1)/2}, with an integer power when the exponent allows it.
fn half_power(e: f64) -> impl Fn(f64) -> f64 {
    let h = 0.5 * (e - 1.0);
    let int = (h.fract() == 0.0 && h.abs() < 64.0).then_some(h as i32);
    move |s: f64| match int {
        Some(k) => s.powi(k),
        None => s.powf(h),
    }
}

/// One Strang step of size `dt` (convenience wrapper around [`Stepper`]).
pub fn step(u: &GridFunction, dt: f64, params: &Parameters, dealias: bool) -> Result<GridFunction> {
    if !(dt > 0.0) {
        return Err(Error::InvalidInput(format!("time step must be > 0, got {dt}")));
    }
    let mut stepper = Stepper::new(u.n(), u.half_width(), params, dealias);
    let mut v = u.values().to_vec();
    stepper.step(&mut v, dt);
    GridFunction::new(u.half_width(), v)
}

fn check_evolution_params(params: &Parameters) -> Result<()> {
    if params.dim != 1 {
        return Err(Error::BadDimension(params.dim));
    }
    for (name, value) in [("a", params.a), ("b", params.b)] {
        if !(value >= 0.0) {
            return Err(Error::NonPositiveCoefficient { name, value });
        }
    }
    if !(params.p > 1.0 && params.q > 1.0) {
        return Err(Error::InvalidInput("exponents must exceed 1".into()));
    }
    Ok(())
}

fn edge_fraction(u: &GridFunction, band: f64) -> f64 {
    u.mass_outside((1.0 - band) * u.half_width())
}

struct Sampler {
    params: Parameters,
    centroid: f64,
}

impl Sampler {
    fn measure(&self, u: &GridFunction) -> (FunctionalReport, f64, f64) {
        let (base, tail) = grid_norms_unchecked(u, &self.params, Summation::Kahan);
        let h = u.spacing();
        let var: f64 = (0..u.n())
            .map(|j| {
                let x = u.x(j) - self.centroid;
                x * x * u.values()[j].norm_sqr()
            })
            .sum::<f64>()
            * h;
        (FunctionalReport::assemble(base, &self.params), var, tail)
    }
}

/// Integrate from `u0` to `config.t_end` or until a verdict.
pub fn evolve(u0: &GridFunction, params: &Parameters, config: &EvolutionConfig) -> Result<EvolutionTrace> {
    evolve_observed(u0, params, config, |_, _| {})
}

/// As [`evolve`], calling `observe(t, u)` at every sample.
pub fn evolve_observed(
    u0: &GridFunction,
    params: &Parameters,
    config: &EvolutionConfig,
    mut observe: impl FnMut(f64, &GridFunction),
) -> Result<EvolutionTrace> {
    check_evolution_params(params)?;
    config.validate()?;
    let leak = edge_fraction(u0, config.boundary_band);
    if leak > config.initial_leak_tolerance {
        return Err(Error::BoxMassLeak { fraction: leak, time: 0.0 });
    }
    let n = u0.n();
    let h = u0.spacing();
    let m0 = u0.mass();
    let centroid = if m0 > 0.0 {
        (0..n).map(|j| u0.x(j) * u0.values()[j].norm_sqr()).sum::<f64>() * h / m0
    } else {
        0.0
    };
    let sampler = Sampler {
        params: *params,
        centroid,
    };
    let mut stepper = Stepper::new(n, u0.half_width(), params, config.dealias);

    let mut trace = EvolutionTrace {
        params: *params,
        config: *config,
        times: vec![],
        mass: vec![],
        energy: vec![],
        k_omega: vec![],
        p: vec![],
        grad_norm: vec![],
        virial: vec![],
        spectral_tail: vec![],
        energy_scale: vec![],
        trusted: vec![],
        verdict: Verdict::RanToHorizon,
        centroid,
        steps: 0,
        min_dt: config.dt0,
        final_state: u0.clone(),
    };
    let mut record = |trace: &mut EvolutionTrace, t: f64, u: &GridFunction| {
        let (rep, var, tail) = sampler.measure(u);
        let scale = rep.energy_scale(params);
        let drift = trace
            .energy
            .first()
            .map_or(0.0, |e0| (rep.energy - e0).abs() / trace.energy_scale[0]);
        trace.times.push(t);
        trace.mass.push(rep.mass);
        trace.energy.push(rep.energy);
        trace.k_omega.push(rep.nehari);
        trace.p.push(rep.virial);
        trace.grad_norm.push(rep.grad_norm());
        trace.virial.push(var);
        trace.spectral_tail.push(tail);
        trace.energy_scale.push(scale);
        trace
            .trusted
            .push(tail <= config.trust_tail_tolerance && drift <= config.trust_energy_tolerance);
        observe(t, u);
    };
    record(&mut trace, 0.0, u0);
    let grad0 = trace.grad_norm[0];

    let interval = config.sample_interval();
    let samples = (config.t_end / interval).round().max(1.0) as usize;
    let mut u = u0.values().to_vec();
    let mut t = 0.0;
    'samples: for k in 1..=samples {
        let target = k as f64 * interval;
        while t < target {
            let rate = stepper.max_rate(&u);
            let natural = if rate > 0.0 {
                config.dt0.min(config.cfl_safety / rate)
            } else {
                config.dt0
            };
            if natural < config.dt_floor {
                let g = GridFunction::new(u0.half_width(), u.clone())?;
                let (base, _) = grid_norms_unchecked(&g, params, Summation::Kahan);
                trace.verdict = if base.grad2.sqrt() > config.blowup_gradient_factor * grad0 {
                    Verdict::Blowup { t_detect: t }
                } else {
                    Verdict::StepCollapse { t }
                };
                trace.final_state = g;
                break 'samples;
            }
            // land exactly on the sample instant
            let remaining = target - t;
            let dt = if natural >= remaining * (1.0 - 1e-12) {
                remaining
            } else if natural > 0.5 * remaining {
                0.5 * remaining
            } else {
                natural
            };
            stepper.step(&mut u, dt);
            trace.steps += 1;
            trace.min_dt = trace.min_dt.min(natural);
            t = if dt == remaining { target } else { t + dt };
        }
        let g = GridFunction::new(u0.half_width(), u.clone())?;
        let leak = edge_fraction(&g, config.boundary_band);
        if leak > config.leak_tolerance {
            return Err(Error::BoxMassLeak { fraction: leak, time: t });
        }
        record(&mut trace, target, &g);
        trace.final_state = g;
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VirialResidual {
    /// Sample instants of the centred differences.
    pub times: Vec<f64>,
    /// d²/dt² ‖xu‖² by centred differences.
    pub second_difference: Vec<f64>,
    /// 8P(u(t)).
    pub eight_p: Vec<f64>,
    /// max |second_difference - 8P| / max |8P|.
    pub relative: f64,
    /// max |second_difference - 8P|.
    pub absolute: f64,
}

impl VirialResidual {
    pub fn within(&self, tolerance: f64) -> bool {
        self.relative <= tolerance
    }
}

/// Fourth-order centred second difference of `v` at sample `i`.
fn second_difference(v: &[f64], i: usize, ds: f64) -> f64 {
    (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]) / (12.0 * ds * ds)
}

/// Centred second difference of ‖xu‖² against 8P over the trusted prefix.
pub fn virial_residual(trace: &EvolutionTrace) -> Result<VirialResidual> {
    let m = trace.trusted_prefix();
    if m < 5 {
        return Err(Error::TooFewSamples { got: m, need: 5 });
    }
    let ds = trace.config.sample_interval();
    let mut out = VirialResidual {
        times: vec![],
        second_difference: vec![],
        eight_p: vec![],
        relative: 0.0,
        absolute: 0.0,
    };
    for i in 2..m - 2 {
        let d2 = second_difference(&trace.virial, i, ds);
        out.times.push(trace.times[i]);
        out.second_difference.push(d2);
        out.eight_p.push(8.0 * trace.p[i]);
    }
    let scale = out.eight_p.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    out.absolute = out
        .second_difference
        .iter()
        .zip(&out.eight_p)
        .map(|(d, e)| (d - e).abs())
        .fold(0.0, f64::max);
    out.relative = if scale > 0.0 { out.absolute / scale } else { out.absolute };
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub samples_checked: usize,
    /// E(u₀) - E(φ_ω), negative for members of B_ω.
    pub bound: f64,
    /// max_t P(u(t)) - bound over the checked samples.
    pub worst_excess: f64,
    pub max_nehari: f64,
    pub max_virial: f64,
    /// Largest centred second difference of ‖xu‖².
    pub max_variance_curvature: f64,
}

/// P(u(t)) ≤ E(u₀) - E(φ_ω), K_ω(u(t)) < 0, P(u(t)) < 0 and a concave
/// variance at every trusted sample.
pub fn monotonicity_check(
    trace: &EvolutionTrace,
    ground_energy: f64,
    membership: &BMembership,
    slack_tolerance: f64,
) -> Result<MonotonicityReport> {
    if !membership.in_b {
        return Err(Error::HypothesisFailure(
            "initial datum is not a certified member of B_ω".into(),
        ));
    }
    let m = trace.trusted_prefix();
    let bound = trace.energy[0] - ground_energy;
    let ds = trace.config.sample_interval();
    let mut rep = MonotonicityReport {
        samples_checked: m,
        bound,
        worst_excess: f64::NEG_INFINITY,
        max_nehari: f64::NEG_INFINITY,
        max_virial: f64::NEG_INFINITY,
        max_variance_curvature: f64::NEG_INFINITY,
    };
    let fail = |i: usize, detail: String| Error::InvariantViolation {
        sample: i,
        time: trace.times[i],
        detail,
    };
    for i in 0..m {
        let (p, k) = (trace.p[i], trace.k_omega[i]);
        rep.worst_excess = rep.worst_excess.max(p - bound);
        rep.max_nehari = rep.max_nehari.max(k);
        rep.max_virial = rep.max_virial.max(p);
        if p > bound + slack_tolerance {
            return Err(fail(i, format!("P = {p:.6e} exceeds E(u0) - E(phi) = {bound:.6e}")));
        }
        if !(k < 0.0) {
            return Err(fail(i, format!("K_omega = {k:.6e} is not negative")));
        }
        if !(p < 0.0) {
            return Err(fail(i, format!("P = {p:.6e} is not negative")));
        }
        if i >= 2 && i + 2 < m {
            let d2 = second_difference(&trace.virial, i, ds);
            rep.max_variance_curvature = rep.max_variance_curvature.max(d2);
            if !(d2 < 0.0) {
                return Err(fail(i, format!("variance curvature {d2:.6e} is not negative")));
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free() -> Parameters {
        Parameters::new(1, 0.0, 0.0, 3.0, 7.0, 1.0)
    }

    fn gaussian(n: usize) -> GridFunction {
        GridFunction::from_real_fn(32.0, n, |x| (-x * x / 2.0).exp()).unwrap()
    }

    #[test]
    fn sample_interval() {
        let c = EvolutionConfig {
            dt0: 3e-3,
            ..Default::default()
        };
        assert_eq!(c.sample_stride(), 3);
        let c = EvolutionConfig {
            dt0: 0.05,
            ..Default::default()
        };
        assert_eq!(c.sample_stride(), 1);
    }

    #[test]
    fn config_rejects_bad_values() {
        for c in [
            EvolutionConfig { dt0: 0.0, ..Default::default() },
            EvolutionConfig { t_end: -1.0, ..Default::default() },
            EvolutionConfig { blowup_gradient_factor: 1.0, ..Default::default() },
        ] {
            assert!(c.validate().is_err());
        }
    }

    #[test]
    fn step_is_an_isometry() {
        let p = Parameters::canonical(1.0);
        let u = GridFunction::from_fn(16.0, 256, |x| Complex64::new((-x * x).exp(), 0.3 * x * (-x * x).exp()))
            .unwrap();
        let v = step(&u, 0.01, &p, false).unwrap();
        assert!((v.mass() - u.mass()).abs() < 1e-14 * u.mass());
    }

    #[test]
    fn free_gaussian_variance_law() {
        let cfg = EvolutionConfig {
            t_end: 1.0,
            ..Default::default()
        };
        let tr = evolve(&gaussian(1024), &free(), &cfg).unwrap();
        assert_eq!(tr.verdict, Verdict::RanToHorizon);
        let t = *tr.times.last().unwrap();
        let exact = std::f64::consts::PI.sqrt() / 2.0 * (1.0 + 4.0 * t * t);
        assert!((tr.virial.last().unwrap() - exact).abs() < 1e-6 * exact);
    }

    #[test]
    fn box_leak_rejected() {
        let u = GridFunction::from_real_fn(4.0, 256, |x| (-x * x / 8.0).exp()).unwrap();
        let r = evolve(&u, &free(), &EvolutionConfig::default());
        assert!(matches!(r, Err(Error::BoxMassLeak { .. })));
    }

    #[test]
    fn too_few_samples() {
        let cfg = EvolutionConfig {
            dt0: 0.01,
            t_end: 0.02,
            ..Default::default()
        };
        let tr = evolve(&gaussian(256), &free(), &cfg).unwrap();
        assert!(matches!(virial_residual(&tr), Err(Error::TooFewSamples { .. })));
    }
}
