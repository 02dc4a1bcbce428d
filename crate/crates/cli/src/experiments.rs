//! The six experiments. Each writes its data files into the run directory and
//! records one check per invariant it exercised.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nlslab::evolution::{monotonicity_check, virial_residual, MonotonicityReport};
use nlslab::groundstate::first_integral;
use nlslab::io::{write_profile, write_trace};
use nlslab::scaling::{
    lemma2_check, lemma_ep_check, locate_omega1, membership, nehari_slope, theorem1_window, verify_shape,
    BMembership, LemmaEpReport, Omega1Report,
};
use nlslab::{
    critical_points, evolve, norms, omega_sweep, rescale, solve_ground_state, Error, EvolutionTrace, GridFunction,
    GroundState, Parameters, ScalingCurve, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliError;
use crate::summary::Summary;

/// Relative agreement required between the shooting amplitude and the
/// first-integral root.
const AMPLITUDE_TOLERANCE: f64 = 1e-8;
/// L∞ distance allowed between a single-power solution and its closed form.
const SOLITON_TOLERANCE: f64 = 1e-6;
/// Tolerance of the Gaussian free-evolution checks.
const FREE_TOLERANCE: f64 = 1e-6;

/// Output directory of one run.
pub struct RunDir {
    root: PathBuf,
}

impl RunDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(RunDir {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&self, name: &str, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
        let path = self.path(name);
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text)
    }

    fn with_file(
        &self,
        name: &str,
        f: impl FnOnce(&mut BufWriter<File>) -> nlslab::Result<()>,
    ) -> Result<(), CliError> {
        let path = self.path(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        let wrap = |e: nlslab::Error| match e {
            nlslab::Error::Io(detail) => CliError::io(&path, std::io::Error::other(detail)),
            other => CliError::io(&path, std::io::Error::other(other.to_string())),
        };
        f(&mut w).map_err(wrap)?;
        w.flush().map_err(|e| CliError::io(&path, e))
    }
}

fn ctx(experiment: Experiment, stage: impl Into<String>) -> impl FnOnce(Error) -> CliError {
    let stage = stage.into();
    move |source| CliError::Experiment {
        experiment: experiment.name(),
        stage,
        source,
    }
}

pub fn dispatch(config: &ExperimentConfig, dir: &RunDir, summary: &mut Summary) -> Result<(), CliError> {
    match config.experiment {
        Experiment::GroundState => ground_state(config, dir, summary),
        Experiment::OmegaSweep => sweep(config, dir, summary),
        Experiment::LocateOmega1 => omega1(config, dir, summary),
        Experiment::LemmaChecks => lemma_checks(config, dir, summary),
        Experiment::InstabilityDemo => instability_demo(config, dir, summary),
        Experiment::FreeBenchmark => free_benchmark(config, dir, summary),
    }
}

/// Positive root of ωφ² = 2a/(p+1)φ^{p+1} + 2b/(q+1)φ^{q+1} by bisection.
pub fn first_integral_root(params: &Parameters) -> f64 {
    let mut hi = 1.0;
    while first_integral(hi, params) > 0.0 {
        hi *= 2.0;
    }
    let mut lo = hi * 1e-12;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if first_integral(mid, params) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Closed-form ground state of -φ'' + ωφ = c|φ|^{e-1}φ in one dimension.
pub fn single_power_soliton(c: f64, e: f64, omega: f64, x: f64) -> f64 {
    let amp = ((e + 1.0) * omega / (2.0 * c)).powf(1.0 / (e - 1.0));
    amp * (0.5 * (e - 1.0) * omega.sqrt() * x).cosh().powf(-2.0 / (e - 1.0))
}

#[derive(Serialize)]
struct GroundStateRecord<'a> {
    params: &'a Parameters,
    phi0: f64,
    bracket: [f64; 2],
    match_radius: f64,
    rmax: f64,
    samples: usize,
    mass: f64,
    grad2: f64,
    lp: f64,
    lq: f64,
    energy: f64,
    action: f64,
    nehari_residual: f64,
    pohozaev_residual: f64,
}

fn record(g: &GroundState) -> GroundStateRecord<'_> {
    let d = &g.diagnostics;
    GroundStateRecord {
        params: &g.params,
        phi0: g.phi0,
        bracket: g.bracket,
        match_radius: g.match_radius,
        rmax: g.profile.rmax(),
        samples: g.profile.len(),
        mass: d.mass,
        grad2: d.grad2,
        lp: d.lp,
        lq: d.lq,
        energy: d.energy,
        action: d.action,
        nehari_residual: g.nehari_residual(),
        pohozaev_residual: g.pohozaev_residual(),
    }
}

fn save_ground_state(dir: &RunDir, g: &GroundState) -> Result<(), CliError> {
    dir.with_file("ground_state.txt", |w| write_profile(w, g))?;
    dir.write_json("ground_state.json", &record(g))
}

fn identity_checks(summary: &mut Summary, g: &GroundState, tol: f64) {
    let omega = g.params.omega;
    summary.check(
        "groundstate.nehari_identity",
        g.nehari_residual() <= tol,
        format!("omega={omega}: |K|/(|grad|^2+omega M) = {:.3e} <= {tol:.0e}", g.nehari_residual()),
    );
    summary.check(
        "groundstate.pohozaev_identity",
        g.pohozaev_residual() <= tol,
        format!("omega={omega}: |P|/|grad|^2 = {:.3e} <= {tol:.0e}", g.pohozaev_residual()),
    );
}

fn ground_state(config: &ExperimentConfig, dir: &RunDir, summary: &mut Summary) -> Result<(), CliError> {
    let exp = config.experiment;
    let params = config.params;
    let g = solve_ground_state(&params, &config.solver).map_err(ctx(exp, "solve"))?;
    save_ground_state(dir, &g)?;
    identity_checks(summary, &g, config.analysis.identity_tolerance);
    summary.check(
        "groundstate.positive_decreasing",
        g.profile.is_ground_state_shaped(config.solver.tail_tolerance),
        "profile positive, non-increasing and small at rmax",
    );
    if params.dim == 1 {
        let root = first_integral_root(&params);
        let rel = (g.phi0 - root).abs() / root;
        summary.check(
            "groundstate.first_integral_amplitude",
            rel <= AMPLITUDE_TOLERANCE,
            format!("phi0 = {:.12}, root = {root:.12}, relative {rel:.2e} <= {AMPLITUDE_TOLERANCE:.0e}", g.phi0),
        );
        let single = if params.a == 0.0 {
            Some((params.b, params.q))
        } else if params.b == 0.0 {
            Some((params.a, params.p))
        } else {
            None
        };
        if let Some((c, e)) = single {
            let err = g
                .profile
                .r
                .iter()
                .zip(&g.profile.values)
                .map(|(&r, &v)| (v - single_power_soliton(c, e, params.omega, r)).abs())
                .fold(0.0, f64::max);
            summary.check(
                "groundstate.single_power_oracle",
                err <= SOLITON_TOLERANCE,
                format!("L-infinity distance to the sech profile {err:.3e} <= {SOLITON_TOLERANCE:.0e}"),
            );
        }
    }
    if g.energy() > 0.0 && params.a > 0.0 && params.b > 0.0 {
        let curve = ScalingCurve::from_norms(&g.diagnostics.base(), &params);
        let pts = critical_points(&curve).map_err(ctx(exp, "scaling curve"))?;
        summary.check(
            "scaling.ground_state_is_lambda3",
            (pts.lambda3 - 1.0).abs() <= config.analysis.identity_tolerance,
            format!("lambda3 = {:.9}", pts.lambda3),
        );
    }
    Ok(())
}

fn sweep(config: &ExperimentConfig, dir: &RunDir, summary: &mut Summary) -> Result<(), CliError> {
    let exp = config.experiment;
    let omegas = config.sweep.omegas();
    let states = omega_sweep(&omegas, &config.params, &config.solver, true).map_err(ctx(exp, "sweep"))?;
    let mut csv = String::from(
        "omega,phi0,mass,grad2,lp,lq,energy,action,nehari_residual,pohozaev_residual,power_ratio,energy_indicator\n",
    );
    for g in &states {
        let d = &g.diagnostics;
        let _ = writeln!(
            csv,
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            g.params.omega,
            g.phi0,
            d.mass,
            d.grad2,
            d.lp,
            d.lq,
            d.energy,
            d.action,
            g.nehari_residual(),
            g.pohozaev_residual(),
            g.power_ratio(),
            g.energy_sign_indicator()
        );
    }
    dir.write("omega_sweep.csv", csv)?;

    let tol = config.analysis.identity_tolerance;
    let worst = states
        .iter()
        .map(|g| g.nehari_residual().max(g.pohozaev_residual()))
        .fold(0.0, f64::max);
    summary.check(
        "groundstate.identities_along_sweep",
        worst <= tol,
        format!("{} frequencies, worst residual {worst:.3e} <= {tol:.0e}", states.len()),
    );
    let increasing = states.windows(2).all(|w| w[1].action() > w[0].action());
    summary.check("groundstate.action_increasing", increasing, "d(omega) strictly increasing along the sweep");

    if config.params.a > 0.0 && config.params.b > 0.0 {
        let changes = states
            .windows(2)
            .filter(|w| (w[0].energy() > 0.0) != (w[1].energy() > 0.0))
            .count();
        summary.check(
            "scaling.energy_sign_changes_once",
            changes == 1,
            format!("E(phi_omega) changes sign {changes} time(s)"),
        );
        let disagree = states
            .iter()
            .filter(|g| (g.energy_sign_indicator() > 0.0) != (g.energy() > 0.0))
            .count();
        summary.check(
            "scaling.indicator_sign_agrees",
            disagree == 0,
            format!("indicator and direct energy disagree at {disagree} of {} points", states.len()),
        );
        let start = ((1.0 - config.sweep.tail_fraction) * states.len() as f64).floor() as usize;
        let tail = &states[start.min(states.len() - 1)..];
        let decreasing = tail.windows(2).all(|w| w[1].power_ratio() < w[0].power_ratio());
        summary.check(
            "groundstate.power_ratio_decreasing",
            decreasing,
            format!("lp/lq decreasing over the top {} sweep points", tail.len()),
        );
    }
    Ok(())
}

fn run_locate_omega1(config: &ExperimentConfig, dir: &RunDir) -> Result<Omega1Report, CliError> {
    let report = locate_omega1(
        &config.params,
        config.omega1.bracket,
        &config.solver,
        config.omega1.relative_tolerance,
    )
    .map_err(ctx(config.experiment, "locate omega1"))?;
    dir.write_json("omega1.json", &report)?;
    let mut csv = String::from("omega,phi0,indicator,energy,pohozaev_residual,resolved,signs_agree\n");
    for it in &report.iterates {
        let _ = writeln!(
            csv,
            "{:e},{:e},{:e},{:e},{:e},{},{}",
            it.omega, it.phi0, it.indicator, it.energy, it.pohozaev_residual, it.resolved, it.signs_agree
        );
    }
    dir.write("omega1_iterates.csv", csv)?;
    Ok(report)
}

fn omega1_checks(summary: &mut Summary, report: &Omega1Report) {
    summary.check(
        "scaling.omega1_signs_agree",
        report.all_signs_agree(),
        format!(
            "indicator and direct energy signs agree at {} of {} iterates ({} below solver resolution)",
            report.iterates.iter().filter(|i| i.resolved && i.signs_agree).count(),
            report.iterates.iter().filter(|i| i.resolved).count(),
            report.iterates.iter().filter(|i| !i.resolved).count()
        ),
    );
}

fn omega1(config: &ExperimentConfig, dir: &RunDir, summary: &mut Summary) -> Result<(), CliError> {
    let report = run_locate_omega1(config, dir)?;
    omega1_checks(summary, &report);
    let energy = |w: f64| {
        solve_ground_state(&config.params.with_omega(w), &config.solver)
            .map(|g| g.energy())
            .map_err(ctx(config.experiment, format!("solve at omega={w}")))
    };
    let (below, above) = (energy(0.9 * report.omega1)?, energy(1.1 * report.omega1)?);
    summary.check(
        "scaling.omega1_brackets_sign_change",
        below < 0.0 && above > 0.0,
        format!(
            "omega1 = {:.9}, E(0.9 omega1) = {below:.3e}, E(1.1 omega1) = {above:.3e}",
            report.omega1
        ),
    );
    Ok(())
}

/// Random four-point curve with every critical point inside `[1e-3, 1e3]`.
pub fn random_curve(rng: &mut ChaCha8Rng) -> ScalingCurve {
    loop {
        let alpha = rng.gen_range(0.2..1.9);
        let beta = rng.gen_range(2.1..6.0);
        let c2 = rng.gen_range(0.5..2.0);
        let ca = rng.gen_range(0.01..c2);
        let cb = rng.gen_range(0.01..c2);
        let c = ScalingCurve::from_coefficients(c2, ca, cb, alpha, beta);
        if c.energy(1.0) > 0.0
            && c.energy(1e-3) < 0.0
            && c.denergy(1e-3) < 0.0
            && c.energy(1e3) < 0.0
            && c.denergy(1e3) < 0.0
        {
            return c;
        }
    }
}

/// Outcome of comparing extracted critical points with a dense sign scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanComparison {
    pub extracted: [f64; 4],
    /// Scan cells `[grid[i], grid[i+1]]` holding the sign changes of E' and E.
    pub cells: Option<[[f64; 2]; 4]>,
    pub agree: bool,
    pub shape_holds: bool,
}

/// Sign changes of E' (λ₁, λ₃) and E (λ₂, λ₄) on `points` log-spaced samples
/// of `[lo, hi]`, compared with [`critical_points`] to one sample spacing.
pub fn compare_with_dense_scan(curve: &ScalingCurve, lo: f64, hi: f64, points: usize) -> nlslab::Result<ScanComparison> {
    let pts = critical_points(curve)?;
    let step = (hi / lo).ln() / (points - 1) as f64;
    let at = |i: usize| lo * (step * i as f64).exp();
    let (mut zeros, mut stationary) = (vec![], vec![]);
    let (mut e_prev, mut d_prev) = (curve.energy(lo) > 0.0, curve.denergy(lo) > 0.0);
    for i in 1..points {
        let l = at(i);
        let (e, d) = (curve.energy(l) > 0.0, curve.denergy(l) > 0.0);
        if e != e_prev {
            zeros.push(i - 1);
        }
        if d != d_prev {
            stationary.push(i - 1);
        }
        (e_prev, d_prev) = (e, d);
    }
    let shape_holds = verify_shape(curve, &pts, (lo, hi), points.min(100_000)).holds();
    let extracted = pts.as_array();
    if zeros.len() != 2 || stationary.len() != 2 {
        return Ok(ScanComparison {
            extracted,
            cells: None,
            agree: false,
            shape_holds,
        });
    }
    let cell = |i: usize| [at(i), at(i + 1)];
    let cells = [
        cell(stationary[0]),
        cell(zeros[0]),
        cell(stationary[1]),
        cell(zeros[1]),
    ];
    // within one sample spacing of the bracketing cell
    let agree = extracted
        .iter()
        .zip(&cells)
        .all(|(x, [a, b])| *x >= a * (-step).exp() && *x <= b * step.exp());
    Ok(ScanComparison {
        extracted,
        cells: Some(cells),
        agree,
        shape_holds,
    })
}

/// `v = φ(1 + ε + δ(r/w)e^{-(r/w)²})` with ε < 0, which after rescaling to the
/// maximum of its curve tends to have K_ω < 0.
fn perturbation(g: &GroundState, rng: &mut ChaCha8Rng) -> nlslab::Result<nlslab::RadialProfile> {
    let eps = rng.gen_range(-0.1..0.0);
    let delta = rng.gen_range(-0.1..0.1);
    let width: f64 = rng.gen_range(0.1..1.0) / g.params.omega.sqrt() * 4.0;
    g.profile.map_values(|r, v| {
        let s = r / width;
        v * (1.0 + eps + delta * s * (-s * s).exp())
    })
}

/// Inputs satisfying E > 0, K_ω < 0, P = 0, built from seeded perturbations
/// of the ground state.
pub fn lemma2_inputs(g: &GroundState, count: usize, seed: u64) -> nlslab::Result<Vec<nlslab::RadialProfile>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..50 * count {
        if out.len() == count {
            break;
        }
        let v = perturbation(g, &mut rng)?;
        let curve = ScalingCurve::from_norms(&norms(&v, &g.params)?.base(), &g.params);
        let Ok(pts) = critical_points(&curve) else { continue };
        let w = rescale(&v, pts.lambda3)?;
        let rep = norms(&w, &g.params)?;
        if rep.energy > 0.0 && rep.nehari < 0.0 {
            out.push(w);
        }
    }
    Ok(out)
}

fn lemma_checks(config: &ExperimentConfig, dir: &RunDir, summary: &mut Summary) -> Result<(), CliError> {
    let exp = config.experiment;
    let corpus = config.corpus;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let curves: Vec<ScalingCurve> = (0..corpus.curves).map(|_| random_curve(&mut rng)).collect();
    let comparisons = curves
        .par_iter()
        .map(|c| compare_with_dense_scan(c, 1e-3, 1e3, corpus.scan_points))
        .collect::<nlslab::Result<Vec<_>>>()
        .map_err(ctx(exp, "dense scan"))?;
    let mut csv = String::from("curve,c2,c_alpha,c_beta,alpha,beta,lambda1,lambda2,lambda3,lambda4,agree,shape\n");
    for (i, (c, cmp)) in curves.iter().zip(&comparisons).enumerate() {
        let [l1, l2, l3, l4] = cmp.extracted;
        let _ = writeln!(
            csv,
            "{i},{:e},{:e},{:e},{:e},{:e},{l1:e},{l2:e},{l3:e},{l4:e},{},{}",
            c.c2, c.c_alpha, c.c_beta, c.alpha, c.beta, cmp.agree, cmp.shape_holds
        );
    }
    dir.write("random_curves.csv", csv)?;
    let agree = comparisons.iter().filter(|c| c.agree).count();
    let shaped = comparisons.iter().filter(|c| c.shape_holds).count();
    summary.check(
        "scaling.critical_points_match_dense_scan",
        agree == curves.len(),
        format!(
            "{agree}/{} curves within one spacing of a {}-point scan",
            curves.len(),
            corpus.scan_points
        ),
    );
    summary.check(
        "scaling.curve_shape",
        shaped == curves.len(),
        format!("sign, monotonicity and maximum pattern hold on {shaped}/{} curves", curves.len()),
    );

    let g = solve_ground_state(&config.params, &config.solver).map_err(ctx(exp, "solve"))?;
    save_ground_state(dir, &g)?;
    identity_checks(summary, &g, config.analysis.identity_tolerance);
    if !(g.energy() > 0.0) {
        summary.check(
            "scaling.positive_ground_energy",
            false,
            format!("E(phi_omega) = {:.3e} at omega = {}; choose omega above omega1", g.energy(), g.params.omega),
        );
        return Ok(());
    }

    let inputs = lemma2_inputs(&g, corpus.lemma_inputs, config.seed).map_err(ctx(exp, "lemma 2 inputs"))?;
    let mut rows = String::from("check,index,parameter,value,margin\n");
    let mut worst_margin = f64::INFINITY;
    let mut all_hold = inputs.len() == corpus.lemma_inputs;
    for (i, v) in inputs.iter().enumerate() {
        let r = lemma2_check(v, &g, &config.analysis).map_err(ctx(exp, format!("lemma 2 input {i}")))?;
        worst_margin = worst_margin.min(r.margin);
        all_hold &= r.holds;
        let _ = writeln!(rows, "lemma2,{i},{:e},{:e},{:e}", r.lambda0, r.action, r.margin);
    }
    summary.check(
        "scaling.lemma2_action_above_ground",
        all_hold,
        format!(
            "{}/{} inputs with E>0, K<0, P=0; min S(v) - d(omega) = {worst_margin:.3e}",
            inputs.len(),
            corpus.lemma_inputs
        ),
    );

    let upper = theorem1_window(&g).map_err(ctx(exp, "dilation window"))?;
    let mut worst_slack = f64::INFINITY;
    let mut all_hold = true;
    for i in 1..=corpus.lemma_inputs {
        let lambda = 1.0 + (upper - 1.0) * i as f64 / (corpus.lemma_inputs + 1) as f64;
        let v = rescale(&g.profile, lambda).map_err(ctx(exp, "rescale"))?;
        let r = lemma_ep_check(&v, &g, &config.analysis).map_err(ctx(exp, format!("lemma EP at lambda={lambda}")))?;
        worst_slack = worst_slack.min(r.slack);
        all_hold &= r.holds;
        let _ = writeln!(rows, "lemma_ep,{i},{lambda:e},{:e},{:e}", r.energy - r.virial, r.slack);
    }
    summary.check(
        "scaling.lemma_ep_slack",
        all_hold,
        format!(
            "{} dilations in (1, {upper:.6}); min E(v) - P(v) - E(phi) = {worst_slack:.3e} >= -{:.0e}",
            corpus.lemma_inputs, config.analysis.slack_tolerance
        ),
    );

    let slope = nehari_slope(&g, &g.profile, 1e-4).map_err(ctx(exp, "nehari slope"))?;
    let rel = (slope.analytic - slope.finite_difference).abs() / slope.analytic.abs();
    let _ = writeln!(rows, "nehari_slope,0,1,{:e},{:e}", slope.analytic, slope.finite_difference);
    summary.check(
        "scaling.nehari_slope_negative",
        slope.analytic < 0.0 && rel <= config.analysis.identity_tolerance,
        format!(
            "dK/dlambda = {:.6e} analytic vs {:.6e} differenced (relative {rel:.2e})",
            slope.analytic, slope.finite_difference
        ),
    );
    dir.write("lemma_checks.csv", rows)
}

/// Per-λ outcome of the instability demonstration.
#[derive(Debug, Clone, Serialize)]
pub struct DemoRun {
    pub lambda: f64,
    pub membership: BMembership,
    pub lemma_ep: Option<LemmaEpReport>,
    pub verdict: Verdict,
    pub trusted_samples: usize,
    pub steps: usize,
    pub min_dt: f64,
    pub monotonicity: Result<MonotonicityReport, String>,
    #[serde(skip)]
    pub trace: EvolutionTrace,
}

fn demo_run(config: &ExperimentConfig, g: &GroundState, lambda: f64) -> nlslab::Result<DemoRun> {
    let u0 = g.to_grid(config.grid.half_width, config.grid.n, lambda)?;
    let m = membership(&u0, g, &config.analysis)?;
    let lemma_ep = if m.in_b {
        Some(lemma_ep_check(&u0, g, &config.analysis)?)
    } else {
        None
    };
    let trace = evolve(&u0, &g.params, &config.evolution)?;
    let monotonicity = match monotonicity_check(&trace, g.energy(), &m, config.analysis.slack_tolerance) {
        Ok(r) => Ok(r),
        Err(e @ (Error::InvariantViolation { .. } | Error::HypothesisFailure(_))) => Err(e.to_string()),
        Err(e) => return Err(e),
    };
    Ok(DemoRun {
        lambda,
        membership: m,
        lemma_ep,
        verdict: trace.verdict,
        trusted_samples: trace.trusted_prefix(),
        steps: trace.steps,
        min_dt: trace.min_dt,
        monotonicity,
        trace,
    })
}

fn verdict_label(v: &Verdict) -> (&'static str, f64) {
    let label = match v {
        Verdict::RanToHorizon => "RAN_TO_HORIZON",
        Verdict::Blowup { .. } => "BLOWUP",
        Verdict::StepCollapse { .. } => "STEP_COLLAPSE",
    };
    (label, v.time().unwrap_or(f64::NAN))
}

fn instability_demo(config: &ExperimentConfig, dir: &RunDir, summary: &mut Summary) -> Result<(), CliError> {
    let exp = config.experiment;
    let report = run_locate_omega1(config, dir)?;
    omega1_checks(summary, &report);
    let omega = config.omega1.factor * report.omega1;
    let g = solve_ground_state(&config.params.with_omega(omega), &config.solver)
        .map_err(ctx(exp, format!("solve at omega={omega}")))?;
    save_ground_state(dir, &g)?;
    identity_checks(summary, &g, config.analysis.identity_tolerance);

    let runs = config
        .lambdas
        .par_iter()
        .map(|&l| demo_run(config, &g, l).map_err(ctx(exp, format!("lambda={l}"))))
        .collect::<Result<Vec<_>, _>>()?;

    let mut csv = String::from(
        "lambda,in_b,energy,virial,nehari,lemma_ep_slack,verdict,t_detect,trusted_samples,worst_excess,steps,min_dt\n",
    );
    for r in &runs {
        let (label, t) = verdict_label(&r.verdict);
        let slack = r.lemma_ep.map_or(f64::NAN, |e| e.slack);
        let excess = r.monotonicity.as_ref().map_or(f64::NAN, |m| m.worst_excess);
        let _ = writeln!(
            csv,
            "{},{},{:e},{:e},{:e},{slack:e},{label},{t:e},{},{excess:e},{},{:e}",
            r.lambda,
            r.membership.in_b,
            r.membership.energy,
            r.membership.virial,
            r.membership.nehari,
            r.trusted_samples,
            r.steps,
            r.min_dt
        );
        dir.with_file(&format!("trace_lambda_{}.txt", r.lambda), |w| write_trace(w, &r.trace))?;
    }
    dir.write("instability.csv", csv)?;
    dir.write_json("instability.json", &runs)?;

    for r in &runs {
        let l = r.lambda;
        let m = &r.membership;
        summary.check(
            format!("scaling.b_omega_membership[lambda={l}]"),
            m.in_b,
            format!(
                "E = {:.6e}, P = {:.6e}, K = {:.6e}, mass deviation {:.2e}",
                m.energy, m.virial, m.nehari, m.mass_match.value
            ),
        );
        if let Some(ep) = &r.lemma_ep {
            summary.check(
                format!("scaling.lemma_ep_slack[lambda={l}]"),
                ep.holds,
                format!("E(v) - P(v) - E(phi) = {:.6e}", ep.slack),
            );
        }
        let (passed, detail) = match &r.monotonicity {
            Ok(mono) => (
                mono.worst_excess <= config.analysis.slack_tolerance,
                format!(
                    "max P(u(t)) - (E(u0) - E(phi)) = {:.3e} over {} trusted samples",
                    mono.worst_excess, mono.samples_checked
                ),
            ),
            Err(e) => (false, e.clone()),
        };
        summary.check(format!("evolution.virial_monotonicity[lambda={l}]"), passed, detail);
        let (label, t) = verdict_label(&r.verdict);
        summary.check(
            format!("evolution.blowup_verdict[lambda={l}]"),
            r.verdict.is_blowup(),
            format!("{label} at t = {t:.6}"),
        );
    }
    let mut order: Vec<&DemoRun> = runs.iter().collect();
    order.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    let times: Vec<f64> = order.iter().map(|r| verdict_label(&r.verdict).1).collect();
    let decreasing = order.iter().all(|r| r.verdict.is_blowup()) && times.windows(2).all(|w| w[1] < w[0]);
    summary.check(
        "evolution.t_detect_decreasing",
        decreasing,
        format!("t_detect by increasing lambda: {times:?}"),
    );
    Ok(())
}

fn free_benchmark(config: &ExperimentConfig, dir: &RunDir, summary: &mut Summary) -> Result<(), CliError> {
    let exp = config.experiment;
    let params = Parameters {
        dim: 1,
        a: 0.0,
        b: 0.0,
        ..config.params
    };
    let u0 = GridFunction::from_real_fn(config.grid.half_width, config.grid.n, |x| (-x * x / 2.0).exp())
        .map_err(ctx(exp, "initial datum"))?;
    let trace = evolve(&u0, &params, &config.evolution).map_err(ctx(exp, "evolve"))?;
    dir.with_file("trace_free.txt", |w| write_trace(w, &trace))?;

    // ‖xu(t)‖² = (√π/2)(1 + 4t²) for u₀ = e^{-x²/2}
    let half = std::f64::consts::PI.sqrt() / 2.0;
    let mut csv = String::from("t,variance,exact,relative_error\n");
    let mut worst: f64 = 0.0;
    for (t, v) in trace.times.iter().zip(&trace.virial) {
        let exact = half * (1.0 + 4.0 * t * t);
        let rel = (v - exact).abs() / exact;
        worst = worst.max(rel);
        let _ = writeln!(csv, "{t:e},{v:e},{exact:e},{rel:e}");
    }
    dir.write("free_benchmark.csv", csv)?;
    summary.check(
        "evolution.free_variance_law",
        worst <= FREE_TOLERANCE,
        format!("max relative deviation from (sqrt(pi)/2)(1+4t^2): {worst:.3e} <= {FREE_TOLERANCE:.0e}"),
    );
    let vr = virial_residual(&trace).map_err(ctx(exp, "virial residual"))?;
    summary.check(
        "evolution.virial_identity",
        vr.within(FREE_TOLERANCE),
        format!("max |d2/dt2 |xu|^2 - 8P| / max|8P| = {:.3e} <= {FREE_TOLERANCE:.0e}", vr.relative),
    );
    summary.check(
        "evolution.conservation",
        trace.conservation_holds(),
        format!(
            "mass drift {:.3e}, energy drift {:.3e} over t = {}",
            trace.max_mass_drift(),
            trace.energy_drift().iter().fold(0.0f64, |a, b| a.max(*b)),
            trace.times.last().copied().unwrap_or(0.0)
        ),
    );
    summary.check(
        "evolution.ran_to_horizon",
        trace.verdict == Verdict::RanToHorizon,
        trace.verdict.to_string(),
    );
    Ok(())
}
