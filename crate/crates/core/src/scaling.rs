//! Structure of the dilation curve λ ↦ E(v^λ) and the blowup set
//!
//! ```text
//! B_ω = { v : 0 < E(v) < E(φ_ω), ‖v‖² = ‖φ_ω‖², P(v) < 0, K_ω(v) < 0 }
//! ```
//!
//! Under v^λ(x) = λ^{N/2} v(λx) every functional becomes a sum of powers of λ:
//! `E(v^λ) = c₂λ² - c_α λ^α - c_β λ^β` with `0 < α < 2 < β`, so when E(v) > 0
//! the curve has a local minimum λ₁, zeros λ₂ < λ₄ and a global maximum λ₃.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{norms, BaseNorms, Field, FunctionalReport};
use crate::groundstate::{solve_ground_state, GroundState, ShootingConfig};
use crate::params::Parameters;

/// Log-spaced scan used to bracket the curve's roots.
pub const SCAN_RANGE: (f64, f64) = (1e-4, 1e4);
pub const SCAN_POINTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoints {
    /// Local minimum of E(v^λ).
    pub lambda1: f64,
    /// Lower zero of E(v^λ).
    pub lambda2: f64,
    /// Global maximum of E(v^λ).
    pub lambda3: f64,
    /// Upper zero of E(v^λ).
    pub lambda4: f64,
}

impl CriticalPoints {
    pub fn as_array(&self) -> [f64; 4] {
        [self.lambda1, self.lambda2, self.lambda3, self.lambda4]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingCurve {
    pub c2: f64,
    pub c_alpha: f64,
    pub c_beta: f64,
    pub alpha: f64,
    pub beta: f64,
    /// ω‖v‖², the λ-independent part of K_ω(v^λ).
    pub omega_mass: f64,
    /// a‖v‖_{p+1}^{p+1} and b‖v‖_{q+1}^{q+1}.
    pub a_lp: f64,
    pub b_lq: f64,
    /// Present when E(v) > 0 and the curve is non-degenerate.
    pub lambdas: Option<CriticalPoints>,
}

impl ScalingCurve {
    pub fn from_norms(n: &BaseNorms, params: &Parameters) -> Self {
        let Parameters { a, b, p, q, omega, .. } = *params;
        let mut curve = ScalingCurve {
            c2: 0.5 * n.grad2,
            c_alpha: a / (p + 1.0) * n.lp,
            c_beta: b / (q + 1.0) * n.lq,
            alpha: params.alpha(),
            beta: params.beta(),
            omega_mass: omega * n.mass,
            a_lp: a * n.lp,
            b_lq: b * n.lq,
            lambdas: None,
        };
        curve.lambdas = critical_points(&curve).ok();
        curve
    }

    /// A bare energy curve (the Nehari part is zero).
    pub fn from_coefficients(c2: f64, c_alpha: f64, c_beta: f64, alpha: f64, beta: f64) -> Self {
        let mut curve = ScalingCurve {
            c2,
            c_alpha,
            c_beta,
            alpha,
            beta,
            omega_mass: 0.0,
            a_lp: 0.0,
            b_lq: 0.0,
            lambdas: None,
        };
        curve.lambdas = critical_points(&curve).ok();
        curve
    }

    /// E(v^λ).
    pub fn energy(&self, lambda: f64) -> f64 {
        self.c2 * lambda * lambda
            - self.c_alpha * lambda.powf(self.alpha)
            - self.c_beta * lambda.powf(self.beta)
    }

    /// ∂_λ E(v^λ).
    pub fn denergy(&self, lambda: f64) -> f64 {
        2.0 * self.c2 * lambda
            - self.alpha * self.c_alpha * lambda.powf(self.alpha - 1.0)
            - self.beta * self.c_beta * lambda.powf(self.beta - 1.0)
    }

    /// P(v^λ) = λ ∂_λ E(v^λ).
    pub fn virial(&self, lambda: f64) -> f64 {
        2.0 * self.c2 * lambda * lambda
            - self.alpha * self.c_alpha * lambda.powf(self.alpha)
            - self.beta * self.c_beta * lambda.powf(self.beta)
    }

    /// K_ω(v^λ).
    pub fn nehari(&self, lambda: f64) -> f64 {
        2.0 * self.c2 * lambda * lambda + self.omega_mass
            - self.a_lp * lambda.powf(self.alpha)
            - self.b_lq * lambda.powf(self.beta)
    }

    /// ∂_λ K_ω(v^λ).
    pub fn dnehari(&self, lambda: f64) -> f64 {
        4.0 * self.c2 * lambda
            - self.alpha * self.a_lp * lambda.powf(self.alpha - 1.0)
            - self.beta * self.b_lq * lambda.powf(self.beta - 1.0)
    }

    /// S_ω(v^λ) = E(v^λ) + ω‖v‖²/2.
    pub fn action(&self, lambda: f64) -> f64 {
        self.energy(lambda) + 0.5 * self.omega_mass
    }

    fn is_degenerate(&self) -> bool {
        !(self.c2 > 0.0 && self.c_alpha > 0.0 && self.c_beta > 0.0)
            || !(0.0 < self.alpha && self.alpha < 2.0 && 2.0 < self.beta)
    }
}

/// Extract λ₁ < λ₂ < λ₃ < λ₄ by a log-spaced sign scan followed by bisection.
pub fn critical_points(curve: &ScalingCurve) -> Result<CriticalPoints> {
    if curve.is_degenerate() {
        return Err(Error::NotFourPoint);
    }
    let e1 = curve.energy(1.0);
    if !(e1 > 0.0) {
        return Err(Error::NotPositiveEnergy { energy: e1 });
    }
    // E/λ² and E'/λ share the shape: -∞ at both ends, one interior maximum.
    let g = |l: f64| curve.c2 - curve.c_alpha * l.powf(curve.alpha - 2.0) - curve.c_beta * l.powf(curve.beta - 2.0);
    let h = |l: f64| {
        2.0 * curve.c2
            - curve.alpha * curve.c_alpha * l.powf(curve.alpha - 2.0)
            - curve.beta * curve.c_beta * l.powf(curve.beta - 2.0)
    };
    let (l1, l3) = two_roots(&h)?;
    let (l2, l4) = two_roots(&g)?;
    let pts = CriticalPoints {
        lambda1: l1,
        lambda2: l2,
        lambda3: l3,
        lambda4: l4,
    };
    if !(0.0 < l1 && l1 < l2 && l2 < l3 && l3 < l4) {
        return Err(Error::NotFourPoint);
    }
    Ok(pts)
}

/// The rising and the falling zero crossing of a function negative at both
/// ends of the (possibly widened) scan range.
fn two_roots(f: &impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = SCAN_RANGE;
    for _ in 0..8 {
        let ratio = (hi / lo).ln() / (SCAN_POINTS - 1) as f64;
        let grid: Vec<f64> = (0..SCAN_POINTS).map(|i| lo * (ratio * i as f64).exp()).collect();
        let vals: Vec<f64> = grid.iter().map(|&l| f(l)).collect();
        let rise = (1..SCAN_POINTS).find(|&i| vals[i - 1] <= 0.0 && vals[i] > 0.0);
        let fall = (1..SCAN_POINTS).rev().find(|&i| vals[i - 1] > 0.0 && vals[i] <= 0.0);
        match (rise, fall) {
            (Some(i), Some(j)) if i <= j => {
                let r1 = bisect_log(f, grid[i - 1], grid[i]);
                let r2 = bisect_log(f, grid[j - 1], grid[j]);
                return Ok((r1, r2));
            }
            _ => {
                if vals[0] > 0.0 {
                    lo *= 1e-4;
                } else if vals[SCAN_POINTS - 1] > 0.0 {
                    hi *= 1e4;
                } else {
                    return Err(Error::NotFourPoint);
                }
            }
        }
    }
    Err(Error::NotFourPoint)
}

/// Geometric bisection of a sign change in `[a, b]` down to machine precision.
fn bisect_log(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa_neg = f(a) <= 0.0;
    for _ in 0..200 {
        let m = (a * b).sqrt();
        if m <= a || m >= b {
            break;
        }
        if (f(m) <= 0.0) == fa_neg {
            a = m;
        } else {
            b = m;
        }
    }
    (a * b).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub samples: usize,
    /// Sign pattern (−, +, −) on (0,λ₂), (λ₂,λ₄), (λ₄,∞).
    pub sign_ok: bool,
    /// Decreasing on (0,λ₁) ∪ (λ₃,∞), increasing on (λ₁,λ₃).
    pub monotone_ok: bool,
    /// E(v^λ) < E(v^{λ₃}) for λ ≠ λ₃.
    pub maximum_ok: bool,
}

impl ShapeReport {
    pub fn holds(&self) -> bool {
        self.sign_ok && self.monotone_ok && self.maximum_ok
    }
}

/// Check the three shape properties of the curve on `samples` log-spaced λ in `range`.
pub fn verify_shape(
    curve: &ScalingCurve,
    points: &CriticalPoints,
    range: (f64, f64),
    samples: usize,
) -> ShapeReport {
    let [l1, l2, l3, l4] = points.as_array();
    let step = (range.1 / range.0).ln() / (samples - 1) as f64;
    let lam = |i: usize| range.0 * (step * i as f64).exp();
    let emax = curve.energy(l3);
    let mut sign_ok = true;
    let mut monotone_ok = true;
    let mut maximum_ok = true;
    let mut prev = (lam(0), curve.energy(lam(0)));
    for i in 0..samples {
        let l = lam(i);
        let e = curve.energy(l);
        let want_positive = l > l2 && l < l4;
        let is_boundary = l == l2 || l == l4;
        if !is_boundary && (e > 0.0) != want_positive {
            sign_ok = false;
        }
        if l != l3 && !(e < emax) {
            maximum_ok = false;
        }
        if i > 0 {
            let (lp, ep) = prev;
            if lp >= l1 && l <= l3 && !(e > ep) {
                monotone_ok = false;
            }
            if (l <= l1 || lp >= l3) && !(e < ep) {
                monotone_ok = false;
            }
        }
        prev = (l, e);
    }
    ShapeReport {
        samples,
        sign_ok,
        monotone_ok,
        maximum_ok,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    /// The quantity required to be positive (e.g. `-P(v)` for `P(v) < 0`).
    pub value: f64,
    /// Threshold the value must exceed.
    pub margin: f64,
    pub holds: bool,
}

impl Condition {
    fn positive(value: f64, margin: f64) -> Self {
        Condition {
            value,
            margin,
            holds: value > margin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BMembership {
    pub in_b: bool,
    /// E(v) > 0.
    pub energy_positive: Condition,
    /// E(φ_ω) - E(v) > 0.
    pub energy_below_ground: Condition,
    /// Relative mass mismatch |‖v‖² - ‖φ_ω‖²| / ‖φ_ω‖² (holds when ≤ margin).
    pub mass_match: Condition,
    /// -P(v) > 0.
    pub virial_negative: Condition,
    /// -K_ω(v) > 0.
    pub nehari_negative: Condition,
    pub energy: f64,
    pub virial: f64,
    pub nehari: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Relative margin for the strict inequalities of B_ω.
    pub membership_tolerance: f64,
    /// Relative tolerance of the mass constraint.
    pub mass_tolerance: f64,
    /// |P(v)| ≤ identity_tolerance·‖∇v‖² counts as P(v) = 0.
    pub identity_tolerance: f64,
    /// Lemma-EP slack may dip to -slack_tolerance.
    pub slack_tolerance: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            membership_tolerance: 1e-8,
            mass_tolerance: 1e-8,
            identity_tolerance: 1e-6,
            slack_tolerance: 1e-8,
        }
    }
}

fn require_positive_ground_energy(ground: &GroundState) -> Result<()> {
    if ground.energy() > 0.0 {
        Ok(())
    } else {
        Err(Error::HypothesisFailure(format!(
            "E(φ_ω) = {:.6e} is not positive at ω = {}",
            ground.energy(),
            ground.params.omega
        )))
    }
}

/// Evaluate the four defining conditions of B_ω for a field with report `v`.
pub fn membership_of_report(
    v: &FunctionalReport,
    ground: &GroundState,
    config: &AnalysisConfig,
) -> Result<BMembership> {
    require_positive_ground_energy(ground)?;
    let tol = config.membership_tolerance;
    let omega = ground.params.omega;
    let gm = ground.diagnostics.mass;
    let mass_dev = (v.mass - gm).abs() / gm;
    let energy_positive = Condition::positive(v.energy, tol * v.grad2);
    let energy_below_ground = Condition::positive(ground.energy() - v.energy, tol * v.grad2);
    let mass_match = Condition {
        value: mass_dev,
        margin: config.mass_tolerance,
        holds: mass_dev <= config.mass_tolerance,
    };
    let virial_negative = Condition::positive(-v.virial, tol * v.grad2);
    let nehari_negative = Condition::positive(-v.nehari, tol * (v.grad2 + omega * v.mass));
    Ok(BMembership {
        in_b: energy_positive.holds
            && energy_below_ground.holds
            && mass_match.holds
            && virial_negative.holds
            && nehari_negative.holds,
        energy_positive,
        energy_below_ground,
        mass_match,
        virial_negative,
        nehari_negative,
        energy: v.energy,
        virial: v.virial,
        nehari: v.nehari,
        mass: v.mass,
    })
}

pub fn membership<F: Field>(v: &F, ground: &GroundState, config: &AnalysisConfig) -> Result<BMembership> {
    require_positive_ground_energy(ground)?;
    membership_of_report(&norms(v, &ground.params)?, ground, config)
}

/// Root of K_ω(v^λ) in (0, 1) when K_ω(v) < 0.
fn nehari_root_below_one(curve: &ScalingCurve) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if curve.nehari(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Report {
    /// d(ω) = S_ω(φ_ω).
    pub d_omega: f64,
    pub action: f64,
    /// S_ω(v) - d(ω), must be positive.
    pub margin: f64,
    /// λ₀ ∈ (0,1) with K_ω(v^{λ₀}) = 0.
    pub lambda0: f64,
    /// K_ω(v^{λ₀}) from the scaling closure.
    pub nehari_at_lambda0: f64,
    /// K_ω(v^{λ₀}) re-evaluated on the rescaled field.
    pub nehari_rescaled: f64,
    /// S_ω(v^{λ₀}), bounded below by d(ω).
    pub action_at_lambda0: f64,
    pub holds: bool,
}

/// For E(v) > 0, K_ω(v) < 0, P(v) = 0: report d(ω) < S_ω(v) and the
/// constructed λ₀.
pub fn lemma2_check<F: Field>(v: &F, ground: &GroundState, config: &AnalysisConfig) -> Result<Lemma2Report> {
    let params = &ground.params;
    let rep = norms(v, params)?;
    if !(rep.energy > 0.0) {
        return Err(Error::HypothesisFailure(format!("E(v) = {:.3e} is not positive", rep.energy)));
    }
    if !(rep.nehari < 0.0) {
        return Err(Error::HypothesisFailure(format!("K_ω(v) = {:.3e} is not negative", rep.nehari)));
    }
    if !(rep.virial.abs() <= config.identity_tolerance * rep.grad2) {
        return Err(Error::HypothesisFailure(format!("P(v) = {:.3e} is not zero", rep.virial)));
    }
    let curve = ScalingCurve::from_norms(&rep.base(), params);
    let lambda0 = nehari_root_below_one(&curve);
    let nehari_rescaled = norms(&v.rescaled(lambda0)?, params)?.nehari;
    let d = ground.action();
    let margin = rep.action - d;
    Ok(Lemma2Report {
        d_omega: d,
        action: rep.action,
        margin,
        lambda0,
        nehari_at_lambda0: curve.nehari(lambda0),
        nehari_rescaled,
        action_at_lambda0: curve.action(lambda0),
        holds: margin > 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaEpReport {
    pub ground_energy: f64,
    pub energy: f64,
    pub virial: f64,
    /// E(v) - P(v) - E(φ_ω).
    pub slack: f64,
    /// λ₀ < 1 with K_ω(v^{λ₀}) = 0 and λ₃ < 1 of the chain
    /// E(φ_ω) ≤ E(v^{λ₀}) ≤ E(v^{λ₃}) ≤ E(v) - P(v).
    pub lambda0: f64,
    pub lambda3: f64,
    pub energy_at_lambda0: f64,
    pub energy_at_lambda3: f64,
    pub holds: bool,
}

/// For v ∈ B_ω: E(φ_ω) ≤ E(v) - P(v).
pub fn lemma_ep_check<F: Field>(v: &F, ground: &GroundState, config: &AnalysisConfig) -> Result<LemmaEpReport> {
    let params = &ground.params;
    let rep = norms(v, params)?;
    let m = membership_of_report(&rep, ground, config)?;
    if !m.in_b {
        return Err(Error::HypothesisFailure("v is not a certified member of B_ω".into()));
    }
    let curve = ScalingCurve::from_norms(&rep.base(), params);
    let pts = critical_points(&curve)?;
    let lambda0 = nehari_root_below_one(&curve);
    let slack = rep.energy - rep.virial - ground.energy();
    Ok(LemmaEpReport {
        ground_energy: ground.energy(),
        energy: rep.energy,
        virial: rep.virial,
        slack,
        lambda0,
        lambda3: pts.lambda3,
        energy_at_lambda0: curve.energy(lambda0),
        energy_at_lambda3: curve.energy(pts.lambda3),
        holds: slack >= -config.slack_tolerance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NehariSlope {
    /// -(p-1)aα/(p+1)·lp - (q-1)bβ/(q+1)·lq.
    pub analytic: f64,
    /// Centred difference of K_ω on rescaled copies of the profile.
    pub finite_difference: f64,
}

/// ∂_λ K_ω(φ_ω^λ) at λ = 1, two ways.
pub fn nehari_slope<F: Field>(ground: &GroundState, field: &F, step: f64) -> Result<NehariSlope> {
    let Parameters { a, b, p, q, .. } = ground.params;
    let (alpha, beta) = (ground.params.alpha(), ground.params.beta());
    let d = &ground.diagnostics;
    let analytic = -(p - 1.0) * a * alpha / (p + 1.0) * d.lp - (q - 1.0) * b * beta / (q + 1.0) * d.lq;
    let kp = norms(&field.rescaled(1.0 + step)?, &ground.params)?.nehari;
    let km = norms(&field.rescaled(1.0 - step)?, &ground.params)?.nehari;
    Ok(NehariSlope {
        analytic,
        finite_difference: (kp - km) / (2.0 * step),
    })
}

/// Upper end λ₀ of the window (1, λ₀) on which φ_ω^λ ∈ B_ω: the smaller of λ₄
/// and the first zero of K_ω(φ_ω^λ) above 1.
pub fn theorem1_window(ground: &GroundState) -> Result<f64> {
    require_positive_ground_energy(ground)?;
    let curve = ScalingCurve::from_norms(&ground.diagnostics.base(), &ground.params);
    let pts = critical_points(&curve)?;
    let upper = pts.lambda4;
    // K_ω(φ^λ) starts negative just above 1; look for a return to zero.
    let n = 4096;
    let mut prev = 1.0 + 1e-6;
    for i in 1..=n {
        let l = 1.0 + (upper - 1.0) * i as f64 / n as f64;
        if curve.nehari(l) >= 0.0 {
            let (mut lo, mut hi) = (prev, l);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if curve.nehari(mid) < 0.0 {
                    lo = mid
                } else {
                    hi = mid
                }
            }
            return Ok(lo);
        }
        prev = l;
    }
    Ok(upper)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Omega1Iterate {
    pub omega: f64,
    pub phi0: f64,
    /// (β-2)b/(q+1)·lq - (2-α)a/(p+1)·lp, which equals 2E - P on the same norms.
    pub indicator: f64,
    /// E(φ_ω) evaluated directly.
    pub energy: f64,
    /// Pohozaev residual of the inner solve, which justifies the indicator.
    pub pohozaev_residual: f64,
    /// |2E(φ_ω)| exceeds |P(φ_ω)|, so the solve determines the sign of E.
    pub resolved: bool,
    pub signs_agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Omega1Report {
    pub omega1: f64,
    /// Final bracket `[lo, hi]` across which E(φ_ω) changes sign.
    pub bracket: [f64; 2],
    pub relative_tolerance: f64,
    /// Bisection stopped early because E(φ_ω) at the midpoint was smaller
    /// than the Pohozaev residual of its solve.
    pub resolution_limited: bool,
    pub iterates: Vec<Omega1Iterate>,
    pub solver: ShootingConfig,
}

impl Omega1Report {
    /// Sign agreement at every iterate whose energy sign is resolved.
    pub fn all_signs_agree(&self) -> bool {
        self.iterates.iter().filter(|i| i.resolved).all(|i| i.signs_agree)
    }
}

fn omega1_iterate(params: &Parameters, config: &ShootingConfig) -> Result<Omega1Iterate> {
    let gs = solve_ground_state(params, config)?;
    let indicator = gs.energy_sign_indicator();
    let energy = gs.energy();
    Ok(Omega1Iterate {
        omega: params.omega,
        phi0: gs.phi0,
        indicator,
        energy,
        pohozaev_residual: gs.pohozaev_residual(),
        resolved: 2.0 * energy.abs() > gs.diagnostics.virial.abs(),
        signs_agree: (indicator > 0.0) == (energy > 0.0),
    })
}

/// Bisect (geometrically) on ω for the sign change of E(φ_ω).
pub fn locate_omega1(
    template: &Parameters,
    bracket: [f64; 2],
    config: &ShootingConfig,
    relative_tolerance: f64,
) -> Result<Omega1Report> {
    let [mut lo, mut hi] = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::NoSignChange { lo, hi });
    }
    let mut iterates = vec![
        omega1_iterate(&template.with_omega(lo), config)?,
        omega1_iterate(&template.with_omega(hi), config)?,
    ];
    let (neg_lo, neg_hi) = (iterates[0].indicator < 0.0, iterates[1].indicator < 0.0);
    if neg_lo == neg_hi {
        return Err(Error::NoSignChange { lo, hi });
    }
    let mut unresolved_at = None;
    while hi / lo - 1.0 > relative_tolerance {
        let mid = (lo * hi).sqrt();
        let it = omega1_iterate(&template.with_omega(mid), config)?;
        if !it.resolved {
            // the midpoint is a zero of E to within solver accuracy
            iterates.push(it);
            unresolved_at = Some(mid);
            break;
        }
        if (it.indicator < 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        iterates.push(it);
    }
    Ok(Omega1Report {
        omega1: unresolved_at.unwrap_or((lo * hi).sqrt()),
        bracket: [lo, hi],
        relative_tolerance,
        resolution_limited: unresolved_at.is_some(),
        iterates,
        solver: *config,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_quadratic_is_degenerate() {
        let c = ScalingCurve::from_coefficients(1.0, 0.0, 0.0, 1.0, 3.0);
        assert_eq!(critical_points(&c), Err(Error::NotFourPoint));
        assert!(c.lambdas.is_none());
    }

    #[test]
    fn negative_energy_rejected() {
        let c = ScalingCurve::from_coefficients(1.0, 2.0, 1.0, 1.0, 3.0);
        assert!(matches!(critical_points(&c), Err(Error::NotPositiveEnergy { .. })));
    }

    #[test]
    fn interlacing_and_shape() {
        let c = ScalingCurve::from_coefficients(1.0, 0.2, 0.3, 1.0, 3.0);
        let pts = critical_points(&c).unwrap();
        let [l1, l2, l3, l4] = pts.as_array();
        assert!(l1 < l2 && l2 < l3 && l3 < l4);
        assert!(c.denergy(l1).abs() < 1e-12 && c.denergy(l3).abs() < 1e-12);
        assert!(c.energy(l2).abs() < 1e-12 && c.energy(l4).abs() < 1e-12);
        assert!(verify_shape(&c, &pts, (1e-4, 1e4), 20_000).holds());
    }

    #[test]
    fn virial_is_lambda_times_energy_slope() {
        let c = ScalingCurve::from_coefficients(0.7, 0.3, 0.05, 1.5, 4.5);
        for l in [0.5, 1.0, 2.0] {
            let h = 1e-5 * l;
            let fd = (c.energy(l + h) - c.energy(l - h)) / (2.0 * h);
            assert!((c.virial(l) / l - fd).abs() < 1e-6 * fd.abs().max(1e-3), "{l}");
        }
    }
}
