//! Mass, energy, action, Nehari and virial functionals on both field
//! representations, plus the mass-preserving dilation v^λ.
//!
//! All four functionals are assembled from the same four base norms
//!
//! ```text
//! mass = ‖v‖²,  grad2 = ‖∇v‖²,  lp = ‖v‖_{p+1}^{p+1},  lq = ‖v‖_{q+1}^{q+1}
//! E  = grad2/2 - a·lp/(p+1) - b·lq/(q+1)
//! S  = E + ω·mass/2
//! K  = grad2 + ω·mass - a·lp - b·lq
//! P  = grad2 - aα·lp/(p+1) - bβ·lq/(q+1)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::params::{radial_weights, Parameters};
use crate::profile::RadialProfile;
use crate::scaling::ScalingCurve;

/// Largest relative Richardson (or spectral-halving) disagreement tolerated
/// in the gradient norm before a field counts as under-resolved.
pub const RESOLUTION_TOLERANCE: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Summation {
    #[default]
    Naive,
    Kahan,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BaseNorms {
    pub mass: f64,
    pub grad2: f64,
    pub lp: f64,
    pub lq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub mass: f64,
    pub grad2: f64,
    pub lp: f64,
    pub lq: f64,
    pub energy: f64,
    pub action: f64,
    pub nehari: f64,
    pub virial: f64,
}

impl FunctionalReport {
    pub fn assemble(n: BaseNorms, params: &Parameters) -> Self {
        let Parameters { a, b, p, q, omega, .. } = *params;
        let (alpha, beta) = (params.alpha(), params.beta());
        let energy = 0.5 * n.grad2 - a / (p + 1.0) * n.lp - b / (q + 1.0) * n.lq;
        FunctionalReport {
            mass: n.mass,
            grad2: n.grad2,
            lp: n.lp,
            lq: n.lq,
            energy,
            action: energy + 0.5 * omega * n.mass,
            nehari: n.grad2 + omega * n.mass - a * n.lp - b * n.lq,
            virial: n.grad2 - a * alpha / (p + 1.0) * n.lp - b * beta / (q + 1.0) * n.lq,
        }
    }

    pub fn base(&self) -> BaseNorms {
        BaseNorms {
            mass: self.mass,
            grad2: self.grad2,
            lp: self.lp,
            lq: self.lq,
        }
    }

    /// ‖∇v‖_{L²}.
    pub fn grad_norm(&self) -> f64 {
        self.grad2.sqrt()
    }

    /// Sum of the absolute energy contributions; a scale for relative energy errors
    /// that stays meaningful when E itself is near zero.
    pub fn energy_scale(&self, params: &Parameters) -> f64 {
        0.5 * self.grad2
            + params.a / (params.p + 1.0) * self.lp
            + params.b / (params.q + 1.0) * self.lq
    }
}

/// Anything the functionals can be evaluated on.
pub trait Field: Sized {
    fn base_norms(&self, params: &Parameters, summation: Summation) -> Result<BaseNorms>;

    /// v^λ(x) = λ^{N/2} v(λx).
    fn rescaled(&self, lambda: f64) -> Result<Self>;
}

pub fn norms<F: Field>(v: &F, params: &Parameters) -> Result<FunctionalReport> {
    norms_with(v, params, Summation::Naive)
}

pub fn norms_with<F: Field>(
    v: &F,
    params: &Parameters,
    summation: Summation,
) -> Result<FunctionalReport> {
    Ok(FunctionalReport::assemble(v.base_norms(params, summation)?, params))
}

pub fn rescale<F: Field>(v: &F, lambda: f64) -> Result<F> {
    v.rescaled(lambda)
}

pub fn scaling_curve<F: Field>(v: &F, params: &Parameters) -> Result<ScalingCurve> {
    Ok(ScalingCurve::from_norms(&v.base_norms(params, Summation::Naive)?, params))
}

fn sum(it: impl Iterator<Item = f64>, summation: Summation) -> f64 {
    match summation {
        Summation::Naive => it.sum(),
        Summation::Kahan => {
            let (mut s, mut c) = (0.0f64, 0.0f64);
            for x in it {
                let y = x - c;
                let t = s + y;
                c = (t - s) - y;
                s = t;
            }
            s
        }
    }
}

/// Fourth-order centred first derivative on a uniform radial grid, closed at
/// r = 0 by the even reflection φ(-r) = φ(r) and one-sided at the far end.
pub fn radial_derivative(values: &[f64], h: f64) -> Vec<f64> {
    let m = values.len();
    let at = |i: isize| -> f64 { values[i.unsigned_abs()] };
    (0..m)
        .map(|i| {
            let ii = i as isize;
            if i + 2 < m {
                (at(ii - 2) - 8.0 * at(ii - 1) + 8.0 * at(ii + 1) - at(ii + 2)) / (12.0 * h)
            } else {
                let f = |k: usize| values[i - k];
                (25.0 * f(0) - 48.0 * f(1) + 36.0 * f(2) - 16.0 * f(3) + 3.0 * f(4)) / (12.0 * h)
            }
        })
        .collect()
}

fn power_norm(values: &[f64], w: &[f64], expo: f64, summation: Summation) -> f64 {
    sum(
        values.iter().zip(w).map(|(v, w)| w * v.abs().powf(expo)),
        summation,
    )
}

impl Field for RadialProfile {
    fn base_norms(&self, params: &Parameters, summation: Summation) -> Result<BaseNorms> {
        if params.dim != self.dim {
            return Err(Error::InvalidInput(format!(
                "profile lives in N={} but parameters have N={}",
                self.dim, params.dim
            )));
        }
        let h = self
            .uniform_spacing()
            .ok_or_else(|| Error::InvalidInput("norms need uniformly spaced radii".into()))?;
        if self.len() < 10 {
            return Err(Error::ResolutionTooCoarse {
                disagreement: f64::INFINITY,
            });
        }
        let w = radial_weights(&self.r, self.dim);
        let d = radial_derivative(&self.values, h);
        let grad2 = sum(d.iter().zip(&w).map(|(d, w)| w * d * d), summation);

        // Richardson check against the every-other-point subgrid.
        let coarse_r: Vec<f64> = self.r.iter().step_by(2).copied().collect();
        let coarse_v: Vec<f64> = self.values.iter().step_by(2).copied().collect();
        let wc = radial_weights(&coarse_r, self.dim);
        let dc = radial_derivative(&coarse_v, 2.0 * h);
        let grad2_coarse = sum(dc.iter().zip(&wc).map(|(d, w)| w * d * d), summation);
        if grad2 > 0.0 {
            let disagreement = (grad2 - grad2_coarse).abs() / grad2;
            if disagreement > RESOLUTION_TOLERANCE {
                return Err(Error::ResolutionTooCoarse { disagreement });
            }
        }

        Ok(BaseNorms {
            mass: power_norm(&self.values, &w, 2.0, summation),
            grad2,
            lp: power_norm(&self.values, &w, params.p + 1.0, summation),
            lq: power_norm(&self.values, &w, params.q + 1.0, summation),
        })
    }

    fn rescaled(&self, lambda: f64) -> Result<Self> {
        RadialProfile::rescaled(self, lambda)
    }
}

/// Spectral base norms of a grid field without the resolution check, together
/// with the fraction of ‖∇u‖² carried by the upper half of the resolved band.
pub fn grid_norms_unchecked(
    u: &GridFunction,
    params: &Parameters,
    summation: Summation,
) -> (BaseNorms, f64) {
    let n = u.n();
    let h = u.spacing();
    let spec = u.spectrum();
    let k = u.wavenumbers();
    let kmax = k[n / 2].abs();
    let terms: Vec<f64> = spec
        .iter()
        .zip(&k)
        .map(|(c, k)| k * k * c.norm_sqr())
        .collect();
    let grad2 = h / n as f64 * sum(terms.iter().copied(), summation);
    let high = h / n as f64
        * sum(
            terms.iter().zip(&k).filter(|(_, k)| k.abs() > 0.5 * kmax).map(|(t, _)| *t),
            summation,
        );
    let modulus: Vec<f64> = u.values().iter().map(|z| z.norm()).collect();
    let lp = h * sum(modulus.iter().map(|m| m.powf(params.p + 1.0)), summation);
    let lq = h * sum(modulus.iter().map(|m| m.powf(params.q + 1.0)), summation);
    let mass = h * sum(modulus.iter().map(|m| m * m), summation);
    let tail = if grad2 > 0.0 { high / grad2 } else { 0.0 };
    (
        BaseNorms {
            mass,
            grad2,
            lp,
            lq,
        },
        tail,
    )
}

impl Field for GridFunction {
    fn base_norms(&self, params: &Parameters, summation: Summation) -> Result<BaseNorms> {
        if params.dim != 1 {
            return Err(Error::InvalidInput(format!(
                "grid fields are one-dimensional, parameters have N={}",
                params.dim
            )));
        }
        let (norms, tail) = grid_norms_unchecked(self, params, summation);
        if tail > RESOLUTION_TOLERANCE {
            return Err(Error::ResolutionTooCoarse { disagreement: tail });
        }
        Ok(norms)
    }

    fn rescaled(&self, lambda: f64) -> Result<Self> {
        GridFunction::rescaled(self, lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian_profile(dim: usize) -> RadialProfile {
        let h = 2e-3;
        let r: Vec<f64> = (0..=10_000).map(|i| i as f64 * h).collect();
        let v = r.iter().map(|r| (-r * r / 2.0).exp()).collect();
        RadialProfile::new(r, v, dim).unwrap()
    }

    // v = exp(-x²/2) in 1-D: mass = √π, grad2 = √π/2, ∫v⁴ = √(π/2), ∫v⁸ = √π/2
    fn gaussian_expected() -> (f64, f64, f64, f64) {
        let sp = PI.sqrt();
        (sp, 0.5 * sp, (0.5 * PI).sqrt(), 0.5 * sp)
    }

    #[test]
    fn gaussian_report_radial() {
        let params = Parameters::canonical(1.0);
        let r = norms(&gaussian_profile(1), &params).unwrap();
        let (m, g, lp, lq) = gaussian_expected();
        for (got, want) in [(r.mass, m), (r.grad2, g), (r.lp, lp), (r.lq, lq)] {
            assert!((got - want).abs() < 1e-9 * want, "{got} vs {want}");
        }
        assert!((r.energy - 0.019_006_5).abs() < 1e-7, "{}", r.energy);
        assert!((r.nehari - 0.519_139_8).abs() < 1e-7, "{}", r.nehari);
        assert!((r.virial - 0.240_563_3).abs() < 1e-7, "{}", r.virial);
    }

    #[test]
    fn gaussian_report_grid() {
        let params = Parameters::canonical(1.0);
        let u = GridFunction::from_real_fn(16.0, 512, |x| (-x * x / 2.0).exp()).unwrap();
        let r = norms(&u, &params).unwrap();
        let (m, g, lp, lq) = gaussian_expected();
        for (got, want) in [(r.mass, m), (r.grad2, g), (r.lp, lp), (r.lq, lq)] {
            assert!((got - want).abs() < 1e-12 * want, "{got} vs {want}");
        }
    }

    #[test]
    fn zero_field() {
        let params = Parameters::canonical(1.0);
        let zero = gaussian_profile(1).map_values(|_, _| 0.0).unwrap();
        let r = norms(&zero, &params).unwrap();
        assert_eq!(r, FunctionalReport::assemble(BaseNorms::default(), &params));
        assert_eq!(r.energy, 0.0);
        assert_eq!(r.virial, 0.0);
    }

    #[test]
    fn assembly_identities_are_exact() {
        let params = Parameters::new(2, 0.7, 1.3, 2.0, 4.5, 2.5);
        let n = BaseNorms {
            mass: 1.25,
            grad2: 0.75,
            lp: 0.3,
            lq: 0.11,
        };
        let r = FunctionalReport::assemble(n, &params);
        assert_eq!(r.action - r.energy, 0.5 * params.omega * r.mass);
    }

    #[test]
    fn underresolved_profile_is_rejected() {
        let h = 0.5;
        let r: Vec<f64> = (0..40).map(|i| i as f64 * h).collect();
        let v = r.iter().map(|r| (-4.0 * r * r).exp()).collect();
        let p = RadialProfile::new(r, v, 1).unwrap();
        let e = norms(&p, &Parameters::canonical(1.0));
        assert!(matches!(e, Err(Error::ResolutionTooCoarse { .. })), "{e:?}");
    }

    #[test]
    fn kahan_matches_naive() {
        let params = Parameters::canonical(1.0);
        let p = gaussian_profile(1);
        let a = norms_with(&p, &params, Summation::Naive).unwrap();
        let b = norms_with(&p, &params, Summation::Kahan).unwrap();
        assert!((a.mass - b.mass).abs() < 1e-13);
    }

    #[test]
    fn three_dim_gaussian_mass() {
        // ∫_{ℝ³} e^{-|x|²} dx = π^{3/2}
        let params = Parameters::new(3, 1.0, 1.0, 2.0, 4.0, 1.0);
        let r = norms(&gaussian_profile(3), &params).unwrap();
        assert!((r.mass - PI.powf(1.5)).abs() < 1e-9, "{}", r.mass);
        // ∫|∇v|² = ∫ r² e^{-r²} = (3/2) π^{3/2}
        assert!((r.grad2 - 1.5 * PI.powf(1.5)).abs() < 1e-8, "{}", r.grad2);
    }
}
