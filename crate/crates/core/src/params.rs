//! Model parameters of the double-power NLS
//!
//! ```text
//! i u_t = -Δu - a|u|^{p-1}u - b|u|^{q-1}u,   x ∈ ℝᴺ
//! ```
//!
//! together with the frequency ω of the standing wave `e^{iωt} φ_ω(x)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    /// Spatial dimension N.
    pub dim: usize,
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub q: f64,
    pub omega: f64,
}

impl Parameters {
    pub fn new(dim: usize, a: f64, b: f64, p: f64, q: f64, omega: f64) -> Self {
        Parameters {
            dim,
            a,
            b,
            p,
            q,
            omega,
        }
    }

    /// The desk-scale instance used throughout the repository: N=1, a=b=1, p=3, q=7.
    pub fn canonical(omega: f64) -> Self {
        Parameters::new(1, 1.0, 1.0, 3.0, 7.0, omega)
    }

    pub fn with_omega(&self, omega: f64) -> Self {
        Parameters { omega, ..*self }
    }

    /// α = N(p-1)/2, the scaling exponent of ‖v‖_{p+1}^{p+1}.
    pub fn alpha(&self) -> f64 {
        0.5 * self.dim as f64 * (self.p - 1.0)
    }

    /// β = N(q-1)/2, the scaling exponent of ‖v‖_{q+1}^{q+1}.
    pub fn beta(&self) -> f64 {
        0.5 * self.dim as f64 * (self.q - 1.0)
    }

    /// Mass-critical exponent 1 + 4/N.
    pub fn mass_critical(&self) -> f64 {
        1.0 + 4.0 / self.dim as f64
    }

    /// Energy-critical bound 2* - 1, `None` when unbounded (N = 1, 2).
    pub fn energy_critical(&self) -> Option<f64> {
        (self.dim >= 3).then(|| (self.dim as f64 + 2.0) / (self.dim as f64 - 2.0))
    }

    /// Check the full double-power window `a, b, ω > 0`, `1 < p < 1+4/N < q < 2*-1`.
    pub fn validate(self) -> Result<Self> {
        self.check_dim()?;
        for (name, value) in [("a", self.a), ("b", self.b), ("omega", self.omega)] {
            if !(value > 0.0) {
                return Err(Error::NonPositiveCoefficient { name, value });
            }
        }
        let upper = self.energy_critical().unwrap_or(f64::INFINITY);
        let mc = self.mass_critical();
        if !(1.0 < self.p && self.p < mc && mc < self.q && self.q < upper) {
            return Err(Error::ExponentOrdering {
                dim: self.dim,
                p: self.p,
                q: self.q,
            });
        }
        Ok(self)
    }

    /// Weaker check for the stationary problem: a single-power nonlinearity
    /// (`a = 0` or `b = 0`) is allowed, and the active exponents only need to
    /// be energy-subcritical.
    pub fn validate_stationary(self) -> Result<Self> {
        self.check_dim()?;
        if !(self.omega > 0.0) {
            return Err(Error::NonPositiveCoefficient {
                name: "omega",
                value: self.omega,
            });
        }
        if !(self.a >= 0.0) || !(self.b >= 0.0) || self.a + self.b == 0.0 {
            let (name, value) = if !(self.a > 0.0) { ("a", self.a) } else { ("b", self.b) };
            return Err(Error::NonPositiveCoefficient { name, value });
        }
        let upper = self.energy_critical().unwrap_or(f64::INFINITY);
        let ok_exp = |e: f64| 1.0 < e && e < upper;
        let ordered = !(self.a > 0.0 && self.b > 0.0) || self.p < self.q;
        if (self.a > 0.0 && !ok_exp(self.p)) || (self.b > 0.0 && !ok_exp(self.q)) || !ordered {
            return Err(Error::ExponentOrdering {
                dim: self.dim,
                p: self.p,
                q: self.q,
            });
        }
        Ok(self)
    }

    fn check_dim(&self) -> Result<()> {
        if (1..=3).contains(&self.dim) {
            Ok(())
        } else {
            Err(Error::BadDimension(self.dim))
        }
    }

    /// Focusing nonlinearity g(φ) = a|φ|^{p-1}φ + b|φ|^{q-1}φ.
    pub fn nonlinearity(&self, phi: f64) -> f64 {
        let m = phi.abs();
        let mut g = 0.0;
        if self.a != 0.0 {
            g += self.a * m.powf(self.p - 1.0) * phi;
        }
        if self.b != 0.0 {
            g += self.b * m.powf(self.q - 1.0) * phi;
        }
        g
    }

    /// Pointwise phase rotation rate a|u|^{p-1} + b|u|^{q-1} at modulus `m`.
    pub fn rotation_rate(&self, m: f64) -> f64 {
        let mut r = 0.0;
        if self.a != 0.0 {
            r += self.a * m.powf(self.p - 1.0);
        }
        if self.b != 0.0 {
            r += self.b * m.powf(self.q - 1.0);
        }
        r
    }
}

/// Surface measure σ_N of the unit sphere in ℝᴺ (σ₁ = 2 counts both half-lines).
pub fn sphere_measure(dim: usize) -> f64 {
    use std::f64::consts::PI;
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => f64::NAN,
    }
}

/// Composite trapezoid weights for ∫_{ℝᴺ} f dx = σ_N ∫₀^R f(r) r^{N-1} dr on
/// the (not necessarily uniform) abscissae `r`, with endpoint corrections at
/// the origin when the first cells are uniform.
pub fn radial_weights(r: &[f64], dim: usize) -> Vec<f64> {
    let m = r.len();
    let sigma = sphere_measure(dim);
    let mut w: Vec<f64> = (0..m)
        .map(|i| {
            let left = if i > 0 { r[i] - r[i - 1] } else { 0.0 };
            let right = if i + 1 < m { r[i + 1] - r[i] } else { 0.0 };
            sigma * 0.5 * (left + right) * r[i].powi(dim as i32 - 1)
        })
        .collect();
    // Euler-Maclaurin correction at the origin, where r^{N-1} f(r) may have
    // nonzero odd derivatives. f''(0) is taken from the first two samples.
    if m >= 3 && r[0] == 0.0 {
        let h = r[1];
        if ((r[2] - r[1]) - h).abs() <= 1e-9 * h {
            // r²f(r) is even for even f, so only N = 2 needs correcting
            if dim == 2 {
                w[0] += sigma * h * h * (1.0 / 12.0 + 1.0 / 120.0);
                w[1] -= sigma * h * h / 120.0;
            }
        }
    }
    w
}

/// Quadrature weights of a radial profile, see [`radial_weights`].
pub fn quadrature(profile: &crate::profile::RadialProfile) -> Vec<f64> {
    radial_weights(&profile.r, profile.dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn canonical_is_valid() {
        let p = Parameters::canonical(1.0).validate().unwrap();
        assert_eq!(p.alpha(), 1.0);
        assert_eq!(p.beta(), 3.0);
    }

    #[test]
    fn three_dim_window() {
        let p = Parameters::new(3, 1.0, 1.0, 2.0, 4.0, 1.0).validate().unwrap();
        assert_relative_eq!(p.alpha(), 1.5);
        assert_relative_eq!(p.beta(), 4.5);
        // q must stay below 2* - 1 = 5
        let bad = Parameters::new(3, 1.0, 1.0, 2.0, 5.0, 1.0).validate();
        assert!(matches!(bad, Err(Error::ExponentOrdering { .. })));
    }

    #[test]
    fn mass_critical_p_rejected() {
        let r = Parameters::new(1, 1.0, 1.0, 5.0, 7.0, 1.0).validate();
        assert!(matches!(r, Err(Error::ExponentOrdering { .. })));
        let r = Parameters::new(1, 1.0, 1.0, 3.0, 5.0, 1.0).validate();
        assert!(matches!(r, Err(Error::ExponentOrdering { .. })));
    }

    #[test]
    fn coefficient_and_dimension_errors() {
        let r = Parameters::new(1, 0.0, 1.0, 3.0, 7.0, 1.0).validate();
        assert!(matches!(r, Err(Error::NonPositiveCoefficient { name: "a", .. })));
        let r = Parameters::new(1, 1.0, 1.0, 3.0, 7.0, -2.0).validate();
        assert!(matches!(r, Err(Error::NonPositiveCoefficient { name: "omega", .. })));
        let r = Parameters::new(4, 1.0, 1.0, 1.5, 2.0, 1.0).validate();
        assert_eq!(r, Err(Error::BadDimension(4)));
        let r = Parameters::new(0, 1.0, 1.0, 1.5, 2.0, 1.0).validate();
        assert_eq!(r, Err(Error::BadDimension(0)));
    }

    #[test]
    fn stationary_allows_single_power() {
        Parameters::new(1, 0.0, 1.0, 3.0, 7.0, 1.0).validate_stationary().unwrap();
        Parameters::new(1, 1.0, 0.0, 3.0, 7.0, 1.0).validate_stationary().unwrap();
        Parameters::new(1, 1.0, 1.0, 5.0, 7.0, 1.0).validate_stationary().unwrap();
        assert!(Parameters::new(1, 0.0, 0.0, 3.0, 7.0, 1.0).validate_stationary().is_err());
        assert!(Parameters::new(3, 0.0, 1.0, 3.0, 6.0, 1.0).validate_stationary().is_err());
    }

    #[test]
    fn gaussian_quadrature_1d() {
        let h = 1e-3;
        let r: Vec<f64> = (0..=12_000).map(|i| i as f64 * h).collect();
        let w = radial_weights(&r, 1);
        let s: f64 = r.iter().zip(&w).map(|(r, w)| w * (-r * r).exp()).sum();
        assert!((s - std::f64::consts::PI.sqrt()).abs() < 1e-8, "{s}");
    }

    #[test]
    fn exponential_quadrature_3d() {
        let h = 1e-3;
        let r: Vec<f64> = (0..=60_000).map(|i| i as f64 * h).collect();
        let w = radial_weights(&r, 3);
        let s: f64 = r.iter().zip(&w).map(|(r, w)| w * (-r).exp()).sum();
        assert!((s - 8.0 * std::f64::consts::PI).abs() < 1e-6, "{s}");
    }

    #[test]
    fn zero_integrand() {
        let r: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        let s: f64 = radial_weights(&r, 2).iter().map(|w| w * 0.0).sum();
        assert_eq!(s, 0.0);
    }
}
