//! Complex fields on the uniform periodic grid xⱼ = -L + j·2L/n.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    half_width: f64,
    values: Vec<Complex64>,
    /// h·Σ|uⱼ|², refreshed by every constructor.
    mass: f64,
}

impl GridFunction {
    pub fn new(half_width: f64, values: Vec<Complex64>) -> Result<Self> {
        let n = values.len();
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "grid size must be a power of two >= 8, got {n}"
            )));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidInput(format!("box half-width must be > 0, got {half_width}")));
        }
        let h = 2.0 * half_width / n as f64;
        let mass = h * values.iter().map(|z| z.norm_sqr()).sum::<f64>();
        Ok(GridFunction {
            half_width,
            values,
            mass,
        })
    }

    pub fn from_fn(half_width: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let h = 2.0 * half_width / n as f64;
        let values = (0..n).map(|j| f(-half_width + j as f64 * h)).collect();
        GridFunction::new(half_width, values)
    }

    pub fn from_real_fn(half_width: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        GridFunction::from_fn(half_width, n, |x| Complex64::new(f(x), 0.0))
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n() as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn conj(&self) -> GridFunction {
        GridFunction {
            half_width: self.half_width,
            values: self.values.iter().map(|z| z.conj()).collect(),
            mass: self.mass,
        }
    }

    /// Wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        wavenumbers(self.n(), self.half_width)
    }

    /// Unnormalised forward DFT.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut buf = self.values.clone();
        FftPlanner::new().plan_fft_forward(self.n()).process(&mut buf);
        buf
    }

    /// Inverse of [`GridFunction::spectrum`].
    pub fn from_spectrum(half_width: f64, mut spectrum: Vec<Complex64>) -> Result<Self> {
        let n = spectrum.len();
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidInput(format!("grid size must be a power of two, got {n}")));
        }
        FftPlanner::new().plan_fft_inverse(n).process(&mut spectrum);
        let scale = 1.0 / n as f64;
        spectrum.iter_mut().for_each(|z| *z *= scale);
        GridFunction::new(half_width, spectrum)
    }

    /// Mass fraction carried by samples with |x| ≥ `radius`.
    pub fn mass_outside(&self, radius: f64) -> f64 {
        let h = self.spacing();
        let outside: f64 = (0..self.n())
            .filter(|&j| self.x(j).abs() >= radius)
            .map(|j| h * self.values[j].norm_sqr())
            .sum();
        if self.mass > 0.0 {
            outside / self.mass
        } else {
            0.0
        }
    }

    /// Evaluate the band-limited (trigonometric) interpolant at arbitrary points.
    /// The Nyquist mode is split symmetrically so real data stay real.
    pub fn interpolate(&self, points: &[f64]) -> Vec<Complex64> {
        let n = self.n();
        let coef = self.spectrum();
        let dk = PI / self.half_width;
        let l = self.half_width;
        let half = n / 2;
        points
            .par_iter()
            .map(|&x| {
                let theta = dk * (x + l);
                let step = Complex64::from_polar(1.0, theta);
                let mut acc = coef[0];
                let mut rot = Complex64::new(1.0, 0.0);
                for m in 1..half {
                    // re-anchor periodically to keep the recurrence accurate
                    rot = if m % 64 == 0 {
                        Complex64::from_polar(1.0, theta * m as f64)
                    } else {
                        rot * step
                    };
                    acc += coef[m] * rot + coef[n - m] * rot.conj();
                }
                acc += coef[half] * (theta * half as f64).cos();
                acc / n as f64
            })
            .collect()
    }

    /// v^λ(x) = λ^{1/2} v(λx) on the same box by band-limited interpolation.
    pub fn rescaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidInput(format!("scaling factor must be > 0, got {lambda}")));
        }
        if lambda == 1.0 {
            return Ok(self.clone());
        }
        if lambda < 1.0 {
            let tail_fraction = self.mass_outside(lambda * self.half_width);
            if tail_fraction > 1e-8 {
                return Err(Error::ScalingOutOfBox { tail_fraction });
            }
        }
        let pts: Vec<f64> = (0..self.n()).map(|j| lambda * self.x(j)).collect();
        let amp = lambda.sqrt();
        let values = self.interpolate(&pts).into_iter().map(|z| z * amp).collect();
        GridFunction::new(self.half_width, values)
    }
}

pub fn wavenumbers(n: usize, half_width: f64) -> Vec<f64> {
    let dk = PI / half_width;
    (0..n)
        .map(|j| {
            let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
            m * dk
        })
        .collect()
}

/// Reusable forward/inverse transforms of one size.
#[derive(Clone)]
pub struct SpectralPlan {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl SpectralPlan {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        SpectralPlan {
            fwd,
            inv,
            scratch: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn forward(&mut self, buf: &mut [Complex64]) {
        self.fwd.process_with_scratch(buf, &mut self.scratch);
    }

    /// Inverse transform including the 1/n normalisation.
    pub fn inverse(&mut self, buf: &mut [Complex64]) {
        self.inv.process_with_scratch(buf, &mut self.scratch);
        let s = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|z| *z *= s);
    }
}

impl std::fmt::Debug for SpectralPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralPlan").field("n", &self.fwd.len()).finish()
    }
}
