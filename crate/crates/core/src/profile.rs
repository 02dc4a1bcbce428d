//! Sampled radial functions φ(r) on a truncated interval [0, Rmax].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    /// Abscissae, `r[0] = 0`, strictly increasing.
    pub r: Vec<f64>,
    pub values: Vec<f64>,
    /// φ'(rᵢ) when known exactly (e.g. from the ODE); enables Hermite evaluation.
    pub slopes: Option<Vec<f64>>,
    pub dim: usize,
    /// Exponential decay rate fitted on the last tenth of the samples.
    pub tail_rate: f64,
}

impl RadialProfile {
    pub fn new(r: Vec<f64>, values: Vec<f64>, dim: usize) -> Result<Self> {
        Self::with_slopes(r, values, None, dim)
    }

    pub fn with_slopes(
        r: Vec<f64>,
        values: Vec<f64>,
        slopes: Option<Vec<f64>>,
        dim: usize,
    ) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::BadDimension(dim));
        }
        if r.len() < 8 || r.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "profile needs >= 8 samples with matching lengths (r: {}, values: {})",
                r.len(),
                values.len()
            )));
        }
        if r[0] != 0.0 || r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput(
                "profile abscissae must start at 0 and increase strictly".into(),
            ));
        }
        if let Some(s) = &slopes {
            if s.len() != r.len() {
                return Err(Error::InvalidInput("slope vector length mismatch".into()));
            }
        }
        let tail_rate = fit_tail_rate(&r, &values);
        Ok(RadialProfile {
            r,
            values,
            slopes,
            dim,
            tail_rate,
        })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn rmax(&self) -> f64 {
        *self.r.last().unwrap()
    }

    /// Grid spacing when the abscissae are uniform (relative deviation ≤ 1e-9).
    pub fn uniform_spacing(&self) -> Option<f64> {
        let h = self.r[1] - self.r[0];
        let uniform = self
            .r
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h);
        uniform.then_some(h)
    }

    /// Positive, strictly decreasing, with the terminal value below
    /// `tail_tolerance · φ(0)`.
    pub fn is_ground_state_shaped(&self, tail_tolerance: f64) -> bool {
        let v0 = self.values[0];
        v0 > 0.0
            && self.values.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0)
            && self.values.last().unwrap().abs() < tail_tolerance * v0
    }

    /// Evaluate φ at an arbitrary radius: cubic Hermite when slopes are
    /// available, linear otherwise; exponential extrapolation beyond Rmax.
    pub fn evaluate(&self, r: f64) -> f64 {
        let r = r.abs();
        let m = self.len();
        if r >= self.rmax() {
            let last = self.values[m - 1];
            return last * (-self.tail_rate * (r - self.rmax())).exp();
        }
        // locate the cell
        let i = match self.r.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => return self.values[i],
            Err(i) => i - 1,
        };
        let (r0, r1) = (self.r[i], self.r[i + 1]);
        let (f0, f1) = (self.values[i], self.values[i + 1]);
        let h = r1 - r0;
        let t = (r - r0) / h;
        match &self.slopes {
            Some(s) => {
                let (d0, d1) = (s[i] * h, s[i + 1] * h);
                let t2 = t * t;
                let t3 = t2 * t;
                (2.0 * t3 - 3.0 * t2 + 1.0) * f0
                    + (t3 - 2.0 * t2 + t) * d0
                    + (-2.0 * t3 + 3.0 * t2) * f1
                    + (t3 - t2) * d1
            }
            None => f0 + t * (f1 - f0),
        }
    }

    /// The L²-invariant rescaling v^λ(x) = λ^{N/2} v(λx), realised exactly by
    /// shrinking the abscissae by λ.
    pub fn rescaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidInput(format!("scaling factor must be > 0, got {lambda}")));
        }
        let amp = lambda.powf(0.5 * self.dim as f64);
        Ok(RadialProfile {
            r: self.r.iter().map(|r| r / lambda).collect(),
            values: self.values.iter().map(|v| amp * v).collect(),
            slopes: self
                .slopes
                .as_ref()
                .map(|s| s.iter().map(|d| amp * lambda * d).collect()),
            dim: self.dim,
            tail_rate: self.tail_rate * lambda,
        })
    }

    /// Pointwise map `(r, φ) -> ψ` of the values; slopes are dropped.
    pub fn map_values(&self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = self.r.iter().zip(&self.values).map(|(&r, &v)| f(r, v)).collect();
        RadialProfile::new(self.r.clone(), values, self.dim)
    }
}

/// Least-squares slope of -ln φ over the last tenth of the strictly positive samples.
fn fit_tail_rate(r: &[f64], values: &[f64]) -> f64 {
    let m = r.len();
    let start = m - (m / 10).max(2);
    let pts: Vec<(f64, f64)> = (start..m)
        .filter(|&i| values[i] > 0.0)
        .map(|i| (r[i], -values[i].ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(m: usize, h: f64) -> RadialProfile {
        let r: Vec<f64> = (0..m).map(|i| i as f64 * h).collect();
        let v = r.iter().map(|r| (-r * r / 2.0).exp()).collect();
        let s = r.iter().map(|r| -r * (-r * r / 2.0).exp()).collect();
        RadialProfile::with_slopes(r, v, Some(s), 1).unwrap()
    }

    #[test]
    fn rejects_bad_abscissae() {
        let r = vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8];
        assert!(RadialProfile::new(r, vec![1.0; 8], 1).is_err());
        let r = vec![0.0, 0.2, 0.2, 0.4, 0.5, 0.6, 0.7, 0.8];
        assert!(RadialProfile::new(r, vec![1.0; 8], 1).is_err());
    }

    #[test]
    fn tail_rate_of_exponential() {
        let r: Vec<f64> = (0..1000).map(|i| i as f64 * 0.01).collect();
        let v = r.iter().map(|r| 3.0 * (-2.5 * r).exp()).collect();
        let p = RadialProfile::new(r, v, 1).unwrap();
        assert!((p.tail_rate - 2.5).abs() < 1e-9);
    }

    #[test]
    fn hermite_evaluation_is_fourth_order() {
        let p = gaussian(801, 0.01);
        let x = 1.234_567;
        let err = (p.evaluate(x) - (-x * x / 2.0f64).exp()).abs();
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn rescale_identity() {
        let p = gaussian(100, 0.05);
        assert_eq!(p.rescaled(1.0).unwrap(), p);
        assert!(p.rescaled(0.0).is_err());
    }
}
