//! Numerical laboratory for the double-power nonlinear Schrödinger equation
//!
//! ```text
//! i ∂ₜu = -Δu - a|u|^{p-1}u - b|u|^{q-1}u,   x ∈ ℝᴺ
//! ```
//!
//! with ground states of `-Δφ + ωφ - a|φ|^{p-1}φ - b|φ|^{q-1}φ = 0`, the
//! dilation structure of the energy around them, and a split-step solver for
//! the one-dimensional flow.

pub mod error;
pub mod evolution;
pub mod functionals;
pub mod grid;
pub mod groundstate;
pub mod io;
pub mod ode;
pub mod params;
pub mod profile;
pub mod scaling;

pub use error::{Error, Result};
pub use evolution::{evolve, EvolutionConfig, EvolutionTrace, Verdict};
pub use functionals::{norms, rescale, BaseNorms, Field, FunctionalReport, Summation};
pub use grid::GridFunction;
pub use groundstate::{omega_sweep, solve_ground_state, GroundState, ShootingConfig};
pub use params::Parameters;
pub use profile::RadialProfile;
pub use scaling::{critical_points, CriticalPoints, ScalingCurve};
