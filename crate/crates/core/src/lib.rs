//! Numerical laboratory for natural p-means on the first Heisenberg group.
//!
//! The crate provides:
//!
//! - [`geometry`]: the group algebra of ℍ ≅ ℝ³, the Korányi gauge and metric,
//!   anisotropic dilations, and lattice / Monte-Carlo quadrature over metric
//!   balls (with a plain Euclidean-ℝ³ mode for cross-validation);
//! - [`pmean`]: the natural p-mean of weighted samples — closed forms for
//!   p ∈ {1, 2, ∞} and monotone bisection on the integral characterization
//!   otherwise;
//! - [`calculus`]: horizontal differential operators (X₁, X₂, T, Δ_ℍ,
//!   Δ_{ℍ,∞}, the normalized p-Laplacian) and the mean-value expansion
//!   constant c_p;
//! - [`harmonics`]: explicit radial p-harmonic solutions on Korányi annuli,
//!   gauge-power perturbation functions, and the boundary-iteration
//!   constants ξ, θ, δ_k, k₀;
//! - [`dpp`]: lattice discretization of a domain and its outer ε-strip, the
//!   fixed-point solver for u = μ_p(u, ε), and comparison / sub-supersolution
//!   / boundary-gap checks;
//! - [`studies`]: mean-value expansion sweeps and convergence tables with
//!   log-log order fits;
//! - [`verify`]: the acceptance checks wired into both the test suite and the
//!   CLI `verify` subcommand.

pub mod calculus;
pub mod dpp;
pub mod fields;
pub mod geometry;
pub mod harmonics;
pub mod pmean;
pub mod studies;
pub mod verify;

pub use geometry::{BallQuadrature, Metric, Point, Scheme};
pub use pmean::{Exponent, SampleSet};
