//! Numerical laboratory for the eigenangle process of Haar-distributed
//! unitary matrices.
//!
//! The eigenangles of a uniform `U ∈ U(N)` form a projection determinantal
//! point process on the circle with kernel
//! `K_N(x, y) = sin(N(x − y)/2) / sin((x − y)/2)`. This crate uses that
//! structure two ways:
//!
//! * [`sampler`] draws exact samples of the N eigenangles with the
//!   sequential projection-DPP algorithm, no matrix diagonalization needed;
//! * [`counting`] computes the exact finite-N law of the counting function
//!   `N_θ` as a Poisson-binomial distribution whose parameters are the
//!   eigenvalues of the arc-restricted kernel.
//!
//! [`metrics`] measures how far a sample's empirical measure is from the
//! uniform one (Kolmogorov, circular Wasserstein-1, maximal spacing),
//! [`bounds`] evaluates the concentration inequalities used to control
//! those distances, and [`harness`] runs seeded Monte Carlo experiments over
//! a grid of matrix sizes.

pub mod bounds;
pub mod counting;
mod error;
pub mod harness;
pub mod kernel;
pub mod linalg;
pub mod metrics;
pub mod rng;
pub mod sampler;

pub use counting::{BernoulliSpectrum, JointCountLaw, PoissonBinomialLaw};
pub use error::{Error, Result};
pub use harness::{ExperimentConfig, Metric, RateTable};
pub use kernel::{Arc, ArcKernelMatrix, KernelConfig};
pub use metrics::DistanceReport;
pub use sampler::{EigenangleSample, SamplerStats};
