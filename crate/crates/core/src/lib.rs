//! Coupled simulation of mean-field kinetic Langevin dynamics and its
//! overdamped (large-friction) limit.
//!
//! The kinetic particle system
//!
//! ```text
//! dX = γ V dt
//! dV = -γ² V dt + γ F(X, ρ) dt + √2 γ dB
//! ```
//!
//! and the first-order system `dX = F(X, ρ) dt + √2 dB` are advanced in
//! lockstep from the same initial positions and the same Brownian paths, so
//! the index-wise mean-square gap between them estimates
//! `sup_t E|X^γ_t - X_t|²`, which decays like `1/γ²`.
//!
//! Modules:
//!
//! * [`model`]: potentials, interaction kernels, ensembles and the mean-field force.
//! * [`noise`]: counter-based Gaussian increments and the OU-filtered joint increments.
//! * [`integrate`]: exponential and Euler–Maruyama steppers and the coupled driver.
//! * [`metrics`]: coupled MSD, empirical Wasserstein distances, modulus probe.
//! * [`study`]: friction sweeps and log-log rate fits.
//! * [`cli`]: config file format, output files and the `overdamp` command.

pub mod cli;
pub mod error;
pub mod integrate;
pub mod metrics;
pub mod model;
pub mod noise;
pub mod study;

pub use error::{Error, Result};
pub use integrate::{initial_sample, simulate_coupled, CoupledSnapshot, CoupledState};
pub use model::{
    ExternalPotential, InitialLaw, Integrator, InteractionKernel, KineticEnsemble,
    OverdampedEnsemble, Points, SimConfig, SpaceDim,
};
pub use study::{run_rate_study, RateFitResult, RateStudySpec};
