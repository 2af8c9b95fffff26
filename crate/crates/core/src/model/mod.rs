//! Domain types and the mean-field force `F(x, ρ) = -∇Φ(x) - (∇K * ρ)(x)`
//! evaluated against empirical measures.

mod config;
mod ensemble;
mod force;
mod kernel;
mod potential;
mod validate;

pub use config::{InitialLaw, Integrator, SimConfig, SpaceDim, EM_GUARD, EM_SUBSTEP_TARGET};
pub use ensemble::{KineticEnsemble, OverdampedEnsemble, Points};
pub use force::{mean_field_force, mean_field_force_all, ForceWorkspace};
pub use kernel::{grad_k, InteractionKernel, SmoothProfile};
pub use potential::{grad_phi, ExternalPotential, NamedPotential, PotentialKind};
pub use validate::{
    validate_assumption_phi, validate_kernel, KernelReport, ValidationReport,
};
