//! Mean-square increments of the kinetic positions against `c(δ + √δ)`.
//!
//! ```bash
//! cargo run --release -p overdamp --example modulus_probe
//! ```

use overdamp::integrate::simulate_replica;
use overdamp::metrics::modulus_probe;
use overdamp::model::SmoothProfile;
use overdamp::{
    ExternalPotential, InitialLaw, Integrator, InteractionKernel, Points, SimConfig, SpaceDim,
};

fn main() -> overdamp::Result<()> {
    let steps = 256;
    let cfg = SimConfig {
        gamma: 8.0,
        n_particles: 500,
        dim: SpaceDim::new(1)?,
        t_final: 1.0,
        dt: 1.0 / steps as f64,
        seed: 8,
        replicas: 1,
        potential: ExternalPotential::harmonic(1.0)?,
        kernel: InteractionKernel::SmoothRegular(SmoothProfile::Gaussian),
        integrator: Integrator::ExponentialOU,
        initial: InitialLaw::standard(),
    };
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * cfg.dt).collect();
    let snaps = simulate_replica(&cfg, 0, &times)?;
    let traj: Vec<(f64, &Points)> = snaps.iter().map(|s| (s.t, &s.kinetic.x)).collect();
    let deltas: Vec<f64> = (2..=8).rev().map(|k| 2f64.powi(-k)).collect();
    let probe = modulus_probe(&traj, &deltas)?;
    println!("c = {:.4}", probe.c);
    println!("{:>10} {:>12} {:>12}", "delta", "msd", "bound");
    for p in &probe.points {
        println!("{:>10.6} {:>12.5e} {:>12.5e}", p.delta, p.msd, probe.bound(p.delta));
    }
    Ok(())
}
