//! Kinetic and overdamped ensembles driven by the same noise from the same
//! initial positions; prints the gap and both second moments over time.
//!
//! ```bash
//! cargo run --release -p overdamp --example coupled_trajectory -- 8
//! ```

use overdamp::metrics::GapRecord;
use overdamp::model::SmoothProfile;
use overdamp::{
    simulate_coupled, ExternalPotential, InitialLaw, Integrator, InteractionKernel, SimConfig,
    SpaceDim,
};

fn main() -> overdamp::Result<()> {
    let gamma: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("gamma must be a number"))
        .unwrap_or(8.0);
    let cfg = SimConfig {
        gamma,
        n_particles: 500,
        dim: SpaceDim::new(1)?,
        t_final: 1.0,
        dt: 0.01,
        seed: 1,
        replicas: 1,
        potential: ExternalPotential::harmonic(1.0)?,
        kernel: InteractionKernel::SmoothRegular(SmoothProfile::Gaussian),
        integrator: Integrator::ExponentialOU,
        initial: InitialLaw::standard(),
    };
    let times: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    println!("gamma = {gamma}");
    println!("{:>5} {:>12} {:>12} {:>12}", "t", "msd", "m2 kinetic", "m2 overdamped");
    for snap in simulate_coupled(&cfg, &times)? {
        let r = GapRecord::from_snapshot(&snap)?;
        println!(
            "{:>5.2} {:>12.4e} {:>12.4} {:>12.4}",
            r.t, r.msd, r.moment2_kinetic, r.moment2_overdamped
        );
    }
    Ok(())
}
