//! Friction sweep on the regular-kernel configuration: harmonic confinement,
//! Gaussian-derivative interaction, d = 1.
//!
//! ```bash
//! cargo run --release -p overdamp --example rate_study
//! ```

use std::time::Instant;

use overdamp::model::SmoothProfile;
use overdamp::{
    run_rate_study, ExternalPotential, InitialLaw, Integrator, InteractionKernel, RateStudySpec,
    SimConfig, SpaceDim,
};

fn main() -> overdamp::Result<()> {
    let base = SimConfig {
        gamma: 1.0,
        n_particles: 2000,
        dim: SpaceDim::new(1)?,
        t_final: 1.0,
        dt: 0.01,
        seed: 2021,
        replicas: 8,
        potential: ExternalPotential::harmonic(1.0)?,
        kernel: InteractionKernel::SmoothRegular(SmoothProfile::Gaussian),
        integrator: Integrator::ExponentialOU,
        initial: InitialLaw::standard(),
    };
    let spec = RateStudySpec::new(base, vec![2.0, 4.0, 8.0, 16.0, 32.0]);

    let start = Instant::now();
    let result = run_rate_study(&spec)?;
    println!("{:>8} {:>14} {:>12} {:>12}", "gamma", "sup_t msd", "stderr", "gamma^2*msd");
    for p in &result.per_gamma {
        println!(
            "{:>8} {:>14.6e} {:>12.3e} {:>12.4}",
            p.gamma,
            p.sup_msd,
            p.mc_stderr,
            p.gamma * p.gamma * p.sup_msd
        );
    }
    println!(
        "slope = {:.4}  intercept = {:.4}  r^2 = {:.5}  ({:.1?})",
        result.slope,
        result.intercept,
        result.r_squared,
        start.elapsed()
    );
    Ok(())
}
