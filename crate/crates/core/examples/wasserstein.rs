//! Empirical Wasserstein distances: sorted samples on the line, exact
//! assignment in higher dimension, and the coupled gap as an upper bound.
//!
//! ```bash
//! cargo run --release -p overdamp --example wasserstein
//! ```

use overdamp::metrics::{coupled_msd, w1_empirical_1d, w2_empirical_1d, wp_assignment_exact};
use overdamp::model::SmoothProfile;
use overdamp::{
    simulate_coupled, ExternalPotential, InitialLaw, Integrator, InteractionKernel, Points,
    SimConfig, SpaceDim,
};

fn main() -> overdamp::Result<()> {
    let a = [0.0, 1.0, 4.0];
    let b = [3.0, -1.0, 1.5];
    println!("W2 = {:.6}, W1 = {:.6}", w2_empirical_1d(&a, &b)?, w1_empirical_1d(&a, &b)?);

    let p = Points::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]])?;
    let q = Points::from_rows(&[vec![1.1, 0.0], vec![0.0, 0.9], vec![0.1, 0.1]])?;
    println!(
        "2D assignment: W2 = {:.6}, W1 = {:.6}, index-wise sqrt(msd) = {:.6}",
        wp_assignment_exact(&p, &q, 2)?,
        wp_assignment_exact(&p, &q, 1)?,
        coupled_msd(&p, &q)?.sqrt()
    );

    // the synchronous coupling bounds the law distance from above
    for gamma in [2.0, 8.0, 32.0] {
        let cfg = SimConfig {
            gamma,
            n_particles: 400,
            dim: SpaceDim::new(2)?,
            t_final: 0.5,
            dt: 0.01,
            seed: 4,
            replicas: 1,
            potential: ExternalPotential::harmonic(1.0)?,
            kernel: InteractionKernel::SmoothRegular(SmoothProfile::Gaussian),
            integrator: Integrator::ExponentialOU,
            initial: InitialLaw::standard(),
        };
        let s = &simulate_coupled(&cfg, &[0.5])?[0];
        let w2 = wp_assignment_exact(&s.kinetic.x, &s.overdamped.x, 2)?;
        let msd = coupled_msd(&s.kinetic.x, &s.overdamped.x)?;
        println!("gamma = {gamma:>4}: W2^2 = {:.4e} <= msd = {:.4e}", w2 * w2, msd);
    }
    Ok(())
}
