//! Regularized Newtonian interaction in d = 2: the gap still decays like
//! γ⁻², while the unregularized kernel aborts on coincident particles.
//!
//! ```bash
//! cargo run --release -p overdamp --example singular_kernel
//! ```

use overdamp::{
    run_rate_study, CoupledState, Error, ExternalPotential, InitialLaw, Integrator,
    InteractionKernel, RateStudySpec, SimConfig, SpaceDim,
};

fn main() -> overdamp::Result<()> {
    let base = SimConfig {
        gamma: 1.0,
        n_particles: 300,
        dim: SpaceDim::new(2)?,
        t_final: 1.0,
        dt: 0.01,
        seed: 12,
        replicas: 4,
        potential: ExternalPotential::harmonic(1.0)?,
        kernel: InteractionKernel::newtonian(1.0, 0.3)?,
        integrator: Integrator::ExponentialOU,
        initial: InitialLaw::standard(),
    };
    for eps in [0.6, 0.3, 0.15] {
        let mut cfg = base.clone();
        cfg.kernel = InteractionKernel::newtonian(1.0, eps)?;
        let r = run_rate_study(&RateStudySpec::new(cfg, vec![2.0, 4.0, 8.0, 16.0]))?;
        println!("eps = {eps:<5} slope = {:.3}  r^2 = {:.4}", r.slope, r.r_squared);
    }

    let mut cfg = base;
    cfg.kernel = InteractionKernel::newtonian(1.0, 0.0)?;
    cfg.initial = InitialLaw { x_mean: 0.0, x_var: 0.0, v_mean: 0.0, v_var: 1.0 };
    let mut state = CoupledState::new(cfg, 0)?;
    match state.advance() {
        Err(e @ Error::Singularity { .. }) => println!("eps = 0 with coincident start: {e}"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
