//! Numerical checks of the confinement and interaction hypotheses for the
//! built-in potentials and kernels.
//!
//! ```bash
//! cargo run --release -p overdamp --example validate_potential
//! ```

use overdamp::model::{validate_assumption_phi, validate_kernel, SmoothProfile};
use overdamp::{ExternalPotential, InteractionKernel};

fn main() -> overdamp::Result<()> {
    let potentials = [
        ExternalPotential::zero(),
        ExternalPotential::harmonic(1.0)?,
        ExternalPotential::named("hyperbolic")?,
        ExternalPotential::named("cosine")?,
        // understated Lipschitz constant: the check should fail
        ExternalPotential::harmonic(2.0)?.with_c_phi(1.0)?,
    ];
    println!("{:<12} {:>4} {:>12} {:>10} {:>10} {:>6}", "potential", "r", "sup", "growth", "lip", "pass");
    for p in &potentials {
        for r in [1.0, 2.0] {
            let rep = validate_assumption_phi(p, 2, r, 8.0, 20_000);
            println!(
                "{:<12} {:>4} {:>12.5} {:>10.4} {:>10.4} {:>6}",
                rep.potential, r, rep.sup_weighted_grad, rep.sup_growth_ratio, rep.sup_lipschitz_ratio, rep.pass
            );
        }
    }

    let kernels = [
        InteractionKernel::SmoothRegular(SmoothProfile::Gaussian),
        InteractionKernel::newtonian(1.0, 0.3)?,
        InteractionKernel::power_law(1.0, 0.5)?,
    ];
    for k in &kernels {
        let rep = validate_kernel(k, 2, 10_000, 1);
        println!(
            "kernel {:<18} sup {:.4} (bound {:.4}) antisymmetry defect {:e} pass {}",
            rep.kernel, rep.sup_grad_sampled, rep.grad_bound, rep.antisymmetry_defect, rep.pass
        );
    }
    Ok(())
}
