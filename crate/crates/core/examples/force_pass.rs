//! Mean-field force on every particle: the cached pair pass against the
//! per-particle sum, and the zero net interaction force.
//!
//! ```bash
//! cargo run --release -p overdamp --example force_pass
//! ```

use std::time::Instant;

use overdamp::model::{mean_field_force, ForceWorkspace, SmoothProfile};
use overdamp::{ExternalPotential, InteractionKernel, Points};

fn main() -> overdamp::Result<()> {
    let n = 2000;
    let x = Points::new((0..n).map(|i| (i as f64 * 0.618_033_988_7).fract() * 6.0 - 3.0).collect(), 1)?;
    let p = ExternalPotential::zero();
    let k = InteractionKernel::SmoothRegular(SmoothProfile::Gaussian);

    let mut ws = ForceWorkspace::new();
    let mut f = Points::zeros(n, 1);
    let start = Instant::now();
    ws.compute(&p, &k, &x, &mut f)?;
    let pass = start.elapsed();

    let start = Instant::now();
    let mut identical = true;
    for i in 0..n {
        identical &= mean_field_force(&p, &k, &x, i)? == f.row(i);
    }
    let oracle = start.elapsed();

    let net: f64 = f.as_slice().iter().sum();
    println!("N = {n}: pair pass {pass:?}, per-particle sums {oracle:?}");
    println!("bit-identical to the per-particle sums: {identical}");
    println!("net interaction force {net:.3e}");
    Ok(())
}
