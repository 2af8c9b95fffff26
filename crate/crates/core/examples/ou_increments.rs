//! Joint Gaussian increments `(ΔB, I_X, I_V)` of the exponential integrator:
//! closed-form covariance, its factor, and an empirical check.
//!
//! ```bash
//! cargo run --release -p overdamp --example ou_increments
//! ```

use overdamp::noise::{ou_covariance, sample_coupled_increments, NoiseKey};

fn main() -> overdamp::Result<()> {
    let gamma = 4.0;
    for h in [1e-4, 1e-2, 0.25, 2.0] {
        let c = ou_covariance(gamma, h);
        println!("gamma = {gamma}, h = {h}, a = gamma^2 h = {}", c.a);
        for (name, row) in ["dB", "I_X", "I_V"].iter().zip(c.matrix()) {
            println!("  {name:>4} [{:>12.5e} {:>12.5e} {:>12.5e}]", row[0], row[1], row[2]);
        }
        println!("  smallest eigenvalue {:.2e} (trace {:.2e})", c.min_eigenvalue(), c.trace());

        let n = 200_000;
        let mut s = [[0.0f64; 3]; 3];
        let mut max_defect: f64 = 0.0;
        for i in 0..n {
            let (db, ix, iv) = sample_coupled_increments(&NoiseKey::increment(3, 0, i, 0, 0), gamma, h)?;
            max_defect = max_defect.max((db - ix - iv).abs());
            let v = [db, ix, iv];
            for p in 0..3 {
                for q in 0..3 {
                    s[p][q] += v[p] * v[q] / n as f64;
                }
            }
        }
        println!(
            "  empirical var: dB {:.5e}  I_X {:.5e}  I_V {:.5e};  max |dB - I_X - I_V| = {max_defect:.1e}",
            s[0][0], s[1][1], s[2][2]
        );
    }
    Ok(())
}
