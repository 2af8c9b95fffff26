//! Parse a config in the CLI's `key=value` format, apply overrides, render
//! it back, and run the study it describes.
//!
//! ```bash
//! cargo run --release -p overdamp --example config_file
//! ```

use overdamp::cli::{parse_config_with_overrides, render_config};
use overdamp::run_rate_study;

const CONFIG: &str = "\
# small regular-kernel study
gamma_grid=2,4,8,16
n=200
dim=1
t_final=1.0
dt=0.01
seed=7
replicas=4
potential=harmonic:1.0
kernel=smooth
integrator=exp
";

fn main() -> overdamp::Result<()> {
    let cfg = parse_config_with_overrides(CONFIG, &["record_count=32".to_string()])?;
    print!("{}", render_config(&cfg));
    let result = run_rate_study(&cfg.rate_study()?)?;
    print!("{}", result.summary_json());
    Ok(())
}
