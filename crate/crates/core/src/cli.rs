//! The `overdamp` command: config file format, subcommands and output files.
//!
//! Config files are flat `key=value` lines; `#` starts a comment.
//!
//! ```text
//! gamma=4
//! n=1000
//! dim=1
//! t_final=1.0
//! dt=0.01
//! seed=7
//! potential=harmonic:1.0
//! kernel=smooth
//! integrator=exp
//! ```
//!
//! | key            | value                                                       | default          |
//! |----------------|-------------------------------------------------------------|------------------|
//! | `gamma`        | friction, `>= 1` (required unless `gamma_grid` is given)    |                  |
//! | `gamma_grid`   | comma-separated, strictly increasing, at least 3 values     |                  |
//! | `n`            | particles per replica                                       | required         |
//! | `dim`          | spatial dimension                                           | required         |
//! | `t_final`      | horizon `T`                                                 | required         |
//! | `dt`           | macro step                                                  | integrator policy|
//! | `seed`         | u64                                                         | 0                |
//! | `replicas`     | independent replicas                                        | 1                |
//! | `record_count` | uniformly spaced record times in `(0, T]`                   | 64               |
//! | `potential`    | `zero`, `harmonic:S[:C]`, `hyperbolic[:C]`, `cosine[:C]`    | `zero`           |
//! | `kernel`       | `zero`, `smooth`, `linear`, `newtonian:±:EPS`, `power:A:EPS`| `zero`           |
//! | `integrator`   | `exp` or `em`                                               | `exp`            |
//! | `x0`, `v0`     | `gaussian:MEAN:VAR`                                         | `gaussian:0:1`   |
//! | `dump`         | `true` writes the replica-0 trajectory (simulate)           | `false`          |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::integrate::{record_steps, CoupledState};
use crate::metrics::{self, GapRecord};
use crate::model::{
    validate_assumption_phi, validate_kernel, ExternalPotential, InitialLaw, Integrator,
    InteractionKernel, Points, PotentialKind, SimConfig, SmoothProfile, SpaceDim,
};
use crate::study::{self, RateStudySpec, DEFAULT_RECORD_COUNT};

pub const THREADS_ENV: &str = "OVERDAMP_THREADS";

const KEYS: &[&str] = &[
    "gamma",
    "gamma_grid",
    "n",
    "dim",
    "t_final",
    "dt",
    "seed",
    "replicas",
    "record_count",
    "potential",
    "kernel",
    "integrator",
    "x0",
    "v0",
    "dump",
];

/// A parsed config file: one simulation setup, optionally with a γ grid
/// that turns it into a rate study.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sim: SimConfig,
    pub gamma_grid: Option<Vec<f64>>,
    pub record_count: usize,
    pub dump_trajectory: bool,
}

impl RunConfig {
    pub fn rate_study(&self) -> Result<RateStudySpec> {
        let grid = self
            .gamma_grid
            .clone()
            .ok_or_else(|| Error::config("rate-study needs `gamma_grid`"))?;
        let spec = RateStudySpec {
            base: self.sim.clone(),
            gamma_grid: grid,
            replicas: self.sim.replicas,
            record_count: self.record_count,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `record_count` uniformly spaced times in `[0, T]`, starting at 0.
    pub fn record_times(&self) -> Vec<f64> {
        let t = self.sim.t_final;
        (0..=self.record_count)
            .map(|k| t * k as f64 / self.record_count as f64)
            .collect()
    }
}

struct Entry {
    line: usize,
    value: String,
}

fn parse_err(line: usize, key: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

fn collect_entries(text: &str, overrides: &[String]) -> Result<BTreeMap<String, Entry>> {
    let mut map: BTreeMap<String, Entry> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(line, content, "expected key=value"))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(parse_err(line, key, "unknown key"));
        }
        if map.contains_key(key) {
            return Err(parse_err(line, key, "duplicate key"));
        }
        map.insert(
            key.to_string(),
            Entry {
                line,
                value: value.trim().to_string(),
            },
        );
    }
    // overrides are reported as line 0
    for o in overrides {
        let (key, value) = o
            .split_once('=')
            .ok_or_else(|| parse_err(0, o, "override must be key=value"))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(parse_err(0, key, "unknown key in override"));
        }
        map.insert(
            key.to_string(),
            Entry {
                line: 0,
                value: value.trim().to_string(),
            },
        );
    }
    Ok(map)
}

fn num<T: std::str::FromStr>(key: &str, e: &Entry) -> Result<T> {
    e.value
        .parse::<T>()
        .map_err(|_| parse_err(e.line, key, format!("cannot parse `{}`", e.value)))
}

fn float(key: &str, e: &Entry) -> Result<f64> {
    let v: f64 = num(key, e)?;
    if !v.is_finite() {
        return Err(parse_err(e.line, key, "must be finite"));
    }
    Ok(v)
}

fn parse_potential(e: &Entry) -> Result<ExternalPotential> {
    let key = "potential";
    let parts: Vec<&str> = e.value.split(':').collect();
    let bad = |m: String| parse_err(e.line, key, m);
    let sub = |i: usize| -> Result<f64> {
        let s = parts[i];
        s.parse::<f64>()
            .map_err(|_| parse_err(e.line, key, format!("cannot parse `{s}`")))
    };
    let (p, c_index) = match parts[0] {
        "zero" => (ExternalPotential::zero(), 1),
        "harmonic" => {
            if parts.len() < 2 {
                return Err(bad("harmonic needs a scale, e.g. harmonic:1.0".into()));
            }
            let p = ExternalPotential::harmonic(sub(1)?).map_err(|err| bad(err.to_string()))?;
            (p, 2)
        }
        name => (
            ExternalPotential::named(name).map_err(|err| bad(err.to_string()))?,
            1,
        ),
    };
    match parts.len() {
        n if n == c_index => Ok(p),
        n if n == c_index + 1 => p.with_c_phi(sub(c_index)?).map_err(|err| bad(err.to_string())),
        _ => Err(bad(format!("malformed value `{}`", e.value))),
    }
}

fn parse_kernel(e: &Entry) -> Result<InteractionKernel> {
    let key = "kernel";
    let parts: Vec<&str> = e.value.split(':').collect();
    let bad = |m: String| parse_err(e.line, key, m);
    let sub = |i: usize| -> Result<f64> {
        let s = parts[i];
        s.parse::<f64>()
            .map_err(|_| parse_err(e.line, key, format!("cannot parse `{s}`")))
    };
    match (parts[0], parts.len()) {
        ("zero", 1) => Ok(InteractionKernel::Zero),
        ("smooth", 1) => Ok(InteractionKernel::SmoothRegular(SmoothProfile::Gaussian)),
        ("linear", 1) => Ok(InteractionKernel::SmoothRegular(SmoothProfile::Linear)),
        ("newtonian", 3) => {
            let sign = match parts[1] {
                "+" | "+1" | "attractive" => 1.0,
                "-" | "-1" | "repulsive" => -1.0,
                s => return Err(bad(format!("newtonian sign must be + or -, got `{s}`"))),
            };
            InteractionKernel::newtonian(sign, sub(2)?).map_err(|err| bad(err.to_string()))
        }
        ("power", 3) => {
            InteractionKernel::power_law(sub(1)?, sub(2)?).map_err(|err| bad(err.to_string()))
        }
        _ => Err(bad(format!("malformed kernel `{}`", e.value))),
    }
}

fn parse_gaussian(key: &str, e: &Entry) -> Result<(f64, f64)> {
    let parts: Vec<&str> = e.value.split(':').collect();
    if parts.len() != 3 || parts[0] != "gaussian" {
        return Err(parse_err(e.line, key, "expected gaussian:MEAN:VAR"));
    }
    let f = |s: &str| {
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| parse_err(e.line, key, format!("cannot parse `{s}`")))
    };
    let (mean, var) = (f(parts[1])?, f(parts[2])?);
    if var < 0.0 {
        return Err(parse_err(e.line, key, "variance must be >= 0"));
    }
    Ok((mean, var))
}

/// Parses a config file (see the module docs for the format).
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with_overrides(text, &[])
}

/// Parses a config file, then applies `key=value` overrides.
pub fn parse_config_with_overrides(text: &str, overrides: &[String]) -> Result<RunConfig> {
    let map = collect_entries(text, overrides)?;
    let get = |k: &str| map.get(k);
    let required = |k: &str| {
        get(k).ok_or_else(|| parse_err(0, k, "required key missing"))
    };

    let gamma_grid = match get("gamma_grid") {
        Some(e) => {
            let mut grid = Vec::new();
            for s in e.value.split(',') {
                let g = s.trim().parse::<f64>().map_err(|_| {
                    parse_err(e.line, "gamma_grid", format!("cannot parse `{}`", s.trim()))
                })?;
                if !(g >= 1.0 && g.is_finite()) {
                    return Err(parse_err(e.line, "gamma_grid", format!("gamma must be >= 1, got {g}")));
                }
                grid.push(g);
            }
            if grid.len() < 3 {
                return Err(parse_err(e.line, "gamma_grid", "needs at least 3 values"));
            }
            if grid.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(parse_err(e.line, "gamma_grid", "must be strictly increasing"));
            }
            Some(grid)
        }
        None => None,
    };

    let gamma = match (get("gamma"), &gamma_grid) {
        (Some(e), _) => {
            let g = float("gamma", e)?;
            if g < 1.0 {
                return Err(parse_err(e.line, "gamma", format!("gamma must be >= 1, got {g}")));
            }
            g
        }
        (None, Some(grid)) => grid[0],
        (None, None) => return Err(parse_err(0, "gamma", "required key missing")),
    };

    let e = required("n")?;
    let n: usize = num("n", e)?;
    if n == 0 {
        return Err(parse_err(e.line, "n", "must be at least 1"));
    }
    let e = required("dim")?;
    let dim = SpaceDim::new(num("dim", e)?).map_err(|err| parse_err(e.line, "dim", err.to_string()))?;
    let e = required("t_final")?;
    let t_final = float("t_final", e)?;
    if t_final <= 0.0 {
        return Err(parse_err(e.line, "t_final", "must be > 0"));
    }
    let integrator = match get("integrator") {
        None => Integrator::ExponentialOU,
        Some(e) => match e.value.as_str() {
            "exp" => Integrator::ExponentialOU,
            "em" => Integrator::EulerMaruyama,
            v => return Err(parse_err(e.line, "integrator", format!("expected exp or em, got `{v}`"))),
        },
    };
    let dt = match get("dt") {
        Some(e) => {
            let dt = float("dt", e)?;
            if dt <= 0.0 {
                return Err(parse_err(e.line, "dt", "must be > 0"));
            }
            dt
        }
        None => {
            let g_max = gamma_grid
                .as_ref()
                .and_then(|g| g.last().copied())
                .unwrap_or(gamma)
                .max(gamma);
            SimConfig::default_dt(g_max, integrator)
        }
    };
    let seed = match get("seed") {
        Some(e) => num("seed", e)?,
        None => 0,
    };
    let replicas = match get("replicas") {
        Some(e) => {
            let r: usize = num("replicas", e)?;
            if r == 0 {
                return Err(parse_err(e.line, "replicas", "must be at least 1"));
            }
            r
        }
        None => 1,
    };
    let record_count = match get("record_count") {
        Some(e) => {
            let r: usize = num("record_count", e)?;
            if r == 0 {
                return Err(parse_err(e.line, "record_count", "must be at least 1"));
            }
            r
        }
        None => DEFAULT_RECORD_COUNT,
    };
    let potential = get("potential").map(parse_potential).transpose()?.unwrap_or(ExternalPotential::zero());
    let kernel = get("kernel").map(parse_kernel).transpose()?.unwrap_or(InteractionKernel::Zero);
    let mut initial = InitialLaw::standard();
    if let Some(e) = get("x0") {
        (initial.x_mean, initial.x_var) = parse_gaussian("x0", e)?;
    }
    if let Some(e) = get("v0") {
        (initial.v_mean, initial.v_var) = parse_gaussian("v0", e)?;
    }
    let dump_trajectory = match get("dump") {
        None => false,
        Some(e) => match e.value.as_str() {
            "true" => true,
            "false" => false,
            v => return Err(parse_err(e.line, "dump", format!("expected true or false, got `{v}`"))),
        },
    };

    let sim = SimConfig {
        gamma,
        n_particles: n,
        dim,
        t_final,
        dt,
        seed,
        replicas,
        potential,
        kernel,
        integrator,
        initial,
    };
    // cross-field checks are attributed to `dt`
    let dt_line = get("dt").map(|e| e.line).unwrap_or(0);
    let grid = gamma_grid.clone().unwrap_or_else(|| vec![gamma]);
    for g in std::iter::once(gamma).chain(grid) {
        sim.with_gamma(g)
            .validate()
            .map_err(|err| parse_err(dt_line, "dt", err.to_string()))?;
    }
    Ok(RunConfig {
        sim,
        gamma_grid,
        record_count,
        dump_trajectory,
    })
}

fn render_potential(p: &ExternalPotential) -> String {
    let (base, default_c) = match p.kind {
        PotentialKind::Zero => ("zero".to_string(), 0.0),
        PotentialKind::Harmonic { scale } => (format!("harmonic:{scale}"), scale),
        PotentialKind::Custom(n) => (n.name().to_string(), 1.0),
    };
    if p.c_phi == default_c {
        base
    } else {
        format!("{base}:{}", p.c_phi)
    }
}

/// Renders a config in canonical key order; `parse_config` inverts it exactly.
pub fn render_config(cfg: &RunConfig) -> String {
    let s = &cfg.sim;
    let mut out = String::new();
    let _ = writeln!(out, "gamma={}", s.gamma);
    if let Some(grid) = &cfg.gamma_grid {
        let g: Vec<String> = grid.iter().map(|g| g.to_string()).collect();
        let _ = writeln!(out, "gamma_grid={}", g.join(","));
    }
    let _ = writeln!(out, "n={}", s.n_particles);
    let _ = writeln!(out, "dim={}", s.dim.get());
    let _ = writeln!(out, "t_final={}", s.t_final);
    let _ = writeln!(out, "dt={}", s.dt);
    let _ = writeln!(out, "seed={}", s.seed);
    let _ = writeln!(out, "replicas={}", s.replicas);
    let _ = writeln!(out, "record_count={}", cfg.record_count);
    let _ = writeln!(out, "potential={}", render_potential(&s.potential));
    let _ = writeln!(out, "kernel={}", s.kernel);
    let _ = writeln!(out, "integrator={}", s.integrator);
    let _ = writeln!(out, "x0=gaussian:{}:{}", s.initial.x_mean, s.initial.x_var);
    let _ = writeln!(out, "v0=gaussian:{}:{}", s.initial.v_mean, s.initial.v_var);
    let _ = writeln!(out, "dump={}", cfg.dump_trajectory);
    out
}

/// Reads a sample file: one point per line, whitespace-separated coordinates.
pub fn parse_samples(text: &str) -> Result<Points> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let row = content
            .split_whitespace()
            .map(|s| s.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Error::domain(format!("line {}: bad coordinate", idx + 1)))?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::domain("sample file has no points"));
    }
    Points::from_rows(&rows)
}

/// Empirical `W_2` between two sample sets: sorted samples in 1D, exact
/// assignment otherwise.
pub fn w2_between(a: &Points, b: &Points) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::domain(format!(
            "sample dimensions differ: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    if a.dim() == 1 {
        metrics::w2_empirical_1d(a.as_slice(), b.as_slice())
    } else {
        metrics::wp_assignment_exact(a, b, 2)
    }
}

#[derive(Debug, Parser)]
#[command(name = "overdamp", version, about = "Kinetic vs overdamped mean-field Langevin simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Config file (key=value lines).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Override a config key; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the coupled systems and write the gap time series.
    Simulate,
    /// Sweep gamma and fit the decay exponent of the coupled gap.
    RateStudy,
    /// Probe the potential and kernel hypotheses numerically.
    Validate,
    /// Empirical W2 between two sample files.
    W2 { a: PathBuf, b: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::RateStudy => "rate-study",
            Command::Validate => "validate",
            Command::W2 { .. } => "w2",
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'a str,
    version: &'a str,
    subcommand: &'a str,
    config_sha256: String,
    seed: Option<u64>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn write_manifest(dir: &Path, cmd: &Command, hashed: &[u8], seed: Option<u64>) -> Result<()> {
    let m = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cmd.name(),
        config_sha256: sha256_hex(hashed),
        seed,
    };
    let mut json = serde_json::to_string_pretty(&m).expect("manifest serializes");
    json.push('\n');
    write_file(&dir.join("manifest.json"), json)
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::config("--config PATH is required"))?;
    let text = fs::read_to_string(path)
        .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
    let mut overrides = cli.overrides.clone();
    if let Some(seed) = cli.seed {
        overrides.push(format!("seed={seed}"));
    }
    parse_config_with_overrides(&text, &overrides)
}

fn out_dir(cli: &Cli) -> Result<PathBuf> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(dir)
}

fn run_simulate(cli: &Cli, cfg: &RunConfig) -> Result<()> {
    let dir = out_dir(cli)?;
    let sim = &cfg.sim;
    let times = cfg.record_times();
    let steps = record_steps(sim, &times)?;
    let per_replica: Vec<Result<(Vec<GapRecord>, Option<String>)>> = (0..sim.replicas as u64)
        .into_par_iter()
        .map(|replica| {
            let mut state = CoupledState::new(sim.clone(), replica)?;
            let mut records = Vec::with_capacity(steps.len());
            let mut dump = (replica == 0 && cfg.dump_trajectory)
                .then(|| String::from("t,particle,component,x_kinetic,v_kinetic,x_overdamped\n"));
            let mut failure = None;
            state.run_recorded(&steps, |s| {
                let snap = s.snapshot();
                match GapRecord::from_snapshot(&snap) {
                    Ok(r) => records.push(r),
                    Err(e) => failure = Some(e),
                }
                if let Some(out) = dump.as_mut() {
                    let d = snap.kinetic.dim();
                    for i in 0..snap.kinetic.len() {
                        for k in 0..d {
                            let _ = writeln!(
                                out,
                                "{},{i},{k},{},{},{}",
                                snap.t,
                                snap.kinetic.x.row(i)[k],
                                snap.kinetic.v.row(i)[k],
                                snap.overdamped.x.row(i)[k]
                            );
                        }
                    }
                }
            })
            .map_err(|e| Error::Simulation {
                gamma: sim.gamma,
                replica,
                source: Box::new(e),
            })?;
            match failure {
                Some(e) => Err(e),
                None => Ok((records, dump)),
            }
        })
        .collect();
    let per_replica = per_replica.into_iter().collect::<Result<Vec<_>>>()?;

    let m = per_replica.len() as f64;
    let mut csv = String::from("t,msd,moment2_kinetic,moment2_overdamped\n");
    let mut dat = String::from("# t msd\n");
    for (k, &t) in steps.iter().map(|&s| s as f64 * sim.dt).collect::<Vec<_>>().iter().enumerate() {
        let mean = |f: fn(&GapRecord) -> f64| per_replica.iter().map(|(r, _)| f(&r[k])).sum::<f64>() / m;
        let msd = mean(|r| r.msd);
        let _ = writeln!(
            csv,
            "{t},{msd},{},{}",
            mean(|r| r.moment2_kinetic),
            mean(|r| r.moment2_overdamped)
        );
        let _ = writeln!(dat, "{t} {msd}");
    }
    write_file(&dir.join("gap.csv"), csv)?;
    write_file(&dir.join("msd.dat"), dat)?;
    if let Some(dump) = per_replica.first().and_then(|(_, d)| d.as_ref()) {
        write_file(&dir.join("trajectory.csv"), dump)?;
    }
    let sup = per_replica
        .iter()
        .map(|(r, _)| r.iter().map(|g| g.msd).fold(0.0, f64::max))
        .sum::<f64>()
        / m;
    println!("gamma = {}  sup_t msd = {sup}", sim.gamma);
    write_manifest(&dir, &cli.command, render_config(cfg).as_bytes(), Some(sim.seed))
}

fn run_rate_study_cmd(cli: &Cli, cfg: &RunConfig) -> Result<()> {
    let spec = cfg.rate_study()?;
    let dir = out_dir(cli)?;
    let result = study::run_rate_study(&spec)?;
    study::emit_records(&result, &dir.join("rates.csv"))?;
    write_file(&dir.join("summary.json"), result.summary_json())?;
    let mut dat = String::from("# gamma sup_msd\n");
    for p in &result.per_gamma {
        let _ = writeln!(dat, "{} {}", p.gamma, p.sup_msd);
    }
    write_file(&dir.join("loglog.dat"), dat)?;
    println!(
        "slope = {}  intercept = {}  r^2 = {}",
        result.slope, result.intercept, result.r_squared
    );
    if !result.signal_resolved() {
        eprintln!("warning: gap at the largest gamma is within 10 standard errors of zero; consider more replicas");
    }
    write_manifest(&dir, &cli.command, render_config(cfg).as_bytes(), Some(cfg.sim.seed))
}

fn run_validate(cli: &Cli, cfg: &RunConfig) -> Result<()> {
    #[derive(Serialize)]
    struct Report {
        potential: Vec<crate::model::ValidationReport>,
        kernel: crate::model::KernelReport,
    }
    let dir = out_dir(cli)?;
    let dim = cfg.sim.dim.get();
    let potential: Vec<_> = [0.0, 1.0, 2.0, 4.0]
        .iter()
        .map(|&r| validate_assumption_phi(&cfg.sim.potential, dim, r, 10.0, 100_000))
        .collect();
    let kernel = validate_kernel(&cfg.sim.kernel, dim, 10_000, cfg.sim.seed);
    for rep in &potential {
        println!(
            "potential {} r={}: sup |grad|^r e^-phi = {}  growth = {}  lip = {}  pass = {}",
            rep.potential, rep.r, rep.sup_weighted_grad, rep.sup_growth_ratio, rep.sup_lipschitz_ratio, rep.pass
        );
    }
    println!(
        "kernel {}: sup |grad K| = {}  bound = {}  pass = {}",
        kernel.kernel, kernel.sup_grad_sampled, kernel.grad_bound, kernel.pass
    );
    let mut json = serde_json::to_string_pretty(&Report { potential, kernel }).expect("report serializes");
    json.push('\n');
    write_file(&dir.join("validate.json"), json)?;
    write_manifest(&dir, &cli.command, render_config(cfg).as_bytes(), Some(cfg.sim.seed))
}

fn run_w2(cli: &Cli, a: &Path, b: &Path) -> Result<()> {
    let read = |p: &Path| {
        fs::read_to_string(p).map_err(|e| Error::domain(format!("{}: {e}", p.display())))
    };
    let (ta, tb) = (read(a)?, read(b)?);
    let w = w2_between(&parse_samples(&ta)?, &parse_samples(&tb)?)?;
    println!("{w}");
    if cli.out.is_some() {
        let dir = out_dir(cli)?;
        write_file(&dir.join("w2.txt"), format!("{w}\n"))?;
        let hashed = [ta.as_bytes(), b"\0", tb.as_bytes()].concat();
        write_manifest(&dir, &cli.command, &hashed, None)?;
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::W2 { a, b } => run_w2(cli, a, b),
        cmd => {
            let cfg = load_config(cli)?;
            match cmd {
                Command::Simulate => run_simulate(cli, &cfg),
                Command::RateStudy => run_rate_study_cmd(cli, &cfg),
                Command::Validate => run_validate(cli, &cfg),
                Command::W2 { .. } => unreachable!(),
            }
        }
    }
}

/// Exit status: 0 on success, 1 on config or input errors, 2 on runtime
/// errors (singularities, capacity, I/O).
pub fn run(cli: &Cli) -> i32 {
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                1
            } else {
                2
            }
        }
    }
}

/// Installs a global thread pool sized by `OVERDAMP_THREADS`, if set.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::config(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Error::Internal(e.to_string()))?;
    }
    Ok(())
}
