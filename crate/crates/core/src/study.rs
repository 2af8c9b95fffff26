//! Friction sweeps: replicated coupled runs over a γ grid and a log-log fit
//! of the sup-in-time coupled MSD against γ.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrate::{record_steps, CoupledState};
use crate::metrics::{coupled_msd, second_moment};
use crate::model::SimConfig;

pub const DEFAULT_RECORD_COUNT: usize = 64;

/// Column header of the per-γ CSV.
pub const CSV_HEADER: &str = "gamma,sup_msd,mc_stderr,n,dim,T,dt,integrator,eps";

#[derive(Debug, Clone, PartialEq)]
pub struct RateStudySpec {
    /// Template configuration; its `gamma` is replaced by each grid value.
    pub base: SimConfig,
    pub gamma_grid: Vec<f64>,
    pub replicas: usize,
    pub record_count: usize,
}

impl RateStudySpec {
    pub fn new(base: SimConfig, gamma_grid: Vec<f64>) -> Self {
        let replicas = base.replicas;
        RateStudySpec {
            base,
            gamma_grid,
            replicas,
            record_count: DEFAULT_RECORD_COUNT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma_grid.len() < 3 {
            return Err(Error::config(format!(
                "gamma_grid needs at least 3 values, got {}",
                self.gamma_grid.len()
            )));
        }
        if self.gamma_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::config("gamma_grid must be strictly increasing"));
        }
        if self.replicas == 0 {
            return Err(Error::config("replicas must be at least 1"));
        }
        if self.record_count == 0 {
            return Err(Error::config("record_count must be at least 1"));
        }
        for &g in &self.gamma_grid {
            self.base.with_gamma(g).validate()?;
        }
        Ok(())
    }

    /// `record_count` uniformly spaced times in `(0, T]`.
    pub fn record_times(&self) -> Vec<f64> {
        let t = self.base.t_final;
        (1..=self.record_count)
            .map(|k| t * k as f64 / self.record_count as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaPoint {
    pub gamma: f64,
    /// Replica mean of `max_t (1/N) Σ |x^γ_i(t) - x_i(t)|²`.
    pub sup_msd: f64,
    pub mc_stderr: f64,
    /// Replica mean of `max_t (1/N) Σ |x^γ_i(t)|²`.
    pub sup_moment2_kinetic: f64,
}

/// Run parameters echoed into the CSV rows.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyContext {
    pub n: usize,
    pub dim: usize,
    pub t_final: f64,
    pub dt: f64,
    pub integrator: String,
    pub eps: f64,
}

impl StudyContext {
    fn from_config(cfg: &SimConfig) -> Self {
        StudyContext {
            n: cfg.n_particles,
            dim: cfg.dim.get(),
            t_final: cfg.t_final,
            dt: cfg.dt,
            integrator: cfg.integrator.name().to_string(),
            eps: cfg.kernel.eps(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateFitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub per_gamma: Vec<GammaPoint>,
    pub context: StudyContext,
}

impl RateFitResult {
    /// Whether the largest-γ gap is at least ten standard errors above zero.
    /// When it is not, the replica count is too small to resolve the rate.
    pub fn signal_resolved(&self) -> bool {
        self.per_gamma
            .last()
            .is_some_and(|p| p.sup_msd >= 10.0 * p.mc_stderr)
    }

    pub fn summary_json(&self) -> String {
        #[derive(Serialize)]
        struct Summary<'a> {
            slope: f64,
            intercept: f64,
            r_squared: f64,
            per_gamma: &'a [GammaPoint],
        }
        let s = Summary {
            slope: self.slope,
            intercept: self.intercept,
            r_squared: self.r_squared,
            per_gamma: &self.per_gamma,
        };
        let mut out = serde_json::to_string_pretty(&s).expect("summary serializes");
        out.push('\n');
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `log y` on `log x`.
///
/// Constant `y` gives slope 0 and `r² = 1`.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<LogLogFit> {
    if points.len() < 2 {
        return Err(Error::domain("log-log fit needs at least two points"));
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::domain(format!(
            "log-log fit needs positive coordinates, got ({x}, {y})"
        )));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    if ly.iter().all(|&y| y == ly[0]) {
        return Ok(LogLogFit {
            slope: 0.0,
            intercept: ly[0],
            r_squared: 1.0,
        });
    }
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("log-log fit needs at least two distinct x values"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ly.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    Ok(LogLogFit {
        slope,
        intercept,
        r_squared: 1.0 - ss_res / ss_tot,
    })
}

/// `(max_t msd, max_t kinetic second moment)` for one replica.
fn replica_sup(cfg: &SimConfig, replica: u64, steps: &[usize]) -> Result<(f64, f64)> {
    let mut state = CoupledState::new(cfg.clone(), replica)?;
    let mut sup_msd = 0.0f64;
    let mut sup_m2 = 0.0f64;
    let mut failure = None;
    state.run_recorded(steps, |s| match coupled_msd(&s.kinetic.x, &s.overdamped.x) {
        Ok(m) => {
            sup_msd = sup_msd.max(m);
            sup_m2 = sup_m2.max(second_moment(&s.kinetic.x));
        }
        Err(e) => failure = Some(e),
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok((sup_msd, sup_m2)),
    }
}

/// Runs every (γ, replica) pair and fits the decay exponent of
/// `e(γ) = mean_replicas max_t coupled_msd`.
pub fn run_rate_study(spec: &RateStudySpec) -> Result<RateFitResult> {
    spec.validate()?;
    let steps = record_steps(&spec.base, &spec.record_times())?;
    let m = spec.replicas;
    let jobs: Vec<(f64, u64)> = spec
        .gamma_grid
        .iter()
        .flat_map(|&g| (0..m as u64).map(move |r| (g, r)))
        .collect();
    let results: Vec<Result<(f64, f64)>> = jobs
        .par_iter()
        .map(|&(gamma, replica)| {
            replica_sup(&spec.base.with_gamma(gamma), replica, &steps).map_err(|e| {
                Error::Simulation {
                    gamma,
                    replica,
                    source: Box::new(e),
                }
            })
        })
        .collect();
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;

    let per_gamma: Vec<GammaPoint> = spec
        .gamma_grid
        .iter()
        .zip(results.chunks(m))
        .map(|(&gamma, runs)| {
            let mf = m as f64;
            let mean = runs.iter().map(|r| r.0).sum::<f64>() / mf;
            let stderr = if m > 1 {
                let var = runs.iter().map(|r| (r.0 - mean) * (r.0 - mean)).sum::<f64>() / (mf - 1.0);
                (var / mf).sqrt()
            } else {
                0.0
            };
            GammaPoint {
                gamma,
                sup_msd: mean,
                mc_stderr: stderr,
                sup_moment2_kinetic: runs.iter().map(|r| r.1).sum::<f64>() / mf,
            }
        })
        .collect();

    let fit = fit_loglog_slope(
        &per_gamma
            .iter()
            .map(|p| (p.gamma, p.sup_msd))
            .collect::<Vec<_>>(),
    )?;
    let result = RateFitResult {
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        per_gamma,
        context: StudyContext::from_config(&spec.base),
    };
    if !result.signal_resolved() {
        log::warn!(
            "gap at the largest gamma is below 10 standard errors; increase replicas (currently {m})"
        );
    }
    Ok(result)
}

/// Writes the per-γ CSV rows.
pub fn write_csv<W: Write>(result: &RateFitResult, mut w: W) -> std::io::Result<()> {
    let c = &result.context;
    writeln!(w, "{CSV_HEADER}")?;
    for p in &result.per_gamma {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            p.gamma, p.sup_msd, p.mc_stderr, c.n, c.dim, c.t_final, c.dt, c.integrator, c.eps
        )?;
    }
    Ok(())
}

/// Writes the per-γ CSV to `path`.
pub fn emit_records(result: &RateFitResult, path: &Path) -> Result<()> {
    if result.per_gamma.is_empty() {
        return Err(Error::domain("rate study result has no gamma rows"));
    }
    let mut buf = Vec::new();
    write_csv(result, &mut buf).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}
