//! Time stepping for the kinetic and overdamped particle systems and the
//! driver that advances both under shared noise.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    ForceWorkspace, Integrator, KineticEnsemble, OverdampedEnsemble, Points, SimConfig, EM_GUARD,
};
use crate::noise::{self, CoupledFactor, NoiseKey, NoiseStream, OuCovariance};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Per-step coefficients of the exponential integrator for `a = γ²h`.
#[derive(Debug, Clone, Copy)]
struct ExpCoefficients {
    decay: f64,
    /// `(1 - e^{-a})/γ`, multiplies both `F` in the velocity update and `v` in the position update.
    relax: f64,
    /// `h - (1 - e^{-a})/γ²`.
    x_from_force: f64,
    noise_v: f64,
}

impl ExpCoefficients {
    fn new(cov: &OuCovariance) -> Self {
        let g = cov.gamma;
        ExpCoefficients {
            decay: (-cov.a).exp(),
            relax: -(-cov.a).exp_m1() / g,
            x_from_force: cov.cov_db_ix,
            noise_v: SQRT_2 * g,
        }
    }

    #[inline]
    fn apply(&self, x: &mut f64, v: &mut f64, f: f64, ix: f64, iv: f64) {
        let v_old = *v;
        *v = self.decay * v_old + self.relax * f + self.noise_v * iv;
        *x += self.relax * v_old + self.x_from_force * f + SQRT_2 * ix;
    }
}

#[inline]
fn em_kinetic(gamma: f64, h: f64, x: &mut f64, v: &mut f64, f: f64, db: f64) {
    let v_old = *v;
    *x += gamma * v_old * h;
    *v = v_old - gamma * gamma * v_old * h + gamma * f * h + SQRT_2 * gamma * db;
}

#[inline]
fn em_overdamped(h: f64, x: &mut f64, f: f64, db: f64) {
    *x += f * h + SQRT_2 * db;
}

fn with_time(err: Error, t: f64) -> Error {
    match err {
        Error::Singularity { i, j, .. } => Error::Singularity { i, j, t: Some(t) },
        other => other,
    }
}

fn check_noise_len(len: usize, state_len: usize) -> Result<()> {
    if len != state_len {
        return Err(Error::domain(format!(
            "expected {state_len} noise entries, got {len}"
        )));
    }
    Ok(())
}

fn forces(cfg: &SimConfig, x: &Points, t: f64) -> Result<Points> {
    let mut f = Points::zeros(x.len(), x.dim());
    ForceWorkspace::new()
        .compute(&cfg.potential, &cfg.kernel, x, &mut f)
        .map_err(|e| with_time(e, t))?;
    if !f.is_finite() {
        return Err(Error::domain(format!("non-finite force at t = {t}")));
    }
    Ok(f)
}

/// One exponential-integrator step of length `h` with the force frozen at
/// the start of the step. `noise[k] = (ix, iv)` for flat coordinate `k`.
pub fn step_underdamped_exp(
    state: &KineticEnsemble,
    cfg: &SimConfig,
    h: f64,
    noise: &[(f64, f64)],
) -> Result<KineticEnsemble> {
    check_noise_len(noise.len(), state.x.as_slice().len())?;
    let f = forces(cfg, &state.x, state.t)?;
    let coef = ExpCoefficients::new(&noise::ou_covariance(cfg.gamma, h));
    let mut next = state.clone();
    let (xs, vs) = (next.x.as_mut_slice(), next.v.as_mut_slice());
    for k in 0..xs.len() {
        let (ix, iv) = noise[k];
        coef.apply(&mut xs[k], &mut vs[k], f.as_slice()[k], ix, iv);
    }
    next.t = state.t + h;
    Ok(next)
}

/// One Euler–Maruyama step of the kinetic system; `db[k]` is the Brownian
/// increment for flat coordinate `k`.
pub fn step_underdamped_em(
    state: &KineticEnsemble,
    cfg: &SimConfig,
    h: f64,
    db: &[f64],
) -> Result<KineticEnsemble> {
    let a = cfg.gamma * cfg.gamma * h;
    if a > EM_GUARD {
        return Err(Error::config(format!(
            "Euler-Maruyama step has gamma^2 h = {a} > {EM_GUARD}"
        )));
    }
    check_noise_len(db.len(), state.x.as_slice().len())?;
    let f = forces(cfg, &state.x, state.t)?;
    let mut next = state.clone();
    let (xs, vs) = (next.x.as_mut_slice(), next.v.as_mut_slice());
    for k in 0..xs.len() {
        em_kinetic(cfg.gamma, h, &mut xs[k], &mut vs[k], f.as_slice()[k], db[k]);
    }
    next.t = state.t + h;
    Ok(next)
}

/// One Euler–Maruyama step of `dX = F(X, ρ) dt + √2 dB`.
pub fn step_overdamped_em(
    state: &OverdampedEnsemble,
    cfg: &SimConfig,
    h: f64,
    db: &[f64],
) -> Result<OverdampedEnsemble> {
    check_noise_len(db.len(), state.x.as_slice().len())?;
    let f = forces(cfg, &state.x, state.t)?;
    let mut next = state.clone();
    for (k, x) in next.x.as_mut_slice().iter_mut().enumerate() {
        em_overdamped(h, x, f.as_slice()[k], db[k]);
    }
    next.t = state.t + h;
    Ok(next)
}

/// Draws `(X₀, V₀)` from the configured product Gaussian. The overdamped
/// ensemble starts from the same positions.
pub fn initial_sample(
    cfg: &SimConfig,
    replica: u64,
) -> Result<(KineticEnsemble, OverdampedEnsemble)> {
    cfg.initial.validate()?;
    let n = cfg.n_particles;
    let d = cfg.dim.get();
    let law = cfg.initial;
    let draw = |stream: NoiseStream, mean: f64, var: f64| -> Points {
        let mut p = Points::zeros(n, d);
        let sd = var.sqrt();
        p.as_mut_slice()
            .par_chunks_mut(d)
            .enumerate()
            .for_each(|(i, row)| {
                for (k, c) in row.iter_mut().enumerate() {
                    *c = if var == 0.0 {
                        mean
                    } else {
                        let key = NoiseKey {
                            seed: cfg.seed,
                            replica,
                            particle: i as u64,
                            step: 0,
                            component: k as u16,
                            stream,
                        };
                        mean + sd * noise::standard_normals::<1>(&key)[0]
                    };
                }
            });
        p
    };
    let x = draw(NoiseStream::InitialPosition, law.x_mean, law.x_var);
    let v = draw(NoiseStream::InitialVelocity, law.v_mean, law.v_var);
    let kinetic = KineticEnsemble::new(x.clone(), v, 0.0)?;
    let overdamped = OverdampedEnsemble::new(x, 0.0)?;
    Ok((kinetic, overdamped))
}

/// Both ensembles at one recorded step.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledSnapshot {
    pub step: usize,
    pub t: f64,
    pub kinetic: KineticEnsemble,
    pub overdamped: OverdampedEnsemble,
}

enum Scheme {
    Exp {
        factor: CoupledFactor,
        coef: ExpCoefficients,
    },
    Em {
        substeps: usize,
        sub_h: f64,
    },
}

/// The kinetic and overdamped ensembles advanced in lockstep under
/// synchronous noise.
pub struct CoupledState {
    pub kinetic: KineticEnsemble,
    pub overdamped: OverdampedEnsemble,
    pub step: usize,
    pub config: SimConfig,
    replica: u64,
    scheme: Scheme,
    f_kin: Points,
    f_over: Points,
    ws_kin: ForceWorkspace,
    ws_over: ForceWorkspace,
    db: Vec<f64>,
    ix: Vec<f64>,
    iv: Vec<f64>,
}

impl CoupledState {
    pub fn new(config: SimConfig, replica: u64) -> Result<Self> {
        config.validate()?;
        let (kinetic, overdamped) = initial_sample(&config, replica)?;
        let scheme = match config.integrator {
            Integrator::ExponentialOU => {
                let cov = noise::ou_covariance(config.gamma, config.dt);
                Scheme::Exp {
                    factor: cov.factor()?,
                    coef: ExpCoefficients::new(&cov),
                }
            }
            Integrator::EulerMaruyama => {
                let substeps = config.substeps();
                Scheme::Em {
                    substeps,
                    sub_h: config.dt / substeps as f64,
                }
            }
        };
        let n = config.n_particles;
        let d = config.dim.get();
        Ok(CoupledState {
            kinetic,
            overdamped,
            step: 0,
            replica,
            scheme,
            f_kin: Points::zeros(n, d),
            f_over: Points::zeros(n, d),
            ws_kin: ForceWorkspace::new(),
            ws_over: ForceWorkspace::new(),
            db: vec![0.0; n * d],
            ix: vec![0.0; n * d],
            iv: vec![0.0; n * d],
            config,
        })
    }

    pub fn t(&self) -> f64 {
        self.step as f64 * self.config.dt
    }

    pub fn snapshot(&self) -> CoupledSnapshot {
        CoupledSnapshot {
            step: self.step,
            t: self.t(),
            kinetic: self.kinetic.clone(),
            overdamped: self.overdamped.clone(),
        }
    }

    /// Advances both systems by one macro step `dt`.
    pub fn advance(&mut self) -> Result<()> {
        let t = self.t();
        let d = self.config.dim.get();
        let (seed, replica, step) = (self.config.seed, self.replica, self.step as u64);
        let cfg = &self.config;
        match self.scheme {
            Scheme::Exp { factor, coef } => {
                self.db
                    .par_chunks_mut(d)
                    .zip(self.ix.par_chunks_mut(d))
                    .zip(self.iv.par_chunks_mut(d))
                    .enumerate()
                    .for_each(|(i, ((db, ix), iv))| {
                        for k in 0..d {
                            let key = NoiseKey::increment(seed, replica, i as u64, step, k as u16);
                            let (b, x, v) = factor.sample(&key);
                            db[k] = b;
                            ix[k] = x;
                            iv[k] = v;
                        }
                    });
                self.ws_kin
                    .compute(&cfg.potential, &cfg.kernel, &self.kinetic.x, &mut self.f_kin)
                    .map_err(|e| with_time(e, t))?;
                let xs = self.kinetic.x.as_mut_slice();
                let vs = self.kinetic.v.as_mut_slice();
                let f = self.f_kin.as_slice();
                for k in 0..xs.len() {
                    coef.apply(&mut xs[k], &mut vs[k], f[k], self.ix[k], self.iv[k]);
                }
            }
            Scheme::Em { substeps, sub_h } => {
                self.db.iter_mut().for_each(|b| *b = 0.0);
                let sd = sub_h.sqrt();
                for sub in 0..substeps {
                    let sub_step = step * substeps as u64 + sub as u64;
                    self.ix
                        .par_chunks_mut(d)
                        .enumerate()
                        .for_each(|(i, out)| {
                            for (k, o) in out.iter_mut().enumerate() {
                                let key =
                                    NoiseKey::increment(seed, replica, i as u64, sub_step, k as u16);
                                *o = sd * noise::standard_normals::<1>(&key)[0];
                            }
                        });
                    let t_sub = t + sub as f64 * sub_h;
                    self.ws_kin
                        .compute(&cfg.potential, &cfg.kernel, &self.kinetic.x, &mut self.f_kin)
                        .map_err(|e| with_time(e, t_sub))?;
                    let xs = self.kinetic.x.as_mut_slice();
                    let vs = self.kinetic.v.as_mut_slice();
                    let f = self.f_kin.as_slice();
                    for k in 0..xs.len() {
                        em_kinetic(cfg.gamma, sub_h, &mut xs[k], &mut vs[k], f[k], self.ix[k]);
                        self.db[k] += self.ix[k];
                    }
                }
            }
        }
        self.ws_over
            .compute(&cfg.potential, &cfg.kernel, &self.overdamped.x, &mut self.f_over)
            .map_err(|e| with_time(e, t))?;
        let f = self.f_over.as_slice();
        for (k, x) in self.overdamped.x.as_mut_slice().iter_mut().enumerate() {
            em_overdamped(cfg.dt, x, f[k], self.db[k]);
        }
        self.step += 1;
        let t_new = self.t();
        self.kinetic.t = t_new;
        self.overdamped.t = t_new;
        if !self.kinetic.x.is_finite() || !self.kinetic.v.is_finite() || !self.overdamped.x.is_finite() {
            return Err(Error::domain(format!("state became non-finite at t = {t_new}")));
        }
        Ok(())
    }

    /// Runs to `t_final`, calling `observe` at every step listed in
    /// `record_steps` (sorted, duplicates allowed).
    pub fn run_recorded(
        &mut self,
        record_steps: &[usize],
        mut observe: impl FnMut(&CoupledState),
    ) -> Result<()> {
        let n_steps = self.config.n_steps();
        let mut next = 0;
        loop {
            while next < record_steps.len() && record_steps[next] == self.step {
                observe(self);
                next += 1;
            }
            if self.step >= n_steps {
                break;
            }
            self.advance()?;
        }
        Ok(())
    }
}

/// Maps record times to step indices (nearest step).
pub fn record_steps(cfg: &SimConfig, record_times: &[f64]) -> Result<Vec<usize>> {
    let n_steps = cfg.n_steps();
    let mut prev = f64::NEG_INFINITY;
    let mut steps = Vec::with_capacity(record_times.len());
    for &t in record_times {
        if !(t >= 0.0 && t <= cfg.t_final * (1.0 + 1e-12)) {
            return Err(Error::domain(format!(
                "record time {t} outside [0, {}]",
                cfg.t_final
            )));
        }
        if t < prev {
            return Err(Error::domain("record times must be sorted"));
        }
        prev = t;
        steps.push(((t / cfg.dt).round() as usize).min(n_steps));
    }
    Ok(steps)
}

/// Runs replica 0 and returns snapshots at the requested times.
pub fn simulate_coupled(cfg: &SimConfig, record_times: &[f64]) -> Result<Vec<CoupledSnapshot>> {
    simulate_replica(cfg, 0, record_times)
}

pub fn simulate_replica(
    cfg: &SimConfig,
    replica: u64,
    record_times: &[f64],
) -> Result<Vec<CoupledSnapshot>> {
    let steps = record_steps(cfg, record_times)?;
    let mut state = CoupledState::new(cfg.clone(), replica)?;
    let mut out = Vec::with_capacity(steps.len());
    state.run_recorded(&steps, |s| out.push(s.snapshot()))?;
    Ok(out)
}
