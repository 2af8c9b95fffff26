use std::fmt;

use crate::error::{Error, Result};

use super::{ExternalPotential, InteractionKernel};

/// Largest `γ²h` accepted for Euler–Maruyama steps.
pub const EM_GUARD: f64 = 50.0;

/// Target `γ²h` for each Euler–Maruyama kinetic substep.
pub const EM_SUBSTEP_TARGET: f64 = 0.5;

/// Spatial dimension `d ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceDim(usize);

impl SpaceDim {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::config("dimension must be at least 1"));
        }
        Ok(SpaceDim(d))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    /// Exact OU velocity update with the force frozen over each step.
    ExponentialOU,
    EulerMaruyama,
}

impl Integrator {
    pub fn name(self) -> &'static str {
        match self {
            Integrator::ExponentialOU => "exp",
            Integrator::EulerMaruyama => "em",
        }
    }
}

impl fmt::Display for Integrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Product Gaussian initial law for `(X₀, V₀)`; each coordinate is
/// independent with the given mean and variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialLaw {
    pub x_mean: f64,
    pub x_var: f64,
    pub v_mean: f64,
    pub v_var: f64,
}

impl InitialLaw {
    pub fn standard() -> Self {
        InitialLaw {
            x_mean: 0.0,
            x_var: 1.0,
            v_mean: 0.0,
            v_var: 1.0,
        }
    }

    /// `X₀ = V₀ = 0`.
    pub fn at_rest() -> Self {
        InitialLaw {
            x_mean: 0.0,
            x_var: 0.0,
            v_mean: 0.0,
            v_var: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("x0 variance", self.x_var), ("v0 variance", self.v_var)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be >= 0, got {v}")));
            }
        }
        for (name, v) in [("x0 mean", self.x_mean), ("v0 mean", self.v_mean)] {
            if !v.is_finite() {
                return Err(Error::config(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }
}

impl Default for InitialLaw {
    fn default() -> Self {
        InitialLaw::standard()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Friction `γ ≥ 1`.
    pub gamma: f64,
    pub n_particles: usize,
    pub dim: SpaceDim,
    pub t_final: f64,
    pub dt: f64,
    pub seed: u64,
    pub replicas: usize,
    pub potential: ExternalPotential,
    pub kernel: InteractionKernel,
    pub integrator: Integrator,
    pub initial: InitialLaw,
}

impl SimConfig {
    /// Default step for the given integrator: `min(1e-2, 0.5/γ²)` for
    /// Euler–Maruyama, `1e-2` for the exponential integrator.
    pub fn default_dt(gamma: f64, integrator: Integrator) -> f64 {
        match integrator {
            Integrator::ExponentialOU => 1e-2,
            Integrator::EulerMaruyama => f64::min(1e-2, EM_SUBSTEP_TARGET / (gamma * gamma)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 1.0 && self.gamma.is_finite()) {
            return Err(Error::config(format!("gamma must be >= 1, got {}", self.gamma)));
        }
        if self.n_particles == 0 {
            return Err(Error::config("n must be at least 1"));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::config(format!("t_final must be > 0, got {}", self.t_final)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.dt > self.t_final {
            return Err(Error::config(format!(
                "dt = {} exceeds t_final = {}",
                self.dt, self.t_final
            )));
        }
        let steps = self.t_final / self.dt;
        if (steps - steps.round()).abs() > 1e-6 {
            return Err(Error::config(format!(
                "t_final / dt = {steps} is not an integer number of steps"
            )));
        }
        if self.replicas == 0 {
            return Err(Error::config("replicas must be at least 1"));
        }
        if self.integrator == Integrator::EulerMaruyama
            && self.dt * self.gamma * self.gamma > EM_GUARD
        {
            return Err(Error::config(format!(
                "Euler-Maruyama needs dt*gamma^2 <= {EM_GUARD}, got {}",
                self.dt * self.gamma * self.gamma
            )));
        }
        if let InteractionKernel::RegularizedNewtonian { sign, eps } = self.kernel {
            InteractionKernel::newtonian(sign, eps)?;
        }
        if let InteractionKernel::PowerLaw { alpha, eps } = self.kernel {
            InteractionKernel::power_law(alpha, eps)?;
        }
        self.initial.validate()
    }

    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    /// Kinetic substeps per macro step.
    pub fn substeps(&self) -> usize {
        match self.integrator {
            Integrator::ExponentialOU => 1,
            Integrator::EulerMaruyama => {
                let m = (self.gamma * self.gamma * self.dt / EM_SUBSTEP_TARGET).ceil();
                (m as usize).max(1)
            }
        }
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        SimConfig {
            gamma,
            ..self.clone()
        }
    }
}
