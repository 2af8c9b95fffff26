use std::fmt;

use crate::error::{Error, Result};

/// Profiles of the bounded, Lipschitz interaction family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothProfile {
    /// `∇K(x) = x·exp(-|x|²)`.
    Gaussian,
    /// `∇K(x) = x` (quadratic attraction). Lipschitz but unbounded.
    Linear,
}

/// Interaction kernel, represented through its gradient `∇K`.
///
/// Every built-in kernel is radial, `∇K(r) = r·φ(|r|²)`, which makes
/// `∇K(-r) = -∇K(r)` hold bit-for-bit in floating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InteractionKernel {
    Zero,
    SmoothRegular(SmoothProfile),
    /// `∇K_ε(r) = sign·r/(|r|² + ε²)^{d/2}`. With `F = -∇K * ρ`, `sign = +1`
    /// is attractive and `sign = -1` repulsive.
    RegularizedNewtonian { sign: f64, eps: f64 },
    /// Gradient of `K_ε(r) = (|r|² + ε²)^{-α/2}`:
    /// `∇K_ε(r) = -α·r/(|r|² + ε²)^{(α+2)/2}`.
    PowerLaw { alpha: f64, eps: f64 },
}

impl InteractionKernel {
    pub fn newtonian(sign: f64, eps: f64) -> Result<Self> {
        if sign != 1.0 && sign != -1.0 {
            return Err(Error::config(format!("newtonian sign must be +1 or -1, got {sign}")));
        }
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::config(format!("regularization eps must be >= 0, got {eps}")));
        }
        Ok(InteractionKernel::RegularizedNewtonian { sign, eps })
    }

    pub fn power_law(alpha: f64, eps: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::config(format!("power-law alpha must be positive, got {alpha}")));
        }
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::config(format!("regularization eps must be >= 0, got {eps}")));
        }
        Ok(InteractionKernel::PowerLaw { alpha, eps })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, InteractionKernel::Zero)
    }

    /// Regularization length, 0 for kernels that have none.
    pub fn eps(&self) -> f64 {
        match *self {
            InteractionKernel::RegularizedNewtonian { eps, .. }
            | InteractionKernel::PowerLaw { eps, .. } => eps,
            _ => 0.0,
        }
    }

    /// Radial factor `φ(|r|²)` with `∇K(r) = r·φ(|r|²)`. Non-finite at a
    /// singularity.
    #[inline]
    pub(crate) fn radial_factor(&self, r2: f64, dim: usize) -> f64 {
        match *self {
            InteractionKernel::Zero => 0.0,
            InteractionKernel::SmoothRegular(SmoothProfile::Gaussian) => (-r2).exp(),
            InteractionKernel::SmoothRegular(SmoothProfile::Linear) => 1.0,
            InteractionKernel::RegularizedNewtonian { sign, eps } => {
                sign / half_power(r2 + eps * eps, dim)
            }
            InteractionKernel::PowerLaw { alpha, eps } => {
                -alpha / (r2 + eps * eps).powf(0.5 * alpha + 1.0)
            }
        }
    }

    /// Writes `∇K(r)` into `out`. Returns `false` at a singularity.
    #[inline]
    pub(crate) fn grad_into(&self, r: &[f64], out: &mut [f64]) -> bool {
        let mut r2 = 0.0;
        for &c in r {
            r2 += c * c;
        }
        let phi = self.radial_factor(r2, r.len());
        if !phi.is_finite() {
            return false;
        }
        for (o, &c) in out.iter_mut().zip(r) {
            *o = c * phi;
        }
        true
    }

    /// `sup |∇K|` in dimension `dim` (may be infinite).
    pub fn sup_norm(&self, dim: usize) -> f64 {
        let d = dim as f64;
        match *self {
            InteractionKernel::Zero => 0.0,
            InteractionKernel::SmoothRegular(SmoothProfile::Gaussian) => {
                (-0.5f64).exp() / std::f64::consts::SQRT_2
            }
            InteractionKernel::SmoothRegular(SmoothProfile::Linear) => f64::INFINITY,
            InteractionKernel::RegularizedNewtonian { eps, .. } => {
                if dim == 1 {
                    1.0
                } else if eps == 0.0 {
                    f64::INFINITY
                } else {
                    // maximiser of s/(s²+ε²)^{d/2}
                    let s = eps / (d - 1.0).sqrt();
                    s / half_power(s * s + eps * eps, dim)
                }
            }
            InteractionKernel::PowerLaw { alpha, eps } => {
                if eps == 0.0 {
                    f64::INFINITY
                } else {
                    let s = eps / (alpha + 1.0).sqrt();
                    alpha * s / (s * s + eps * eps).powf(0.5 * alpha + 1.0)
                }
            }
        }
    }

    /// Lipschitz constant of `∇K` where known in closed form.
    pub fn lipschitz(&self, _dim: usize) -> Option<f64> {
        match *self {
            InteractionKernel::Zero => Some(0.0),
            // Jacobian e^{-s²}(I - 2xxᵀ): spectral radius peaks at s = 0
            InteractionKernel::SmoothRegular(_) => Some(1.0),
            _ => None,
        }
    }

    /// `C_K = ‖∇K‖_∞ + ‖∇K‖_Lip` for regular kernels; for singular kernels
    /// the pointwise bound on the regularized gradient.
    pub fn grad_bound(&self, dim: usize) -> f64 {
        match self.lipschitz(dim) {
            Some(lip) => self.sup_norm(dim) + lip,
            None => self.sup_norm(dim),
        }
    }
}

/// `s^{d/2}`, with the common dimensions special-cased.
#[inline]
fn half_power(s: f64, dim: usize) -> f64 {
    match dim {
        1 => s.sqrt(),
        2 => s,
        3 => s * s.sqrt(),
        d if d % 2 == 0 => s.powi((d / 2) as i32),
        d => s.powf(0.5 * d as f64),
    }
}

impl fmt::Display for InteractionKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            InteractionKernel::Zero => write!(f, "zero"),
            InteractionKernel::SmoothRegular(SmoothProfile::Gaussian) => write!(f, "smooth"),
            InteractionKernel::SmoothRegular(SmoothProfile::Linear) => write!(f, "linear"),
            InteractionKernel::RegularizedNewtonian { sign, eps } => {
                let s = if sign > 0.0 { '+' } else { '-' };
                write!(f, "newtonian:{s}:{eps}")
            }
            InteractionKernel::PowerLaw { alpha, eps } => write!(f, "power:{alpha}:{eps}"),
        }
    }
}

/// `∇K(r)`.
pub fn grad_k(k: &InteractionKernel, r: &[f64]) -> Result<Vec<f64>> {
    if r.iter().any(|c| !c.is_finite()) {
        return Err(Error::domain(format!("grad_k at non-finite point {r:?}")));
    }
    let mut out = vec![0.0; r.len()];
    if !k.grad_into(r, &mut out) {
        return Err(Error::Singularity { i: 0, j: 0, t: None });
    }
    Ok(out)
}
