use std::fmt;

use crate::error::{Error, Result};

/// Extra confining potentials selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedPotential {
    /// `Φ(x) = sqrt(1 + |x|²) - 1`: bounded gradient, linear growth.
    Hyperbolic,
    /// `Φ(x) = Σ_k (1 - cos x_k)`: bounded and periodic.
    Cosine,
}

impl NamedPotential {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "hyperbolic" => Some(NamedPotential::Hyperbolic),
            "cosine" => Some(NamedPotential::Cosine),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedPotential::Hyperbolic => "hyperbolic",
            NamedPotential::Cosine => "cosine",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialKind {
    Zero,
    /// `Φ(x) = scale·|x|²/2`.
    Harmonic { scale: f64 },
    Custom(NamedPotential),
}

/// External potential `Φ ≥ 0` together with its claimed growth constant
/// `c_phi`: `|∇Φ(x)| ≤ c_phi (1 + |x|)` and `∇Φ` is `c_phi`-Lipschitz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExternalPotential {
    pub kind: PotentialKind,
    pub c_phi: f64,
}

impl ExternalPotential {
    pub fn zero() -> Self {
        ExternalPotential {
            kind: PotentialKind::Zero,
            c_phi: 0.0,
        }
    }

    pub fn harmonic(scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::config(format!(
                "harmonic scale must be positive and finite, got {scale}"
            )));
        }
        Ok(ExternalPotential {
            kind: PotentialKind::Harmonic { scale },
            c_phi: scale,
        })
    }

    pub fn named(name: &str) -> Result<Self> {
        let named = NamedPotential::from_name(name)
            .ok_or_else(|| Error::config(format!("unknown potential `{name}`")))?;
        Ok(ExternalPotential {
            kind: PotentialKind::Custom(named),
            c_phi: 1.0,
        })
    }

    /// Overrides the claimed growth constant.
    pub fn with_c_phi(mut self, c_phi: f64) -> Result<Self> {
        if !(c_phi >= 0.0 && c_phi.is_finite()) {
            return Err(Error::config(format!("c_phi must be >= 0, got {c_phi}")));
        }
        self.c_phi = c_phi;
        Ok(self)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::Harmonic { scale } => 0.5 * scale * norm_sq(x),
            PotentialKind::Custom(NamedPotential::Hyperbolic) => (1.0 + norm_sq(x)).sqrt() - 1.0,
            PotentialKind::Custom(NamedPotential::Cosine) => {
                x.iter().map(|&c| 1.0 - c.cos()).sum()
            }
        }
    }

    /// Writes `∇Φ(x)` into `out` without validating `x`.
    #[inline]
    pub fn grad_into(&self, x: &[f64], out: &mut [f64]) {
        match self.kind {
            PotentialKind::Zero => out.iter_mut().for_each(|o| *o = 0.0),
            PotentialKind::Harmonic { scale } => {
                for (o, &c) in out.iter_mut().zip(x) {
                    *o = scale * c;
                }
            }
            PotentialKind::Custom(NamedPotential::Hyperbolic) => {
                let s = (1.0 + norm_sq(x)).sqrt();
                for (o, &c) in out.iter_mut().zip(x) {
                    *o = c / s;
                }
            }
            PotentialKind::Custom(NamedPotential::Cosine) => {
                for (o, &c) in out.iter_mut().zip(x) {
                    *o = c.sin();
                }
            }
        }
    }
}

impl fmt::Display for ExternalPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PotentialKind::Zero => write!(f, "zero"),
            PotentialKind::Harmonic { scale } => write!(f, "harmonic:{scale}"),
            PotentialKind::Custom(n) => write!(f, "{}", n.name()),
        }
    }
}

/// `∇Φ(x)`.
pub fn grad_phi(p: &ExternalPotential, x: &[f64]) -> Result<Vec<f64>> {
    if x.iter().any(|c| !c.is_finite()) {
        return Err(Error::domain(format!("grad_phi at non-finite point {x:?}")));
    }
    let mut out = vec![0.0; x.len()];
    p.grad_into(x, &mut out);
    Ok(out)
}

#[inline]
pub(crate) fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum()
}
