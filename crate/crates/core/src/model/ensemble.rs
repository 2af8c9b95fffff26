use crate::error::{Error, Result};

/// `N` points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    data: Vec<f64>,
    dim: usize,
}

impl Points {
    pub fn new(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        if data.len() % dim != 0 {
            return Err(Error::domain(format!(
                "{} coordinates do not split into rows of length {dim}",
                data.len()
            )));
        }
        Ok(Points { data, dim })
    }

    pub fn zeros(n: usize, dim: usize) -> Self {
        assert!(dim > 0, "dimension must be at least 1");
        Points {
            data: vec![0.0; n * dim],
            dim,
        }
    }

    /// Builds a one-dimensional point set.
    pub fn from_scalars(values: &[f64]) -> Self {
        Points {
            data: values.to_vec(),
            dim: 1,
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(1);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::domain("rows have inconsistent lengths"));
        }
        Points::new(rows.concat(), dim)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub(crate) fn same_shape(&self, other: &Points) -> bool {
        self.dim == other.dim && self.data.len() == other.data.len()
    }
}

/// Positions and velocities of the kinetic particle system at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticEnsemble {
    pub x: Points,
    pub v: Points,
    pub t: f64,
}

impl KineticEnsemble {
    pub fn new(x: Points, v: Points, t: f64) -> Result<Self> {
        if !x.same_shape(&v) {
            return Err(Error::domain(format!(
                "positions are {}x{} but velocities are {}x{}",
                x.len(),
                x.dim(),
                v.len(),
                v.dim()
            )));
        }
        if !x.is_finite() || !v.is_finite() {
            return Err(Error::domain("kinetic ensemble has non-finite entries"));
        }
        if !(t >= 0.0) {
            return Err(Error::domain(format!("time must be non-negative, got {t}")));
        }
        Ok(KineticEnsemble { x, v, t })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }
}

/// Positions of the overdamped particle system at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverdampedEnsemble {
    pub x: Points,
    pub t: f64,
}

impl OverdampedEnsemble {
    pub fn new(x: Points, t: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::domain("overdamped ensemble has non-finite entries"));
        }
        if !(t >= 0.0) {
            return Err(Error::domain(format!("time must be non-negative, got {t}")));
        }
        Ok(OverdampedEnsemble { x, t })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }
}
