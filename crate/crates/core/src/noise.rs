//! Reproducible Gaussian noise.
//!
//! Every draw is a pure function of a [`NoiseKey`]: the key selects a
//! ChaCha8 key (seed, replica, stream), a ChaCha stream (particle) and a
//! word offset (step, component). Nothing is stored between draws, so any
//! parallel schedule sees the same numbers, and the kinetic and overdamped
//! systems can share increments exactly.
//!
//! Over one step of length `h` the kinetic system is driven by three
//! jointly Gaussian quantities built from the same Brownian increment:
//!
//! ```text
//! ΔB  = ∫₀ʰ dB_s
//! I_X = ∫₀ʰ (1 - e^{-γ²(h-s)}) dB_s
//! I_V = ∫₀ʰ e^{-γ²(h-s)} dB_s
//! ```
//!
//! Note `I_X + I_V = ΔB`, so their covariance has rank two.

use nalgebra::{Matrix3, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Below this `a = γ²h` the cancelling covariance entries are summed as
/// power series.
const SERIES_CUTOFF: f64 = 0.5;
const SERIES_TERMS: usize = 40;

/// Relative pivot size below which the factorization treats a direction as
/// degenerate.
const PIVOT_TOL: f64 = 1e-12;

/// Largest step index a key can address.
pub const MAX_STEP: u64 = (1 << 40) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseStream {
    Increment,
    InitialPosition,
    InitialVelocity,
}

impl NoiseStream {
    fn tag(self) -> u64 {
        match self {
            NoiseStream::Increment => 0,
            NoiseStream::InitialPosition => 1,
            NoiseStream::InitialVelocity => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NoiseKey {
    pub seed: u64,
    pub replica: u64,
    pub particle: u64,
    pub step: u64,
    pub component: u16,
    pub stream: NoiseStream,
}

impl NoiseKey {
    pub fn increment(seed: u64, replica: u64, particle: u64, step: u64, component: u16) -> Self {
        NoiseKey {
            seed,
            replica,
            particle,
            step,
            component,
            stream: NoiseStream::Increment,
        }
    }

    fn rng(&self) -> ChaCha8Rng {
        assert!(self.step <= MAX_STEP, "step index {} out of range", self.step);
        let mut seed = [0u8; 32];
        seed[..8].copy_from_slice(&self.seed.to_le_bytes());
        seed[8..16].copy_from_slice(&self.replica.to_le_bytes());
        seed[16..24].copy_from_slice(&self.stream.tag().to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(seed);
        rng.set_stream(self.particle);
        // 256 words per (step, component)
        rng.set_word_pos(((self.step as u128) << 24) | ((self.component as u128) << 8));
        rng
    }
}

/// `K` independent standard normals determined by `key`.
pub fn standard_normals<const K: usize>(key: &NoiseKey) -> [f64; K] {
    let mut rng = key.rng();
    std::array::from_fn(|_| rng.sample(StandardNormal))
}

/// One `N(0, h)` draw.
pub fn brownian_increment(key: &NoiseKey, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain(format!("increment variance must be positive, got {h}")));
    }
    let [z] = standard_normals::<1>(key);
    Ok(h.sqrt() * z)
}

/// Covariances of `(ΔB, I_X, I_V)` over a step of length `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuCovariance {
    pub gamma: f64,
    pub h: f64,
    /// `γ²h`.
    pub a: f64,
    pub var_db: f64,
    pub var_ix: f64,
    pub var_iv: f64,
    pub cov_db_ix: f64,
    pub cov_db_iv: f64,
    pub cov_ix_iv: f64,
}

/// Σ_{k≥1} c_k a^k / k!, with `coef(k)` giving c_k.
fn exp_series(a: f64, coef: impl Fn(i32) -> f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..=SERIES_TERMS as i32 {
        term *= a / k as f64;
        sum += coef(k) * term;
    }
    sum
}

fn alternating(k: i32) -> f64 {
    if k % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// `a - 2(1 - e^{-a}) + (1 - e^{-2a})/2 = γ² var_ix`.
fn ix_moment(a: f64) -> f64 {
    if a < SERIES_CUTOFF {
        // the leading `a` cancels the k = 1 term
        exp_series(a, |k| {
            if k == 1 {
                0.0
            } else {
                alternating(k) * (2f64.powi(k - 1) - 2.0)
            }
        })
    } else {
        let e1 = -(-a).exp_m1();
        let e2 = -(-2.0 * a).exp_m1();
        a - 2.0 * e1 + 0.5 * e2
    }
}

/// `(1 - e^{-a}) - (1 - e^{-2a})/2 = γ² cov_ix_iv`.
fn ix_iv_moment(a: f64) -> f64 {
    if a < SERIES_CUTOFF {
        exp_series(a, |k| alternating(k) * (1.0 - 2f64.powi(k - 1)))
    } else {
        let e1 = -(-a).exp_m1();
        let e2 = -(-2.0 * a).exp_m1();
        e1 - 0.5 * e2
    }
}

/// `a - (1 - e^{-a}) = γ² cov_db_ix`.
fn db_ix_moment(a: f64) -> f64 {
    if a < SERIES_CUTOFF {
        exp_series(a, |k| if k == 1 { 0.0 } else { -alternating(k) })
    } else {
        a + (-a).exp_m1()
    }
}

/// Closed-form covariance of `(ΔB, I_X, I_V)`.
pub fn ou_covariance(gamma: f64, h: f64) -> OuCovariance {
    let g2 = gamma * gamma;
    let a = g2 * h;
    let e1 = -(-a).exp_m1();
    let e2 = -(-2.0 * a).exp_m1();
    OuCovariance {
        gamma,
        h,
        a,
        var_db: h,
        var_ix: ix_moment(a) / g2,
        var_iv: e2 / (2.0 * g2),
        cov_db_ix: db_ix_moment(a) / g2,
        cov_db_iv: e1 / g2,
        cov_ix_iv: ix_iv_moment(a) / g2,
    }
}

impl OuCovariance {
    /// Covariance matrix in the order `(ΔB, I_X, I_V)`.
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        [
            [self.var_db, self.cov_db_ix, self.cov_db_iv],
            [self.cov_db_ix, self.var_ix, self.cov_ix_iv],
            [self.cov_db_iv, self.cov_ix_iv, self.var_iv],
        ]
    }

    pub fn trace(&self) -> f64 {
        self.var_db + self.var_ix + self.var_iv
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = Matrix3::from_fn(|i, j| self.matrix()[i][j]);
        SymmetricEigen::new(m).eigenvalues.min()
    }

    /// Lower-triangular factor for sampling, built in the order
    /// `(I_V, I_X, ΔB)` so the small velocity entries keep full relative
    /// precision when `γ²h` is large.
    pub fn factor(&self) -> Result<CoupledFactor> {
        let tol = 1e-12 * self.trace();
        let min_eig = self.min_eigenvalue();
        if min_eig < -tol {
            return Err(Error::Internal(format!(
                "OU covariance not PSD: eigenvalue {min_eig} at gamma={} h={}",
                self.gamma, self.h
            )));
        }
        let s = [
            [self.var_iv, self.cov_ix_iv, self.cov_db_iv],
            [self.cov_ix_iv, self.var_ix, self.cov_db_ix],
            [self.cov_db_iv, self.cov_db_ix, self.var_db],
        ];
        let mut l = [[0.0f64; 3]; 3];
        for j in 0..3 {
            let pivot = s[j][j] - (0..j).map(|k| l[j][k] * l[j][k]).sum::<f64>();
            if pivot <= PIVOT_TOL * s[j][j] {
                if pivot < -PIVOT_TOL * s[j][j].max(tol) {
                    return Err(Error::Internal(format!(
                        "negative pivot {pivot} in OU covariance factorization"
                    )));
                }
                continue;
            }
            let d = pivot.sqrt();
            l[j][j] = d;
            for i in j + 1..3 {
                let off = s[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
                l[i][j] = off / d;
            }
        }
        Ok(CoupledFactor { l })
    }
}

/// Factor of the `(I_V, I_X, ΔB)` covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledFactor {
    l: [[f64; 3]; 3],
}

impl CoupledFactor {
    /// Maps three standard normals to `(db, ix, iv)`.
    #[inline]
    pub fn apply(&self, z: [f64; 3]) -> (f64, f64, f64) {
        let l = &self.l;
        let iv = l[0][0] * z[0];
        let ix = l[1][0] * z[0] + l[1][1] * z[1];
        let db = l[2][0] * z[0] + l[2][1] * z[1] + l[2][2] * z[2];
        (db, ix, iv)
    }

    #[inline]
    pub fn sample(&self, key: &NoiseKey) -> (f64, f64, f64) {
        self.apply(standard_normals::<3>(key))
    }
}

/// One joint draw of `(ΔB, I_X, I_V)` for the step length `h`.
pub fn sample_coupled_increments(key: &NoiseKey, gamma: f64, h: f64) -> Result<(f64, f64, f64)> {
    if !(gamma > 0.0 && h > 0.0) {
        return Err(Error::domain(format!(
            "need gamma > 0 and h > 0, got gamma={gamma} h={h}"
        )));
    }
    Ok(ou_covariance(gamma, h).factor()?.sample(key))
}
