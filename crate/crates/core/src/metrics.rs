//! Distances and moment statistics between ensembles.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrate::CoupledSnapshot;
use crate::model::Points;

/// Largest ensemble accepted by [`wp_assignment_exact`].
pub const MAX_ASSIGNMENT_N: usize = 512;

/// One row of the gap time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapRecord {
    pub t: f64,
    /// `(1/N) Σ |x^γ_i - x_i|²`.
    pub msd: f64,
    pub moment2_kinetic: f64,
    pub moment2_overdamped: f64,
}

impl GapRecord {
    pub fn from_snapshot(s: &CoupledSnapshot) -> Result<Self> {
        Ok(GapRecord {
            t: s.t,
            msd: coupled_msd(&s.kinetic.x, &s.overdamped.x)?,
            moment2_kinetic: second_moment(&s.kinetic.x),
            moment2_overdamped: second_moment(&s.overdamped.x),
        })
    }
}

/// Index-wise mean-square displacement `(1/N) Σ |a_i - b_i|²`.
pub fn coupled_msd(a: &Points, b: &Points) -> Result<f64> {
    if !a.same_shape(b) {
        return Err(Error::domain(format!(
            "shape mismatch: {}x{} vs {}x{}",
            a.len(),
            a.dim(),
            b.len(),
            b.dim()
        )));
    }
    if a.is_empty() {
        return Err(Error::domain("empty ensembles"));
    }
    let sum: f64 = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum / a.len() as f64)
}

/// `(1/N) Σ |x_i|²`; zero for an empty ensemble.
pub fn second_moment(x: &Points) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.as_slice().iter().map(|c| c * c).sum::<f64>() / x.len() as f64
}

fn sorted(v: &[f64]) -> Result<Vec<f64>> {
    if v.iter().any(|c| c.is_nan()) {
        return Err(Error::domain("NaN in samples"));
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

fn check_samples_1d(a: &[f64], b: &[f64]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("empty sample set"));
    }
    if a.len() != b.len() {
        return Err(Error::domain(format!(
            "sample counts differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// Empirical `W_2` between equal-size samples on the line (monotone coupling).
pub fn w2_empirical_1d(a: &[f64], b: &[f64]) -> Result<f64> {
    check_samples_1d(a, b)?;
    let (sa, sb) = (sorted(a)?, sorted(b)?);
    let cost: f64 = sa.iter().zip(&sb).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok((cost / a.len() as f64).sqrt())
}

/// Empirical `W_1` on the line (sorted-sample L¹ cost).
pub fn w1_empirical_1d(a: &[f64], b: &[f64]) -> Result<f64> {
    check_samples_1d(a, b)?;
    let (sa, sb) = (sorted(a)?, sorted(b)?);
    let cost: f64 = sa.iter().zip(&sb).map(|(x, y)| (x - y).abs()).sum();
    Ok(cost / a.len() as f64)
}

/// Exact empirical `W_p` (`p ∈ {1, 2}`) between equal-size point clouds by
/// optimal assignment on the cost matrix `|a_i - b_j|^p`.
pub fn wp_assignment_exact(a: &Points, b: &Points, p: u32) -> Result<f64> {
    if p != 1 && p != 2 {
        return Err(Error::domain(format!("only p = 1 or 2 supported, got {p}")));
    }
    if !a.same_shape(b) {
        return Err(Error::domain("point clouds must have the same size and dimension"));
    }
    let n = a.len();
    if n == 0 {
        return Err(Error::domain("empty point clouds"));
    }
    if n > MAX_ASSIGNMENT_N {
        return Err(Error::Capacity {
            what: "assignment size N",
            got: n,
            limit: MAX_ASSIGNMENT_N,
        });
    }
    let cost_of = |i: usize, j: usize| -> f64 {
        let sq: f64 = a
            .row(i)
            .iter()
            .zip(b.row(j))
            .map(|(x, y)| (x - y) * (x - y))
            .sum();
        if p == 2 {
            sq
        } else {
            sq.sqrt()
        }
    };
    let cost: Vec<f64> = (0..n * n).map(|k| cost_of(k / n, k % n)).collect();
    let assignment = hungarian(&cost, n);
    let total: f64 = assignment.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum();
    let mean = total / n as f64;
    Ok(if p == 2 { mean.sqrt() } else { mean })
}

/// Minimum-cost perfect assignment on a dense `n×n` cost matrix
/// (shortest augmenting paths with row/column potentials, `O(n³)`).
/// Returns `col[i]` for each row `i`.
pub(crate) fn hungarian(cost: &[f64], n: usize) -> Vec<usize> {
    let c = |i: usize, j: usize| cost[(i - 1) * n + (j - 1)];
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    // row matched to column j (1-based, 0 = free)
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = c(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col = vec![0; n];
    for j in 1..=n {
        col[row_of[j] - 1] = j - 1;
    }
    col
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulusPoint {
    pub delta: f64,
    pub msd: f64,
}

/// Mean-square increments of a trajectory against the bound `c(δ + √δ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusProbe {
    pub points: Vec<ModulusPoint>,
    /// Smallest `c` with `msd(δ) ≤ c(δ + √δ)` on every probed `δ`.
    pub c: f64,
}

impl ModulusProbe {
    pub fn bound(&self, delta: f64) -> f64 {
        self.c * (delta + delta.sqrt())
    }

    /// Largest relative excess `msd/bound - 1` over `points`.
    pub fn max_excess(&self, points: &[ModulusPoint]) -> f64 {
        points
            .iter()
            .filter(|p| p.delta > 0.0)
            .map(|p| p.msd / self.bound(p.delta) - 1.0)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// For each `δ`, averages `(1/N) Σ |x_i(t+δ) - x_i(t)|²` over all start
/// times `t` of a uniformly spaced trajectory.
pub fn modulus_probe(trajectory: &[(f64, &Points)], deltas: &[f64]) -> Result<ModulusProbe> {
    if trajectory.len() < 2 {
        return Err(Error::domain("trajectory needs at least two snapshots"));
    }
    let spacing = trajectory[1].0 - trajectory[0].0;
    if !(spacing > 0.0) {
        return Err(Error::domain("snapshot times must be increasing"));
    }
    for w in trajectory.windows(2) {
        if ((w[1].0 - w[0].0) - spacing).abs() > 1e-9 * spacing {
            return Err(Error::domain("snapshots must be uniformly spaced"));
        }
    }
    let span = trajectory[trajectory.len() - 1].0 - trajectory[0].0;
    let mut points = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        if !(delta >= 0.0) || delta > span * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "delta {delta} outside [0, {span}] covered by the trajectory"
            )));
        }
        if delta == 0.0 {
            points.push(ModulusPoint { delta, msd: 0.0 });
            continue;
        }
        let lag = (delta / spacing).round() as usize;
        if lag == 0 || (lag as f64 * spacing - delta).abs() > 1e-9 * delta.max(spacing) {
            return Err(Error::domain(format!(
                "delta {delta} is not a multiple of the snapshot spacing {spacing}"
            )));
        }
        let starts = trajectory.len() - lag;
        let mut sum = 0.0;
        for s in 0..starts {
            sum += coupled_msd(trajectory[s].1, trajectory[s + lag].1)?;
        }
        points.push(ModulusPoint {
            delta,
            msd: sum / starts as f64,
        });
    }
    let c = points
        .iter()
        .filter(|p| p.delta > 0.0)
        .map(|p| p.msd / (p.delta + p.delta.sqrt()))
        .fold(0.0, f64::max);
    Ok(ModulusProbe { points, c })
}
