use rayon::prelude::*;

use crate::error::{Error, Result};

use super::{ExternalPotential, InteractionKernel, Points};

/// Rows per tile in the pairwise pass.
const BLOCK: usize = 64;

/// Above this many cached entries the force pass evaluates every ordered
/// pair directly instead of caching the upper triangle.
const MAX_PAIR_ENTRIES: usize = 1 << 24;

/// Force on particle `i`:
/// `F_i = -∇Φ(x_i) - (1/N) Σ_{j≠i} ∇K(x_i - x_j)`.
///
/// The sum runs over `j` in ascending order; [`mean_field_force_all`] uses
/// the same order, so the two agree bit-for-bit.
pub fn mean_field_force(
    p: &ExternalPotential,
    k: &InteractionKernel,
    x: &Points,
    i: usize,
) -> Result<Vec<f64>> {
    let n = x.len();
    if i >= n {
        return Err(Error::domain(format!("particle index {i} out of range for N = {n}")));
    }
    let d = x.dim();
    let mut sum = vec![0.0; d];
    if !k.is_zero() {
        let mut r = vec![0.0; d];
        let mut g = vec![0.0; d];
        let xi = x.row(i);
        for j in 0..n {
            if j == i {
                continue;
            }
            for ((rc, a), b) in r.iter_mut().zip(xi).zip(x.row(j)) {
                *rc = a - b;
            }
            if !k.grad_into(&r, &mut g) {
                return Err(Error::Singularity { i, j, t: None });
            }
            for (s, gc) in sum.iter_mut().zip(&g) {
                *s += gc;
            }
        }
    }
    let mut out = vec![0.0; d];
    finish_row(p, x.row(i), &sum, n, &mut out);
    Ok(out)
}

/// Forces on all particles, one row per particle.
pub fn mean_field_force_all(
    p: &ExternalPotential,
    k: &InteractionKernel,
    x: &Points,
) -> Result<Points> {
    let mut out = Points::zeros(x.len(), x.dim());
    ForceWorkspace::new().compute(p, k, x, &mut out)?;
    Ok(out)
}

#[inline]
fn finish_row(p: &ExternalPotential, xi: &[f64], sum: &[f64], n: usize, out: &mut [f64]) {
    p.grad_into(xi, out);
    let nf = n as f64;
    for (o, s) in out.iter_mut().zip(sum) {
        *o = -*o - s / nf;
    }
}

/// Scratch space for repeated force evaluations on ensembles of one size.
///
/// Each unordered pair's radial factor `φ(|x_i - x_j|²)` is evaluated once
/// and cached; the per-row sums then rebuild `(x_i - x_j)·φ` tile by tile in
/// ascending `j` order. Work is split into fixed row blocks, so the result
/// does not depend on the number of worker threads.
#[derive(Debug, Default)]
pub struct ForceWorkspace {
    phis: Vec<f64>,
}

impl ForceWorkspace {
    pub fn new() -> Self {
        ForceWorkspace::default()
    }

    pub fn compute(
        &mut self,
        p: &ExternalPotential,
        k: &InteractionKernel,
        x: &Points,
        out: &mut Points,
    ) -> Result<()> {
        let n = x.len();
        let d = x.dim();
        if !x.same_shape(out) {
            return Err(Error::domain("force output shape does not match positions"));
        }
        if k.is_zero() || n < 2 {
            let zero = vec![0.0; d];
            out.as_mut_slice()
                .par_chunks_mut(BLOCK * d)
                .enumerate()
                .for_each(|(b, chunk)| {
                    for (r, row) in chunk.chunks_exact_mut(d).enumerate() {
                        finish_row(p, x.row(b * BLOCK + r), &zero, n, row);
                    }
                });
            return Ok(());
        }
        if n * n > MAX_PAIR_ENTRIES {
            return direct_pass(p, k, x, out);
        }
        match d {
            1 => self.by_kernel::<1>(p, k, x, out),
            2 => self.by_kernel::<2>(p, k, x, out),
            3 => self.by_kernel::<3>(p, k, x, out),
            _ => direct_pass(p, k, x, out),
        }
    }

    /// Monomorphizes the pair pass on the kernel's radial factor. Each
    /// closure performs the same operations as `radial_factor`.
    fn by_kernel<const D: usize>(
        &mut self,
        p: &ExternalPotential,
        k: &InteractionKernel,
        x: &Points,
        out: &mut Points,
    ) -> Result<()> {
        use super::SmoothProfile::{Gaussian, Linear};
        use InteractionKernel::*;
        let phis = &mut self.phis;
        match *k {
            Zero => unreachable!("zero kernel handled by the caller"),
            SmoothRegular(Gaussian) => cached_pass::<D, _>(|r2| (-r2).exp(), p, x, phis, out),
            SmoothRegular(Linear) => cached_pass::<D, _>(|_| 1.0, p, x, phis, out),
            RegularizedNewtonian { .. } | PowerLaw { .. } => {
                let k = *k;
                cached_pass::<D, _>(move |r2| k.radial_factor(r2, D), p, x, phis, out)
            }
        }
    }
}

#[inline(always)]
fn point<const D: usize>(xs: &[f64], i: usize) -> [f64; D] {
    std::array::from_fn(|c| xs[i * D + c])
}

#[inline(always)]
fn diff_sq<const D: usize>(a: &[f64; D], b: &[f64; D]) -> ([f64; D], f64) {
    let r: [f64; D] = std::array::from_fn(|c| a[c] - b[c]);
    let mut r2 = 0.0;
    for rc in &r {
        r2 += rc * rc;
    }
    (r, r2)
}

fn cached_pass<const D: usize, F>(
    phi: F,
    p: &ExternalPotential,
    x: &Points,
    phis: &mut Vec<f64>,
    out: &mut Points,
) -> Result<()>
where
    F: Fn(f64) -> f64 + Sync,
{
    let n = x.len();
    let xs = x.as_slice();
    phis.resize(n * n, 0.0);

    // phis[i*n + j] = φ(|x_i - x_j|²) for i < j
    let first_singular = phis
        .par_chunks_mut(BLOCK * n)
        .enumerate()
        .map(|(b, chunk)| {
            for (ri, row) in chunk.chunks_exact_mut(n).enumerate() {
                let i = b * BLOCK + ri;
                let xi = point::<D>(xs, i);
                for (j, slot) in row.iter_mut().enumerate().skip(i + 1) {
                    let (_, r2) = diff_sq(&xi, &point::<D>(xs, j));
                    *slot = phi(r2);
                }
                if let Some(off) = row[i + 1..].iter().position(|v| !v.is_finite()) {
                    return Some((i, i + 1 + off));
                }
            }
            None
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .next();
    if let Some((i, j)) = first_singular {
        return Err(Error::Singularity { i, j, t: None });
    }

    let phis = &phis[..];
    out.as_mut_slice()
        .par_chunks_mut(BLOCK * D)
        .enumerate()
        .for_each(|(b, chunk)| {
            let rows = chunk.len() / D;
            let i0 = b * BLOCK;
            let mut acc = vec![[0.0f64; D]; rows];
            for j0 in (0..n).step_by(BLOCK) {
                let j1 = (j0 + BLOCK).min(n);
                for (r, acc_row) in acc.iter_mut().enumerate() {
                    let i = i0 + r;
                    let xi = point::<D>(xs, i);
                    for j in j0..j1 {
                        let f = match j.cmp(&i) {
                            std::cmp::Ordering::Less => phis[j * n + i],
                            std::cmp::Ordering::Greater => phis[i * n + j],
                            std::cmp::Ordering::Equal => continue,
                        };
                        let (rv, _) = diff_sq(&xi, &point::<D>(xs, j));
                        for c in 0..D {
                            acc_row[c] += rv[c] * f;
                        }
                    }
                }
            }
            for (r, row) in chunk.chunks_exact_mut(D).enumerate() {
                finish_row(p, x.row(i0 + r), &acc[r], n, row);
            }
        });
    Ok(())
}

/// Evaluates every ordered pair; used when the pair cache would be too large.
fn direct_pass(
    p: &ExternalPotential,
    k: &InteractionKernel,
    x: &Points,
    out: &mut Points,
) -> Result<()> {
    let n = x.len();
    let d = x.dim();
    let first_singular = out
        .as_mut_slice()
        .par_chunks_mut(d)
        .enumerate()
        .map(|(i, row)| {
            let mut sum = vec![0.0; d];
            let mut r = vec![0.0; d];
            let mut g = vec![0.0; d];
            let xi = x.row(i);
            for j in 0..n {
                if j == i {
                    continue;
                }
                for ((rc, a), c) in r.iter_mut().zip(xi).zip(x.row(j)) {
                    *rc = a - c;
                }
                if !k.grad_into(&r, &mut g) {
                    return Some((i.min(j), i.max(j)));
                }
                for (s, gc) in sum.iter_mut().zip(&g) {
                    *s += gc;
                }
            }
            finish_row(p, xi, &sum, n, row);
            None
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .min();
    match first_singular {
        Some((i, j)) => Err(Error::Singularity { i, j, t: None }),
        None => Ok(()),
    }
}
