//! Numerical checks of the growth and regularity hypotheses on `Φ` and `K`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::potential::norm_sq;
use super::{ExternalPotential, InteractionKernel};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub potential: String,
    pub dim: usize,
    pub r: f64,
    pub probe_radius: f64,
    /// Number of grid points actually evaluated.
    pub n_probes: usize,
    /// `sup |∇Φ(x)|^r e^{-Φ(x)}`; `0^0` is taken as 1.
    pub sup_weighted_grad: f64,
    /// `sup |∇Φ(x)| / (1 + |x|)`.
    pub sup_growth_ratio: f64,
    /// `sup |∇Φ(a) - ∇Φ(b)| / |a - b|` over neighbouring grid points.
    pub sup_lipschitz_ratio: f64,
    pub min_phi: f64,
    pub c_phi: f64,
    pub pass: bool,
}

/// Probes `Φ` on a uniform tensor grid restricted to the ball of radius
/// `probe_radius` (about `n_probes` points in total).
pub fn validate_assumption_phi(
    p: &ExternalPotential,
    dim: usize,
    r: f64,
    probe_radius: f64,
    n_probes: usize,
) -> ValidationReport {
    let dim = dim.max(1);
    let per_axis = ((n_probes.max(1) as f64).powf(1.0 / dim as f64).round() as usize).max(2);
    let step = 2.0 * probe_radius / (per_axis - 1) as f64;
    let axis = |i: usize| -probe_radius + step * i as f64;
    let inside = |x: &[f64]| norm_sq(x).sqrt() <= probe_radius * (1.0 + 1e-12);

    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0; dim];
    let mut prev = vec![0.0; dim];
    let mut grad = vec![0.0; dim];
    let mut prev_grad = vec![0.0; dim];
    let mut prev_inside = false;

    let mut count = 0;
    let mut sup_weighted = 0.0f64;
    let mut sup_growth = 0.0f64;
    let mut sup_lip = 0.0f64;
    let mut min_phi = f64::INFINITY;

    loop {
        for (c, &i) in x.iter_mut().zip(&idx) {
            *c = axis(i);
        }
        let here = inside(&x);
        if here {
            count += 1;
            p.grad_into(&x, &mut grad);
            let phi = p.value(&x);
            let g = norm_sq(&grad).sqrt();
            min_phi = min_phi.min(phi);
            sup_weighted = sup_weighted.max(g.powf(r) * (-phi).exp());
            sup_growth = sup_growth.max(g / (1.0 + norm_sq(&x).sqrt()));
            // neighbour along the fastest axis
            if prev_inside && idx[0] > 0 {
                let dg: f64 = grad
                    .iter()
                    .zip(&prev_grad)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                let dx: f64 = x
                    .iter()
                    .zip(&prev)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                sup_lip = sup_lip.max(dg / dx);
            }
            prev.copy_from_slice(&x);
            prev_grad.copy_from_slice(&grad);
        }
        prev_inside = here;

        // odometer increment, axis 0 fastest
        let mut a = 0;
        loop {
            idx[a] += 1;
            if idx[a] < per_axis {
                break;
            }
            idx[a] = 0;
            a += 1;
            if a == dim {
                break;
            }
        }
        if a == dim {
            break;
        }
        if idx[0] == 0 {
            prev_inside = false;
        }
    }

    let c = p.c_phi;
    let pass = min_phi >= 0.0
        && sup_weighted.is_finite()
        && sup_growth <= c * (1.0 + 1e-12)
        && sup_lip <= c * (1.0 + 1e-9);
    ValidationReport {
        potential: p.to_string(),
        dim,
        r,
        probe_radius,
        n_probes: count,
        sup_weighted_grad: sup_weighted,
        sup_growth_ratio: sup_growth,
        sup_lipschitz_ratio: sup_lip,
        min_phi,
        c_phi: c,
        pass,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelReport {
    pub kernel: String,
    pub dim: usize,
    pub n_pairs: usize,
    pub grad_bound: f64,
    pub sup_grad_sampled: f64,
    /// `sup |∇K(a) - ∇K(b)| / |a - b|` over sampled pairs.
    pub lipschitz_ratio_sampled: f64,
    /// Largest `|∇K(r) + ∇K(-r)|` seen.
    pub antisymmetry_defect: f64,
    pub pass: bool,
}

/// Samples `n_pairs` random point pairs in `[-3, 3]^dim` and checks the
/// kernel's bound, Lipschitz ratio (for regular kernels) and antisymmetry.
pub fn validate_kernel(k: &InteractionKernel, dim: usize, n_pairs: usize, seed: u64) -> KernelReport {
    let dim = dim.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = vec![0.0; dim];
    let mut b = vec![0.0; dim];
    let mut neg = vec![0.0; dim];
    let mut ga = vec![0.0; dim];
    let mut gb = vec![0.0; dim];
    let mut gn = vec![0.0; dim];
    let mut sup_grad = 0.0f64;
    let mut sup_lip = 0.0f64;
    let mut defect = 0.0f64;
    let mut sampled = 0;
    for _ in 0..n_pairs {
        a.iter_mut().for_each(|c| *c = rng.random_range(-3.0..3.0));
        b.iter_mut().for_each(|c| *c = rng.random_range(-3.0..3.0));
        for (n, c) in neg.iter_mut().zip(&a) {
            *n = -c;
        }
        if !(k.grad_into(&a, &mut ga) && k.grad_into(&b, &mut gb) && k.grad_into(&neg, &mut gn)) {
            continue;
        }
        sampled += 1;
        sup_grad = sup_grad.max(norm_sq(&ga).sqrt()).max(norm_sq(&gb).sqrt());
        let dg: f64 = ga.iter().zip(&gb).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        let dx: f64 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        if dx > 0.0 {
            sup_lip = sup_lip.max(dg / dx);
        }
        defect = defect.max(ga.iter().zip(&gn).map(|(x, y)| (x + y).abs()).fold(0.0, f64::max));
    }
    let bound = k.grad_bound(dim);
    let mut pass = sup_grad <= k.sup_norm(dim) * (1.0 + 1e-12) && defect == 0.0;
    if k.lipschitz(dim).is_some() {
        pass &= sup_lip <= bound * (1.0 + 1e-12);
    }
    KernelReport {
        kernel: k.to_string(),
        dim,
        n_pairs: sampled,
        grad_bound: bound,
        sup_grad_sampled: sup_grad,
        lipschitz_ratio_sampled: sup_lip,
        antisymmetry_defect: defect,
        pass,
    }
}
