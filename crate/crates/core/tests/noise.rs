use overdamp::noise::{
    brownian_increment, ou_covariance, sample_coupled_increments, standard_normals, NoiseKey,
    NoiseStream,
};
use proptest::prelude::*;

/// Composite Simpson rule on `[0, h]`.
fn simpson(f: impl Fn(f64) -> f64, h: f64, m: usize) -> f64 {
    let dx = h / m as f64;
    let mut s = f(0.0) + f(h);
    for k in 1..m {
        s += f(k as f64 * dx) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * dx / 3.0
}

/// Itô isometry: with `I_V = ∫ e^{-γ²(h-s)} dB_s` and `I_X = ΔB - I_V`,
/// every covariance is a deterministic integral over `[0, h]`.
fn quadrature_covariance(gamma: f64, h: f64) -> [f64; 6] {
    let g2 = gamma * gamma;
    let kv = |s: f64| (-g2 * (h - s)).exp();
    let kx = |s: f64| 1.0 - kv(s);
    let m = 20_000;
    [
        h,
        simpson(|s| kx(s) * kx(s), h, m),
        simpson(|s| kv(s) * kv(s), h, m),
        simpson(kx, h, m),
        simpson(kv, h, m),
        simpson(|s| kx(s) * kv(s), h, m),
    ]
}

#[test]
fn covariance_matches_ito_isometry() {
    for &(gamma, h) in &[(1.0, 0.1), (1.0, 1.0), (4.0, 0.01), (3.0, 0.3), (10.0, 0.1), (2.0, 1e-3)] {
        let c = ou_covariance(gamma, h);
        let got = [c.var_db, c.var_ix, c.var_iv, c.cov_db_ix, c.cov_db_iv, c.cov_ix_iv];
        let want = quadrature_covariance(gamma, h);
        for (k, (g, w)) in got.iter().zip(&want).enumerate() {
            assert!(
                (g - w).abs() <= 1e-8 * w.abs(),
                "entry {k} at gamma={gamma} h={h}: {g} vs {w}"
            );
        }
    }
}

#[test]
fn position_noise_small_step_limit() {
    let gamma = 3.0;
    for &a in &[1e-2, 1e-3, 1e-4, 1e-6] {
        let h = a / (gamma * gamma);
        let c = ou_covariance(gamma, h);
        let ratio = c.var_ix / (a * a * a / (3.0 * gamma * gamma));
        assert!((ratio - 1.0).abs() < a, "a={a}: ratio {ratio}");
    }
}

#[test]
fn brownian_increment_moments() {
    let h = 0.04;
    let m = 200_000;
    let draws: Vec<f64> = (0..m)
        .map(|i| brownian_increment(&NoiseKey::increment(11, 0, i as u64, 3, 0), h).unwrap())
        .collect();
    let mean = draws.iter().sum::<f64>() / m as f64;
    let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    assert!(mean.abs() < 4.0 * (h / m as f64).sqrt(), "mean {mean}");
    // Var of the sample variance is 2h²/m for Gaussians
    assert!((var - h).abs() < 4.0 * h * (2.0 / m as f64).sqrt(), "var {var}");
    assert!(brownian_increment(&NoiseKey::increment(0, 0, 0, 0, 0), 0.0).is_err());
}

#[test]
fn keys_address_independent_draws() {
    let base = NoiseKey::increment(1, 2, 3, 4, 0);
    let variants = [
        NoiseKey { seed: 9, ..base },
        NoiseKey { replica: 9, ..base },
        NoiseKey { particle: 9, ..base },
        NoiseKey { step: 9, ..base },
        NoiseKey { component: 1, ..base },
        NoiseKey { stream: NoiseStream::InitialPosition, ..base },
    ];
    let z0 = standard_normals::<3>(&base);
    assert_eq!(z0, standard_normals::<3>(&base));
    for v in variants {
        assert_ne!(z0, standard_normals::<3>(&v), "{v:?}");
    }
}

#[test]
fn lag_one_correlation_across_steps_is_small() {
    let m = 50_000u64;
    let z: Vec<f64> = (0..m)
        .map(|s| standard_normals::<1>(&NoiseKey::increment(5, 0, 0, s, 0))[0])
        .collect();
    let c = z.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (m - 1) as f64;
    assert!(c.abs() < 4.0 / (m as f64).sqrt(), "lag-1 correlation {c}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn covariance_is_psd(lg in 0.0f64..3.0, lh in -8.0f64..1.0) {
        let c = ou_covariance(10f64.powf(lg), 10f64.powf(lh));
        prop_assert!(c.min_eigenvalue() >= -1e-15 * c.trace(), "{:?} min eig {}", c, c.min_eigenvalue());
    }

    #[test]
    fn factor_reproduces_covariance(lg in 0.0f64..3.0, lh in -6.0f64..1.0) {
        let c = ou_covariance(10f64.powf(lg), 10f64.powf(lh));
        let f = c.factor().unwrap();
        let cols: Vec<[f64; 3]> = (0..3)
            .map(|k| {
                let mut z = [0.0; 3];
                z[k] = 1.0;
                let (db, ix, iv) = f.apply(z);
                [db, ix, iv]
            })
            .collect();
        let m = c.matrix();
        for a in 0..3 {
            for b in 0..3 {
                let rec: f64 = cols.iter().map(|col| col[a] * col[b]).sum();
                let scale = (m[a][a] * m[b][b]).sqrt();
                prop_assert!((rec - m[a][b]).abs() <= 1e-9 * scale, "entry ({},{}) {} vs {}", a, b, rec, m[a][b]);
            }
        }
    }

    #[test]
    fn increments_sum_to_brownian(seed in any::<u64>(), step in 0u64..1000, gamma in 1.0f64..100.0, lh in -5.0f64..0.0) {
        let h = 10f64.powf(lh);
        let (db, ix, iv) = sample_coupled_increments(&NoiseKey::increment(seed, 0, 7, step, 1), gamma, h).unwrap();
        prop_assert!((db - ix - iv).abs() <= 1e-12 * h.sqrt() * (1.0 + db.abs() / h.sqrt()));
    }
}
