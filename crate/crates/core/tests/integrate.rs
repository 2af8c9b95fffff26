use overdamp::integrate::{
    record_steps, simulate_replica, step_underdamped_em, step_underdamped_exp, step_overdamped_em,
};
use overdamp::model::SmoothProfile;
use overdamp::noise::{standard_normals, NoiseKey};
use overdamp::{
    simulate_coupled, CoupledState, Error, ExternalPotential, InitialLaw, Integrator,
    InteractionKernel, KineticEnsemble, OverdampedEnsemble, Points, SimConfig, SpaceDim,
};

fn config(gamma: f64, n: usize) -> SimConfig {
    SimConfig {
        gamma,
        n_particles: n,
        dim: SpaceDim::new(1).unwrap(),
        t_final: 0.5,
        dt: 0.01,
        seed: 99,
        replicas: 1,
        potential: ExternalPotential::harmonic(1.0).unwrap(),
        kernel: InteractionKernel::SmoothRegular(SmoothProfile::Gaussian),
        integrator: Integrator::ExponentialOU,
        initial: InitialLaw::standard(),
    }
}

/// Fine Brownian path on `[0, h]` for `n` coordinates, `m` substeps.
fn fine_path(n: usize, m: usize, h: f64, seed: u64) -> Vec<Vec<f64>> {
    let sd = (h / m as f64).sqrt();
    (0..m)
        .map(|s| {
            (0..n)
                .map(|i| sd * standard_normals::<1>(&NoiseKey::increment(seed, 0, i as u64, s as u64, 0))[0])
                .collect()
        })
        .collect()
}

/// `(I_X, I_V)` as Riemann sums of the fine path: `I_V = ∫ e^{-γ²(h-s)} dB_s`.
fn ou_integrals(path: &[Vec<f64>], gamma: f64, h: f64) -> Vec<(f64, f64)> {
    let m = path.len();
    let dh = h / m as f64;
    let n = path[0].len();
    (0..n)
        .map(|i| {
            let mut db = 0.0;
            let mut iv = 0.0;
            for (s, incs) in path.iter().enumerate() {
                let mid = (s as f64 + 0.5) * dh;
                iv += (-gamma * gamma * (h - mid)).exp() * incs[i];
                db += incs[i];
            }
            (db - iv, iv)
        })
        .collect()
}

fn em_on_path(
    start: &KineticEnsemble,
    cfg: &SimConfig,
    path: &[Vec<f64>],
    h: f64,
    coarsen: usize,
) -> KineticEnsemble {
    let sub = h / path.len() as f64 * coarsen as f64;
    let mut s = start.clone();
    for chunk in path.chunks(coarsen) {
        let db: Vec<f64> = (0..chunk[0].len()).map(|i| chunk.iter().map(|c| c[i]).sum()).collect();
        s = step_underdamped_em(&s, cfg, sub, &db).unwrap();
    }
    s
}

fn max_gap(a: &KineticEnsemble, b: &KineticEnsemble) -> f64 {
    a.x.as_slice()
        .iter()
        .zip(b.x.as_slice())
        .chain(a.v.as_slice().iter().zip(b.v.as_slice()))
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}

fn start_state(n: usize) -> KineticEnsemble {
    let x = Points::from_scalars(&(0..n).map(|i| i as f64 * 0.3 - 1.0).collect::<Vec<_>>());
    let v = Points::from_scalars(&(0..n).map(|i| 1.0 - i as f64 * 0.2).collect::<Vec<_>>());
    KineticEnsemble::new(x, v, 0.0).unwrap()
}

#[test]
fn exponential_step_is_exact_without_force() {
    let mut cfg = config(4.0, 8);
    cfg.potential = ExternalPotential::zero();
    cfg.kernel = InteractionKernel::Zero;
    let h = 0.25;
    let path = fine_path(8, 16_384, h, 3);
    let start = start_state(8);
    let exact = step_underdamped_exp(&start, &cfg, h, &ou_integrals(&path, cfg.gamma, h)).unwrap();
    let errs: Vec<f64> = [64, 16, 4, 1]
        .iter()
        .map(|&c| max_gap(&em_on_path(&start, &cfg, &path, h, c), &exact))
        .collect();
    assert!(errs[3] < 5e-3, "finest EM error {errs:?}");
    // additive noise: strong order one
    assert!(errs[0] > 20.0 * errs[3], "EM errors do not shrink: {errs:?}");
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn exponential_and_em_agree_for_small_steps() {
    let cfg = config(2.0, 16);
    let h = 1e-4;
    let start = start_state(16);
    // drift only: the schemes differ at O(h²)
    let exp = step_underdamped_exp(&start, &cfg, h, &vec![(0.0, 0.0); 16]).unwrap();
    let em = step_underdamped_em(&start, &cfg, h, &[0.0; 16]).unwrap();
    assert!(max_gap(&exp, &em) < 1e-7, "drift gap {}", max_gap(&exp, &em));
    // with noise the velocity kernels differ by O(γ³h^{3/2})
    let path = fine_path(16, 1, h, 4);
    let exp = step_underdamped_exp(&start, &cfg, h, &ou_integrals(&path, cfg.gamma, h)).unwrap();
    let em = step_underdamped_em(&start, &cfg, h, &path[0]).unwrap();
    let tol = 3.0 * cfg.gamma.powi(3) * h.powf(1.5);
    assert!(max_gap(&exp, &em) < tol, "gap {} vs {tol}", max_gap(&exp, &em));
}

#[test]
fn em_guard_rejects_stiff_steps() {
    let cfg = config(10.0, 2);
    let start = start_state(2);
    let err = step_underdamped_em(&start, &cfg, 0.6, &[0.0, 0.0]).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
    assert!(step_underdamped_em(&start, &cfg, 0.4, &[0.0, 0.0]).is_ok());
}

#[test]
fn overdamped_step_by_hand() {
    let mut cfg = config(1.0, 2);
    cfg.kernel = InteractionKernel::Zero;
    let x = OverdampedEnsemble::new(Points::from_scalars(&[1.0, -2.0]), 0.0).unwrap();
    let next = step_overdamped_em(&x, &cfg, 0.1, &[0.0, 0.5]).unwrap();
    assert_eq!(next.x.as_slice(), &[1.0 - 0.1, -2.0 + 0.2 + 2f64.sqrt() * 0.5]);
    assert!((next.t - 0.1).abs() < 1e-15);
}

#[test]
fn coupled_runs_share_initial_positions_and_replay() {
    let cfg = config(4.0, 50);
    let a = simulate_coupled(&cfg, &[0.0, 0.25, 0.5]).unwrap();
    let b = simulate_coupled(&cfg, &[0.0, 0.25, 0.5]).unwrap();
    assert_eq!(a, b);
    assert_eq!(a[0].kinetic.x, a[0].overdamped.x);
    assert_ne!(a[2].kinetic.x, a[2].overdamped.x);
    let other = simulate_replica(&cfg, 1, &[0.0]).unwrap();
    assert_ne!(other[0].kinetic.x, a[0].kinetic.x);
}

#[test]
fn record_grid_does_not_change_the_path() {
    for integrator in [Integrator::ExponentialOU, Integrator::EulerMaruyama] {
        let mut cfg = config(6.0, 30);
        cfg.integrator = integrator;
        let dense: Vec<f64> = (0..=50).map(|k| k as f64 * 0.01).collect();
        let a = simulate_coupled(&cfg, &dense).unwrap();
        let b = simulate_coupled(&cfg, &[0.5]).unwrap();
        assert_eq!(a.last().unwrap(), &b[0]);
    }
}

#[test]
fn record_steps_snap_and_validate() {
    let cfg = config(2.0, 1);
    assert_eq!(record_steps(&cfg, &[0.0, 0.1, 0.123, 0.5]).unwrap(), vec![0, 10, 12, 50]);
    assert!(record_steps(&cfg, &[0.2, 0.1]).is_err());
    assert!(record_steps(&cfg, &[0.6]).is_err());
}

#[test]
fn coincident_particles_hit_the_singularity() {
    let mut cfg = config(2.0, 3);
    cfg.dim = SpaceDim::new(2).unwrap();
    cfg.kernel = InteractionKernel::newtonian(1.0, 0.0).unwrap();
    cfg.initial = InitialLaw { x_mean: 0.5, x_var: 0.0, v_mean: 0.0, v_var: 1.0 };
    let mut state = CoupledState::new(cfg, 0).unwrap();
    match state.advance().unwrap_err() {
        Error::Singularity { i, j, t } => {
            assert_eq!((i, j), (0, 1));
            assert_eq!(t, Some(0.0));
        }
        e => panic!("unexpected {e:?}"),
    }
}

#[test]
fn overdamped_mean_relaxes() {
    let mut cfg = config(1.0, 20_000);
    cfg.t_final = 1.0;
    cfg.kernel = InteractionKernel::Zero;
    cfg.initial = InitialLaw { x_mean: 1.0, x_var: 0.0, v_mean: 0.0, v_var: 1.0 };
    let snaps = simulate_coupled(&cfg, &[1.0]).unwrap();
    let xs = snaps[0].overdamped.x.as_slice();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let expect = (1.0 - cfg.dt).powi(100);
    assert!((mean - expect).abs() < 4.0 * (var / n).sqrt(), "mean {mean} vs {expect}");
}

#[test]
fn gap_shrinks_with_friction() {
    let msd = |gamma: f64| {
        let cfg = config(gamma, 200);
        let s = simulate_coupled(&cfg, &[0.5]).unwrap();
        overdamp::metrics::coupled_msd(&s[0].kinetic.x, &s[0].overdamped.x).unwrap()
    };
    let (a, b, c) = (msd(2.0), msd(8.0), msd(32.0));
    assert!(a > b && b > c, "{a} {b} {c}");
}
