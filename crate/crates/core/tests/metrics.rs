use overdamp::metrics::{
    coupled_msd, modulus_probe, second_moment, w1_empirical_1d, w2_empirical_1d,
    wp_assignment_exact, MAX_ASSIGNMENT_N,
};
use overdamp::{Error, Points};
use proptest::prelude::*;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Minimum over all matchings of `(1/N) Σ |a_i - b_σ(i)|^p`, then the `p`-th root.
fn brute_force_wp(a: &Points, b: &Points, p: i32) -> f64 {
    let n = a.len();
    permutations(n)
        .iter()
        .map(|s| {
            (0..n)
                .map(|i| {
                    let sq: f64 = a.row(i).iter().zip(b.row(s[i])).map(|(x, y)| (x - y) * (x - y)).sum();
                    sq.sqrt().powi(p)
                })
                .sum::<f64>()
                / n as f64
        })
        .fold(f64::INFINITY, f64::min)
        .powf(1.0 / p as f64)
}

#[test]
fn spec_examples() {
    assert_eq!(w2_empirical_1d(&[0.0, 1.0], &[1.0, 0.0]).unwrap(), 0.0);
    assert_eq!(w2_empirical_1d(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
    assert_eq!(w1_empirical_1d(&[0.0, 2.0], &[1.0, 1.0]).unwrap(), 1.0);
    assert!(w2_empirical_1d(&[0.0], &[0.0, 1.0]).is_err());
    assert!(w2_empirical_1d(&[], &[]).is_err());
}

#[test]
fn assignment_capacity_is_enforced() {
    let n = MAX_ASSIGNMENT_N + 1;
    let a = Points::zeros(n, 2);
    match wp_assignment_exact(&a, &a, 2).unwrap_err() {
        Error::Capacity { got, limit, .. } => assert_eq!((got, limit), (n, MAX_ASSIGNMENT_N)),
        e => panic!("unexpected {e:?}"),
    }
    assert!(wp_assignment_exact(&Points::zeros(3, 1), &Points::zeros(3, 1), 3).is_err());
}

#[test]
fn second_moment_by_hand() {
    let p = Points::from_rows(&[vec![1.0, 2.0], vec![0.0, -1.0]]).unwrap();
    assert_eq!(second_moment(&p), 3.0);
}

#[test]
fn modulus_of_brownian_path() {
    // a Brownian path in d = 1 has E|B(t+δ) - B(t)|² = δ
    let n = 4000;
    let spacing: f64 = 1.0 / 64.0;
    let mut x = Points::zeros(n, 1);
    let mut snaps = vec![x.clone()];
    let mut state = 12345u64;
    let mut gauss = move || {
        // Box-Muller on a 64-bit LCG, independent of the crate's generator
        let mut u = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 + 0.5) / (1u64 << 53) as f64
        };
        let (u1, u2) = (u(), u());
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    for _ in 0..64 {
        for c in x.as_mut_slice() {
            *c += spacing.sqrt() * gauss();
        }
        snaps.push(x.clone());
    }
    let traj: Vec<(f64, &Points)> = snaps.iter().enumerate().map(|(k, p)| (k as f64 * spacing, p)).collect();
    let deltas = [spacing, 4.0 * spacing, 16.0 * spacing];
    let probe = modulus_probe(&traj, &deltas).unwrap();
    for p in &probe.points {
        assert!((p.msd / p.delta - 1.0).abs() < 0.1, "{p:?}");
    }
    assert!(probe.max_excess(&probe.points) <= 1e-12);
    assert!(modulus_probe(&traj, &[1.5 * spacing]).is_err());
    assert!(modulus_probe(&traj, &[2.0]).is_err());
    assert_eq!(modulus_probe(&traj, &[0.0]).unwrap().points[0].msd, 0.0);
}

fn cloud(n: usize, d: usize) -> impl Strategy<Value = Points> {
    prop::collection::vec(-5.0f64..5.0, n * d).prop_map(move |v| Points::new(v, d).unwrap())
}

fn pair(max_n: usize, d: usize) -> impl Strategy<Value = (Points, Points)> {
    (1..=max_n).prop_flat_map(move |n| (cloud(n, d), cloud(n, d)))
}

fn triple_1d() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..30).prop_flat_map(|n| {
        let v = || prop::collection::vec(-5.0f64..5.0, n);
        (v(), v(), v())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sorted_w2_matches_permutations((a, b) in pair(7, 1)) {
        let w = w2_empirical_1d(a.as_slice(), b.as_slice()).unwrap();
        prop_assert!((w - brute_force_wp(&a, &b, 2)).abs() <= 1e-12);
        let w1 = w1_empirical_1d(a.as_slice(), b.as_slice()).unwrap();
        prop_assert!((w1 - brute_force_wp(&a, &b, 1)).abs() <= 1e-12);
    }

    #[test]
    fn assignment_matches_permutations((a, b) in pair(6, 2), p in 1u32..3) {
        let w = wp_assignment_exact(&a, &b, p).unwrap();
        prop_assert!((w - brute_force_wp(&a, &b, p as i32)).abs() <= 1e-10);
    }

    #[test]
    fn assignment_matches_sorting_on_the_line((a, b) in pair(64, 1)) {
        let w = wp_assignment_exact(&a, &b, 2).unwrap();
        prop_assert!((w - w2_empirical_1d(a.as_slice(), b.as_slice()).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn w2_is_a_metric((a, b, c) in triple_1d()) {
        let ab = w2_empirical_1d(&a, &b).unwrap();
        let ba = w2_empirical_1d(&b, &a).unwrap();
        let ac = w2_empirical_1d(&a, &c).unwrap();
        let bc = w2_empirical_1d(&b, &c).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!(ac <= ab + bc + 1e-12);
        prop_assert_eq!(w2_empirical_1d(&a, &a).unwrap(), 0.0);
        prop_assert!(w1_empirical_1d(&a, &b).unwrap() <= ab + 1e-12);
    }

    #[test]
    fn w2_ignores_order_and_bounds_msd((a, b) in pair(40, 1), rot in 0usize..40) {
        let mut shuffled = a.as_slice().to_vec();
        let k = rot % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        let w = w2_empirical_1d(a.as_slice(), b.as_slice()).unwrap();
        prop_assert_eq!(w, w2_empirical_1d(&shuffled, b.as_slice()).unwrap());
        prop_assert!(w * w <= coupled_msd(&a, &b).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn assignment_bounds_msd_in_higher_dimensions((a, b) in pair(20, 3)) {
        let w = wp_assignment_exact(&a, &b, 2).unwrap();
        prop_assert!(w * w <= coupled_msd(&a, &b).unwrap() * (1.0 + 1e-12));
        prop_assert!(wp_assignment_exact(&a, &a, 2).unwrap() == 0.0);
    }
}
