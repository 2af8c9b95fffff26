use std::path::Path;
use std::process::{Command, Output};

use overdamp::cli::{parse_config, parse_config_with_overrides, render_config, RunConfig};
use overdamp::model::SmoothProfile;
use overdamp::{Error, ExternalPotential, InitialLaw, Integrator, InteractionKernel, SimConfig, SpaceDim};
use proptest::prelude::*;

const BASE: &str = "gamma=4\nn=40\ndim=1\nt_final=0.2\ndt=0.01\nseed=7\npotential=harmonic:1.0\nkernel=smooth\nintegrator=exp\n";

fn overdamp(dir: &Path, args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_overdamp"));
    cmd.args(args).current_dir(dir);
    if let Some(t) = threads {
        cmd.env("OVERDAMP_THREADS", t);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn validate_reports_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.txt", BASE);
    let out = overdamp(dir.path(), &["validate", "--config", &cfg, "--out", "v"], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("v/validate.json")).unwrap()).unwrap();
    let pot = report["potential"].as_array().unwrap();
    assert_eq!(pot.len(), 4);
    let r1 = pot.iter().find(|p| p["r"] == 1.0).unwrap();
    assert!((r1["sup_weighted_grad"].as_f64().unwrap() - (-0.5f64).exp()).abs() < 1e-6);
    assert!(dir.path().join("v/manifest.json").exists());
}

#[test]
fn w2_on_equal_files_prints_zero() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.txt", "0.5\n-1\n2\n");
    let b = write(dir.path(), "b.txt", "2\n0.5\n-1\n");
    let out = overdamp(dir.path(), &["w2", &a, &b], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0");

    let a = write(dir.path(), "a2.txt", "0 0\n1 1\n");
    let b = write(dir.path(), "b2.txt", "1 1\n0 1\n");
    let out = overdamp(dir.path(), &["w2", &a, &b], None);
    let w: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((w - 0.5f64.sqrt()).abs() < 1e-15);

    let c = write(dir.path(), "c.txt", "1 2 3\n");
    assert_eq!(overdamp(dir.path(), &["w2", &a, &c], None).status.code(), Some(1));
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let two = write(dir.path(), "two.txt", &format!("{BASE}gamma_grid=2,4\n"));
    let out = overdamp(dir.path(), &["rate-study", "--config", &two], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma_grid"));

    let cfg = write(dir.path(), "c.txt", BASE);
    let out = overdamp(dir.path(), &["simulate", "--config", &cfg, "--set", "gamma=0.5"], None);
    assert_eq!(out.status.code(), Some(1));
    let out = overdamp(dir.path(), &["rate-study", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(1));
    let out = overdamp(dir.path(), &["simulate"], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn singularity_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = BASE.replace("kernel=smooth", "kernel=newtonian:+:0") + "x0=gaussian:0:0\n";
    let cfg = write(dir.path(), "c.txt", &text);
    let out = overdamp(dir.path(), &["simulate", "--config", &cfg, "--out", "o"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("singular"));
}

#[test]
fn simulate_writes_series_and_replays_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.txt", &format!("{BASE}replicas=3\nrecord_count=10\ndump=true\n"));
    let run = |out: &str, threads: &str| {
        let o = overdamp(dir.path(), &["simulate", "--config", &cfg, "--out", out, "--seed", "5"], Some(threads));
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    };
    run("a", "1");
    run("b", "3");
    for f in ["gap.csv", "msd.dat", "trajectory.csv", "manifest.json"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs");
    }
    let gap = std::fs::read_to_string(dir.path().join("a/gap.csv")).unwrap();
    assert_eq!(gap.lines().count(), 12);
    assert!(gap.lines().nth(1).unwrap().starts_with("0,0,"));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 5);
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn rate_study_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.txt", &format!("{BASE}gamma_grid=2,4,8\nreplicas=2\n"));
    let out = overdamp(dir.path(), &["rate-study", "--config", &cfg, "--out", "r"], Some("2"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("r/rates.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("gamma,sup_msd,mc_stderr,n,dim,T,dt,integrator,eps\n"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r/summary.json")).unwrap()).unwrap();
    assert!(summary["slope"].as_f64().unwrap() < 0.0);
    let dat = std::fs::read_to_string(dir.path().join("r/loglog.dat")).unwrap();
    assert_eq!(dat.lines().count(), 4);
}

#[test]
fn parse_errors_name_key_and_line() {
    match parse_config("n=4\ndim=1\n\nt_final=1\nkernel=newtonian:x:1\ngamma=2").unwrap_err() {
        Error::Parse { line, key, .. } => assert_eq!((line, key.as_str()), (5, "kernel")),
        e => panic!("unexpected {e:?}"),
    }
    match parse_config("gamma=2\nn=4\ndim=1\nt_final=1\ndt=0.3").unwrap_err() {
        Error::Parse { line, key, .. } => assert_eq!((line, key.as_str()), (5, "dt")),
        e => panic!("unexpected {e:?}"),
    }
    assert!(parse_config("gamma=2\nn=4\nt_final=1").is_err());
    let c = parse_config_with_overrides(BASE, &["kernel=power:1.5:0.2".into()]).unwrap();
    assert_eq!(c.sim.kernel, InteractionKernel::power_law(1.5, 0.2).unwrap());
}

fn arb_config() -> impl Strategy<Value = RunConfig> {
    let kernel = prop_oneof![
        Just(InteractionKernel::Zero),
        Just(InteractionKernel::SmoothRegular(SmoothProfile::Gaussian)),
        Just(InteractionKernel::SmoothRegular(SmoothProfile::Linear)),
        (prop::bool::ANY, 0.0f64..2.0)
            .prop_map(|(s, e)| InteractionKernel::newtonian(if s { 1.0 } else { -1.0 }, e).unwrap()),
        (0.1f64..4.0, 0.0f64..2.0).prop_map(|(a, e)| InteractionKernel::power_law(a, e).unwrap()),
    ];
    let potential = prop_oneof![
        Just(ExternalPotential::zero()),
        (0.01f64..10.0).prop_map(|s| ExternalPotential::harmonic(s).unwrap()),
        (0.01f64..10.0, 0.01f64..10.0)
            .prop_map(|(s, c)| ExternalPotential::harmonic(s).unwrap().with_c_phi(c).unwrap()),
        Just(ExternalPotential::named("hyperbolic").unwrap()),
        (0.01f64..10.0).prop_map(|c| ExternalPotential::named("cosine").unwrap().with_c_phi(c).unwrap()),
    ];
    (
        (1.0f64..50.0, 1usize..5000, 1usize..4, 1u32..200, any::<u64>(), 1usize..20),
        (potential, kernel, prop::bool::ANY, -3.0f64..3.0, 0.0f64..4.0, 1usize..100),
        (prop::option::of(Just(vec![1.0, 2.5, 7.0])), prop::bool::ANY),
    )
        .prop_map(|((gamma, n, d, steps, seed, reps), (potential, kernel, em, m, v, rc), (grid, dump))| {
            let dt = 1.0 / 64.0;
            RunConfig {
                sim: SimConfig {
                    gamma,
                    n_particles: n,
                    dim: SpaceDim::new(d).unwrap(),
                    t_final: dt * steps as f64,
                    dt,
                    seed,
                    replicas: reps,
                    potential,
                    kernel,
                    integrator: if em { Integrator::EulerMaruyama } else { Integrator::ExponentialOU },
                    initial: InitialLaw { x_mean: m, x_var: v, v_mean: -m, v_var: 1.0 },
                },
                gamma_grid: grid,
                record_count: rc,
                dump_trajectory: dump,
            }
        })
}

proptest! {
    #[test]
    fn render_then_parse_is_identity(cfg in arb_config()) {
        let text = render_config(&cfg);
        prop_assert_eq!(parse_config(&text).unwrap(), cfg);
    }
}
