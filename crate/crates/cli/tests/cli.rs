use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn nlwave(out: &Path, args: &[&str]) -> (i32, String, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_nlwave"))
        .args(args)
        .env("NLWAVE_OUT_DIR", out)
        .output()
        .expect("spawn nlwave");
    (
        o.status.code().expect("exit code"),
        String::from_utf8_lossy(&o.stdout).into_owned(),
        String::from_utf8_lossy(&o.stderr).into_owned(),
    )
}

fn manifest(dir: &Path, command: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(format!("{command}.manifest.json"))).unwrap()).unwrap()
}

#[test]
fn usage_errors_exit_64() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(nlwave(d.path(), &[]).0, 64);
    assert_eq!(nlwave(d.path(), &["run"]).0, 64);
    assert_eq!(nlwave(d.path(), &["dispersion", "--no-such-flag"]).0, 64);
    assert_eq!(nlwave(d.path(), &["--help"]).0, 0);
    assert_eq!(nlwave(d.path(), &["--version"]).0, 0);
}

#[test]
fn validation_errors_exit_1() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(nlwave(d.path(), &["dispersion", "--h0", "-1"]).0, 1);
    assert_eq!(nlwave(d.path(), &["dispersion", "--n", "abc"]).0, 1);
    assert_eq!(nlwave(d.path(), &["evolve", "--order", "2,1"]).0, 1);
    assert_eq!(nlwave(d.path(), &["global-residual", "--n", "100"]).0, 1);
    let (code, _, err) = nlwave(d.path(), &["soliton-profile", "--c", "1.2", "--kappa", "1.0", "--sigma-hat", "0.2"]);
    assert_eq!(code, 1);
    assert!(err.contains("not admitted"));
}

#[test]
fn numerical_failures_exit_2() {
    let d = tempfile::tempdir().unwrap();
    // the unfiltered ill-posed equation amplifies round-off past the guard
    let (code, _, err) = nlwave(d.path(), &["boussinesq", "--cutoff", "0"]);
    assert_eq!(code, 2, "{err}");
    // the branch of the low-tension manifold that blows up
    let (code, _, err) =
        nlwave(d.path(), &["soliton-profile", "--c", "1.2", "--kappa", "1.6", "--sigma-hat", "0.2", "--branch", "-1"]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("vanishes"));
    let (code, _, _) = nlwave(d.path(), &["evolve", "--order", "1,2", "--eps", "0.9", "--delta", "0.9", "--amp", "5", "--dt", "0.5", "--t-end", "1", "--n", "64", "--half-period", "3.14"]);
    assert_eq!(code, 2);
}

#[test]
fn dispersion_matches_formula() {
    let d = tempfile::tempdir().unwrap();
    let (code, _, _) = nlwave(d.path(), &["dispersion", "--h0", "1", "--g", "9.81", "--sigma", "0", "--kmax", "10", "--n", "200"]);
    assert_eq!(code, 0);
    let csv = fs::read_to_string(d.path().join("dispersion.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("kappa,omega2"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 201);
    let (k, w2) = rows[20];
    assert_eq!(k, 1.0);
    assert!((w2 - 9.81 * 1f64.tanh()).abs() < 1e-12);
    let m = manifest(d.path(), "dispersion");
    assert_eq!(m["command"], "dispersion");
    assert_eq!(m["seed"], 0);
    assert!(m["summary"]["omega2_sup"].as_f64().unwrap() > 0.0);
    assert!(m["versions"]["nonlocal-waves"].is_string());
}

#[test]
fn atlas_verdict() {
    let d = tempfile::tempdir().unwrap();
    let (code, out, _) = nlwave(d.path(), &["soliton-atlas", "--sigma-hat", "0.4", "--c", "0.95", "--kappa", "0.5"]);
    assert_eq!(code, 0);
    assert!(out.contains("verdict: both exist"));
    assert_eq!(manifest(d.path(), "soliton-atlas")["summary"]["verdicts"][0]["verdict"], "both exist");
    let csv = fs::read_to_string(d.path().join("soliton-atlas.csv")).unwrap();
    assert!(csv.starts_with("c,kappa,sigma_hat,topology,elevated_exists,depression_exists,Gamma1,Gamma2"));
}

#[test]
fn config_file_and_precedence() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.toml");
    let cfg_out = d.path().join("from-config");
    fs::write(
        &cfg,
        format!("seed = 11\nout_dir = {:?}\n[dispersion]\nkmax = 2.0\nn = 4\nh0 = 2.0\n", cfg_out.to_str().unwrap()),
    )
    .unwrap();
    let flag_out = d.path().join("from-flag");
    let o = Command::new(env!("CARGO_BIN_EXE_nlwave"))
        .args(["dispersion", "--config", cfg.to_str().unwrap(), "--n", "8", "--out", flag_out.to_str().unwrap()])
        .env_remove("NLWAVE_OUT_DIR")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let m = manifest(&flag_out, "dispersion");
    assert_eq!(m["seed"], 11);
    assert_eq!(m["config"]["n"], 8);
    assert_eq!(m["config"]["kmax"], 2.0);
    assert_eq!(m["config"]["h0"], 2.0);
    assert!(!cfg_out.exists());

    // environment beats the config file, config beats the default
    let env_out = d.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_nlwave"))
        .args(["dispersion", "--config", cfg.to_str().unwrap()])
        .env("NLWAVE_OUT_DIR", &env_out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(manifest(&env_out, "dispersion")["config"]["n"], 4);

    fs::write(&cfg, "[dispersion]\nbogus = 1\n").unwrap();
    assert_eq!(nlwave(d.path(), &["dispersion", "--config", cfg.to_str().unwrap()]).0, 1);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let runs = [
        vec!["evolve", "--init", "random", "--seed", "7", "--t-end", "1", "--order", "1,2"],
        vec!["soliton-atlas", "--c-range", "0.5,1.5,7", "--kappa", "0,0.5,1.6", "--sigma-hat", "0.2,0.4"],
        vec!["global-residual", "--gamma", "0.7"],
        vec!["linear-sweep"],
        vec!["boussinesq"],
    ];
    for args in runs {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        assert_eq!(nlwave(a.path(), &args).0, 0, "{args:?}");
        assert_eq!(nlwave(b.path(), &args).0, 0, "{args:?}");
        let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert!(names.len() >= 2);
        for n in names {
            assert_eq!(fs::read(a.path().join(&n)).unwrap(), fs::read(b.path().join(&n)).unwrap(), "{n:?}");
        }
    }
}

#[test]
fn seed_changes_random_initial_data() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |s: &'static str| vec!["evolve", "--init", "random", "--seed", s, "--t-end", "0.1"];
    assert_eq!(nlwave(a.path(), &args("1")).0, 0);
    assert_eq!(nlwave(b.path(), &args("2")).0, 0);
    assert_ne!(fs::read(a.path().join("evolve.final.csv")).unwrap(), fs::read(b.path().join("evolve.final.csv")).unwrap());
}
