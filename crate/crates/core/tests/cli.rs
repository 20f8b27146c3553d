use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn cstomo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cstomo")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_reader(std::fs::File::open(path).unwrap()).unwrap()
}

fn assert_schema(schema_file: &str, path: &Path) {
    let schema = read_json(&Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(schema_file));
    let validator = jsonschema::validator_for(&schema).unwrap();
    let instance = read_json(path);
    let errors: Vec<String> = validator.iter_errors(&instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{} vs {schema_file}: {errors:?}", path.display());
}

fn simulate(dir: &Path, seed: &str, extra: &[&str]) -> Output {
    let mut args = vec![
        "simulate", "--seed", seed, "--out", dir.to_str().unwrap(), "--set", "simulate.num_qubits=2", "--set",
        "simulate.shots=200",
    ];
    args.extend_from_slice(extra);
    cstomo(&args)
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    for (dir, seed) in [(&a, "3"), (&b, "3"), (&c, "4")] {
        let out = simulate(dir, seed, &[]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    let read = |d: &Path| std::fs::read(d.join("counts.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
    assert_eq!(std::fs::read(a.join("truth.json")).unwrap(), std::fs::read(b.join("truth.json")).unwrap());
    assert_schema("settings.schema.json", &a.join("settings.json"));
    assert_schema("matrix.schema.json", &a.join("truth.json"));
    assert_schema("manifest.schema.json", &a.join("manifest.json"));
    // all 9 settings by default, 4 outcomes each
    let text = String::from_utf8(read(&a)).unwrap();
    assert_eq!(text.lines().count(), 1 + 9 * 4);
}

#[test]
fn reconstruct_round_trip_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    let out = simulate(&sim, "1", &["--set", "simulate.shots=2000"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let counts = sim.join("counts.csv");
    for est in ["ls_pg", "grad", "lasso"] {
        let dir = tmp.path().join(est);
        let out = cstomo(&[
            "reconstruct", counts.to_str().unwrap(), "--estimator", est, "--set", "estimator.mu=0.001", "--out",
            dir.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{est}: {}", stderr(&out));
        assert_schema("estimate.schema.json", &dir.join("estimate.json"));
        assert_schema("manifest.schema.json", &dir.join("manifest.json"));
        let est_json = read_json(&dir.join("estimate.json"));
        assert_eq!(est_json["estimator"], est);
        let eig: Vec<f64> = est_json["eigenvalues"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
        assert!((eig.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(eig.iter().all(|&e| e >= -1e-12));

        let manifest = read_json(&dir.join("manifest.json"));
        assert_eq!(manifest["command"], "reconstruct");
        let input = &manifest["inputs"][0];
        assert_eq!(input["role"], "counts");
        let digest = Sha256::digest(std::fs::read(&counts).unwrap());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(input["sha256"], hex);
    }
}

#[test]
fn config_file_then_set_then_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "seed = 5\nworkers = 1\n[simulate]\nnum_qubits = 1\nshots = 10\n").unwrap();
    let dir = tmp.path().join("out");
    let d = dir.to_str().unwrap();
    let out = cstomo(&["simulate", "--config", cfg.to_str().unwrap(), "--set", "seed=6", "--set", "simulate.shots=20", "--out", d]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let m = read_json(&dir.join("manifest.json"));
    assert_eq!(m["seed"], 6);
    assert_eq!(m["config"]["simulate"]["shots"], 20);
    assert_eq!(m["config"]["simulate"]["num_qubits"], 1);
    assert_eq!(m["inputs"][0]["role"], "config");

    let out = cstomo(&["simulate", "--config", cfg.to_str().unwrap(), "--set", "seed=6", "--seed", "7", "--out", d]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(read_json(&dir.join("manifest.json"))["seed"], 7);
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("o");
    let d = d.to_str().unwrap();
    for args in [
        vec!["frobnicate"],
        vec!["simulate", "--set", "simulate.colour=red", "--out", d],
        vec!["simulate", "--set", "nokey", "--out", d],
        vec!["simulate", "--set", "simulate.shots=many", "--out", d],
        vec!["simulate", "--workers", "0", "--out", d],
        vec!["simulate", "--estimator", "tnm", "--out", d],
        vec!["simulate", "--set", "simulate.state=0bar", "--out", d],
        vec!["reconstruct", "--out", d],
        vec!["reconstruct", "x.csv", "--estimator", "magic", "--out", d],
        vec!["select-rank", "x.csv", "--set", "select_rank.replicas=1", "--out", d],
        vec!["simulate", "--config", "/definitely/missing.toml", "--out", d],
    ] {
        let out = cstomo(&args);
        assert_eq!(code(&out), 2, "{args:?}: {}", stderr(&out));
    }
    let out = cstomo(&["simulate", "--set", "simulate.colour=red", "--out", d]);
    assert!(stderr(&out).contains("simulate.shots"), "valid keys are listed: {}", stderr(&out));
}

#[test]
fn data_errors_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.csv");
    std::fs::write(&bad, "setting,outcome_index,count,shots\nZ,0,4,10\nZ,1,4,10\n").unwrap();
    let d = tmp.path().join("o");
    let d = d.to_str().unwrap();
    for args in [
        vec!["reconstruct", bad.to_str().unwrap(), "--out", d],
        vec!["reconstruct", "/definitely/missing.csv", "--out", d],
        vec!["correlators", bad.to_str().unwrap(), "--out", d],
    ] {
        let out = cstomo(&args);
        assert_eq!(code(&out), 3, "{args:?}: {}", stderr(&out));
        assert!(stderr(&out).contains("error"));
    }

    let uneven = tmp.path().join("uneven.csv");
    std::fs::write(&uneven, "setting,outcome_index,count,shots\nZ,0,4,4\nX,0,6,6\n").unwrap();
    let out = cstomo(&["select-rank", uneven.to_str().unwrap(), "--out", d]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn infeasible_epsilon_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    let out = simulate(&sim, "2", &["--set", "simulate.shots=10"]);
    assert_eq!(code(&out), 0);
    let d = tmp.path().join("o");
    let out = cstomo(&[
        "reconstruct", sim.join("counts.csv").to_str().unwrap(), "--estimator", "tnm", "--set", "estimator.epsilon=1e-12",
        "--out", d.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn correlators_match_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let counts = tmp.path().join("c.csv");
    std::fs::write(&counts, "setting,outcome_index,count,shots\nZZ,0,6,10\nZZ,3,4,10\nXZ,1,10,10\n").unwrap();
    let d = tmp.path().join("o");
    let out = cstomo(&["correlators", counts.to_str().unwrap(), "--out", d.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(d.join("correlators.csv")).unwrap();
    let rows: Vec<Vec<String>> =
        text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect();
    assert_eq!(rows[0][0], "ZZ");
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 1.0);
    assert_eq!(rows[1][0], "XZ");
    assert_eq!(rows[1][1].parse::<f64>().unwrap(), -1.0);
}

#[test]
fn select_rank_report() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    let out = simulate(&sim, "8", &["--set", "simulate.num_qubits=3", "--set", "simulate.shots=500"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let run = |dir: &Path| {
        cstomo(&[
            "select-rank", sim.join("counts.csv").to_str().unwrap(), "--seed", "11", "--workers", "2", "--set",
            "select_rank.replicas=6", "--set", "select_rank.guta=true", "--out", dir.to_str().unwrap(),
        ])
    };
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let out = run(dir);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    assert_schema("threshold_report.schema.json", &a.join("threshold_report.json"));
    assert_schema("estimate.schema.json", &a.join("estimate.json"));
    assert_eq!(
        std::fs::read(a.join("threshold_report.json")).unwrap(),
        std::fs::read(b.join("threshold_report.json")).unwrap()
    );
    let report = read_json(&a.join("threshold_report.json"));
    assert_eq!(report["dim"], 8);
    assert_eq!(report["bootstrap"]["replicas"], 6);
    assert_eq!(report["bootstrap"]["seed"], 11);
    assert_eq!(report["guta_total_copies"], 27 * 500);
    let k = report["selected_rank"].as_u64().unwrap();
    assert!((1..=8).contains(&k));
}

#[test]
fn benchmark_grid_resumes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("g");
    let d = d.to_str().unwrap();
    let args = [
        "benchmark-grid", "--seed", "3", "--set", "grid.num_qubits=2", "--set", "grid.ranks=[1]", "--set",
        "grid.settings=[3, 9]", "--set", "grid.repetitions=[20]", "--set", "grid.trials=3", "--set", "grid.replicas=3",
        "--out", d,
    ];
    let out = cstomo(&args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let first = std::fs::read(Path::new(d).join("grid.csv")).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 3);
    let summary = std::fs::read_to_string(Path::new(d).join("grid_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);

    let out = cstomo(&args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("resumed 2 of 2"), "{}", stderr(&out));
    assert_eq!(std::fs::read(Path::new(d).join("grid.csv")).unwrap(), first);

    let mut changed = args.to_vec();
    changed[2] = "4";
    let out = cstomo(&changed);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn shipped_configs_resolve() {
    use clap::Parser;
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        for cmd in ["simulate", "select-rank", "benchmark-grid"] {
            let cli = cstomo::cli::Cli::try_parse_from(["cstomo", cmd, "--config", path.to_str().unwrap()]).unwrap();
            cstomo::cli::resolve_config(&cli).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        }
        seen += 1;
    }
    assert_eq!(seen, 3);
}
