//! The command-line pipeline driven in-process: simulate `|0bar>`, reconstruct
//! it, and select a rank, all into a temporary output tree.

use cstomo::cli::main_with_args;

fn run(args: &[&str]) {
    let code = main_with_args(std::iter::once("cstomo").chain(args.iter().copied()));
    println!("cstomo {} -> exit {code}", args.join(" "));
    assert_eq!(code, 0);
}

fn main() {
    let root = std::env::temp_dir().join("cstomo_pipeline");
    let dir = |name: &str| root.join(name).to_string_lossy().into_owned();
    let (sim, est, sel) = (dir("sim"), dir("estimate"), dir("select"));
    let counts = format!("{sim}/counts.csv");
    let state = format!("{sim}/state.json");
    run(&["simulate", "--seed", "1", "--out", &sim, "--set", "simulate.num_qubits=7", "--set", "simulate.state=0bar",
          "--set", "simulate.n_settings=60", "--set", "simulate.shots=200"]);
    run(&["reconstruct", &counts, "--estimator", "grad", "--reference", &state, "--out", &est]);
    run(&["select-rank", &counts, "--set", "select_rank.replicas=4", "--reference", &state, "--out", &sel]);
    let read = |f: String| -> serde_json::Value { serde_json::from_str(&std::fs::read_to_string(f).unwrap()).unwrap() };
    let est_json = read(format!("{est}/estimate.json"));
    let report = read(format!("{sel}/threshold_report.json"));
    println!("grad rank-1 fidelity {}", est_json["fidelity"]);
    println!("selected rank {} of {}, e_d {}", report["selected_rank"], report["dim"], report["e_d"]);
    println!("fidelity of the truncated ls_pg estimate {}", report["fidelity_truncated"]);
}
