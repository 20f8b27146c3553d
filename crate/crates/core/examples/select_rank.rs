//! Bootstrap rank selection on simulated data from a rank-2 state: mean
//! eigenprojection overlaps against `e_d`, the truncated estimate and its
//! distance to the truth.
//!
//!     cargo run --release --example select_rank -- parametric

use cstomo::estimators::{Estimator, EstimatorOptions};
use cstomo::linalg::{random_fixed_rank_state, trace_distance};
use cstomo::measurement::{enumerate_settings, frequencies_vector, simulate_records, SamplingOperator};
use cstomo::rng::stream;
use cstomo::selection::{identify_support, BootstrapMode, BootstrapSpec, SupportOptions};

fn main() -> cstomo::Result<()> {
    let mode: BootstrapMode = std::env::args().nth(1).as_deref().unwrap_or("parametric").parse()?;
    let m = 1000;
    let truth = random_fixed_rank_state(8, 2, &mut stream(4, &[0]))?;
    let op = SamplingOperator::new(enumerate_settings(3)?);
    let y = frequencies_vector(&simulate_records(&truth, &op, m, 5)?, op.ensemble())?;

    let cfg = SupportOptions {
        estimator: Estimator::LsPg,
        options: EstimatorOptions::default(),
        bootstrap: BootstrapSpec { mode, replicas: 20, shots_per_setting: m, seed: 6 },
        guta_eps: Some(0.05),
        workers: 1,
    };
    let a = identify_support(&y, &op, &cfg)?;
    let r = &a.report;
    println!("{} bootstrap, B = {}, e_d = {:.4}", mode.as_str(), r.bootstrap.replicas, r.e_d);
    println!("{:>3} {:>10} {:>8}", "j", "lambda_j", "M_j");
    for (j, (l, mj)) in r.eigenvalues.iter().zip(&r.mean_overlaps).enumerate() {
        let mark = if *mj > r.e_d { "  *" } else { "" };
        println!("{:>3} {l:>10.5} {mj:>8.4}{mark}", j + 1);
    }
    println!("selected rank {} (eigenvalue-cut baseline {:?})", r.selected_rank, r.guta_rank);
    println!(
        "trace distance to truth: estimate {:.4}, truncated {:.4}",
        trace_distance(&a.estimate.rho_hat, &truth)?,
        trace_distance(&a.truncated, &truth)?
    );
    Ok(())
}
