//! The nuclear-norm penalized fit for a sweep of `mu`; larger `mu` gives a
//! lower-rank estimate until it collapses onto the top eigenprojection.

use cstomo::codes::fidelity;
use cstomo::estimators::{lasso_estimate, EstimatorOptions};
use cstomo::linalg::{random_pure_vector, HermitianMatrix};
use cstomo::measurement::{frequencies_vector, random_settings, simulate_records, SamplingOperator};
use cstomo::rng::stream;

fn main() -> cstomo::Result<()> {
    let psi = random_pure_vector(16, &mut stream(9, &[0]));
    let op = SamplingOperator::new(random_settings(4, 24, &mut stream(9, &[1]))?);
    let y = frequencies_vector(&simulate_records(&HermitianMatrix::outer(&psi), &op, 100, 10)?, op.ensemble())?;
    let opts = EstimatorOptions::default();
    println!("{:>8} {:>9} {:>6} {:>9} {:>9}", "mu", "residual", "rank", "trace", "fidelity");
    for mu in [0.0, 0.01, 0.05, 0.2, 1.0, 5.0] {
        let res = lasso_estimate(&y, &op, mu, &opts)?;
        println!(
            "{mu:>8} {:>9.5} {:>6} {:>9.4} {:>9.4}{}",
            res.residual,
            res.raw_rank,
            res.raw_trace,
            fidelity(&psi, &res.rho_hat)?,
            if res.collapsed { "  (collapsed)" } else { "" }
        );
    }
    Ok(())
}
