//! Trace-norm minimization: the smallest-trace PSD matrix whose residual
//! equals the expected shot noise.

use cstomo::codes::fidelity;
use cstomo::estimators::{ls_pg_estimate, tnm_estimate, EstimatorOptions};
use cstomo::linalg::{random_pure_vector, HermitianMatrix};
use cstomo::measurement::{expected_noise_level, frequencies_vector, random_settings, simulate_records, SamplingOperator};
use cstomo::rng::stream;

fn main() -> cstomo::Result<()> {
    let m = 100;
    let psi = random_pure_vector(16, &mut stream(3, &[0]));
    let op = SamplingOperator::new(random_settings(4, 32, &mut stream(3, &[1]))?);
    let y = frequencies_vector(&simulate_records(&HermitianMatrix::outer(&psi), &op, m, 4)?, op.ensemble())?;
    let opts = EstimatorOptions::default();

    let ls = ls_pg_estimate(&y, &op, &opts)?;
    let eps = expected_noise_level(&y, m).max(ls.residual);
    println!("noise level {:.5}, least-squares floor {:.5}", expected_noise_level(&y, m), ls.residual);
    let tnm = tnm_estimate(&y, &op, eps, &opts)?;
    println!("epsilon {eps:.5}: residual {:.5}, mu {:?}, raw trace {:.4}", tnm.residual, tnm.mu, tnm.raw_trace);
    println!("fidelity ls_pg {:.4}  tnm {:.4}", fidelity(&psi, &ls.rho_hat)?, fidelity(&psi, &tnm.rho_hat)?);

    match tnm_estimate(&y, &op, 0.5 * ls.residual, &opts) {
        Err(e) => println!("below the floor: {e}"),
        Ok(_) => println!("below the floor: unexpectedly feasible"),
    }
    Ok(())
}
