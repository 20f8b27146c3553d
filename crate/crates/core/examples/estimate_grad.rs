//! Factored gradient descent `rho = Q^dagger Q` with a rank cap, compared
//! across caps.

use cstomo::codes::fidelity;
use cstomo::estimators::{grad_estimate, EstimatorOptions};
use cstomo::linalg::{random_pure_vector, HermitianMatrix};
use cstomo::measurement::{frequencies_vector, random_settings, simulate_records, SamplingOperator};
use cstomo::rng::stream;

fn main() -> cstomo::Result<()> {
    let psi = random_pure_vector(32, &mut stream(21, &[0]));
    let rho = HermitianMatrix::outer(&psi);
    let op = SamplingOperator::new(random_settings(5, 40, &mut stream(21, &[1]))?);
    let y = frequencies_vector(&simulate_records(&rho, &op, 200, 22)?, op.ensemble())?;
    for rank in [1, 2, 4, 32] {
        let opts = EstimatorOptions { init_seed: 23, ..Default::default() };
        let res = grad_estimate(&y, &op, rank, &opts)?;
        println!(
            "rank cap {rank:>2}: fidelity {:.4}  residual {:.5}  iterations {:>5}  converged {}",
            fidelity(&psi, &res.rho_hat)?,
            res.residual,
            res.iterations,
            res.converged
        );
    }
    Ok(())
}
