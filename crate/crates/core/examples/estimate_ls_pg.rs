//! Least squares over density matrices by projected gradient.

use cstomo::estimators::{ls_pg_estimate, EstimatorOptions};
use cstomo::linalg::{herm_eig, random_pure_vector, HermitianMatrix};
use cstomo::codes::fidelity;
use cstomo::measurement::{frequencies_vector, random_settings, simulate_records, SamplingOperator};
use cstomo::rng::stream;

fn main() -> cstomo::Result<()> {
    let psi = random_pure_vector(16, &mut stream(5, &[0]));
    let op = SamplingOperator::new(random_settings(4, 32, &mut stream(5, &[1]))?);
    let records = simulate_records(&HermitianMatrix::outer(&psi), &op, 100, 6)?;
    let y = frequencies_vector(&records, op.ensemble())?;

    let res = ls_pg_estimate(&y, &op, &EstimatorOptions::default())?;
    println!("iterations {} converged {}", res.iterations, res.converged);
    println!("residual {:.5}  raw rank {}", res.residual, res.raw_rank);
    println!("fidelity {:.4}", fidelity(&psi, &res.rho_hat)?);
    let eig = herm_eig(&res.rho_hat)?.eigenvalues;
    println!("top eigenvalues {:?}", &eig[..4]);
    Ok(())
}
