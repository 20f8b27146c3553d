//! The sampling operator `A`: outcome probabilities for a set of Pauli
//! settings, its adjoint, and the dense matrix it corresponds to.

use cstomo::linalg::{random_fixed_rank_state, HermitianMatrix};
use cstomo::measurement::{enumerate_settings, random_settings, DataVector, SamplingOperator};
use cstomo::rng::rng_from_seed;

fn main() -> cstomo::Result<()> {
    let mut rng = rng_from_seed(7);
    let op = SamplingOperator::new(random_settings(3, 5, &mut rng)?);
    let rho = random_fixed_rank_state(op.dim(), 2, &mut rng)?;
    let p = op.apply(&rho)?;
    for (s, block) in op.ensemble().iter().zip(p.blocks()) {
        let shown: Vec<String> = block.iter().map(|x| format!("{x:.3}")).collect();
        println!("{s}: [{}]  sum {:.12}", shown.join(" "), block.iter().sum::<f64>());
    }

    // <A(X), z> = <X, A'(z)>
    let z = DataVector::new((0..op.data_len()).map(|i| (i as f64).sin()).collect(), op.dim())?;
    let lhs = p.dot(&z);
    let rhs = rho.inner(&op.adjoint(&z)?);
    println!("adjoint identity: {lhs:.15} vs {rhs:.15}");

    let full = SamplingOperator::new(enumerate_settings(2)?);
    println!(
        "L=2, all {} settings: A is {:?}, Lipschitz constant of A'A ~ {:.4}",
        full.ensemble().len(),
        full.explicit_matrix()?.shape(),
        full.lipschitz_estimate(100)
    );
    let mixed = full.apply(&HermitianMatrix::maximally_mixed(4))?;
    println!("maximally mixed state gives uniform blocks: {:?}", mixed.block(0));
    Ok(())
}
