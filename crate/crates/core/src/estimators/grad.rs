//! GRAD: gradient descent on the factor `Q` of `rho = Q^dagger Q`.

use num_complex::Complex64;

use super::descent::{minimize, Composite, Evaluation};
use super::{check_data, numerical_rank, EstimateResult, EstimatorOptions};
use crate::error::{Error, Result};
use crate::linalg::{ginibre, ComplexMatrix, HermitianMatrix};
use crate::measurement::{DataVector, SamplingOperator};
use crate::rng;

/// `r x d` factor with `rho = Q^dagger Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorMatrix(pub ComplexMatrix);

impl FactorMatrix {
    pub fn new(q: ComplexMatrix) -> Result<Self> {
        if q.nrows() == 0 || q.nrows() > q.ncols() {
            return Err(Error::arg(format!(
                "factor must be r x d with 1 <= r <= d, got {}x{}",
                q.nrows(),
                q.ncols()
            )));
        }
        Ok(Self(q))
    }

    /// Complex Gaussian entries scaled so that `tr(Q^dagger Q) = 1`.
    pub fn random(rank: usize, dim: usize, seed: u64) -> Result<Self> {
        if rank == 0 || rank > dim {
            return Err(Error::arg(format!("rank {rank} must lie in 1..={dim}")));
        }
        let mut r = rng::rng_from_seed(seed);
        let g = ginibre(rank, dim, &mut r);
        let n = g.norm();
        Ok(Self(g / Complex64::new(n, 0.0)))
    }

    pub fn rank(&self) -> usize {
        self.0.nrows()
    }

    pub fn dim(&self) -> usize {
        self.0.ncols()
    }

    pub fn density(&self) -> HermitianMatrix {
        gram(&self.0)
    }
}

fn gram(q: &ComplexMatrix) -> HermitianMatrix {
    HermitianMatrix::symmetrized(q.adjoint() * q)
}

fn check_factor(q: &FactorMatrix, op: &SamplingOperator) -> Result<()> {
    if q.dim() != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), found: q.dim() });
    }
    Ok(())
}

/// `g(Q) = ||y - A(Q^dagger Q)||^2`.
pub fn grad_objective(q: &FactorMatrix, y: &DataVector, op: &SamplingOperator) -> Result<f64> {
    check_factor(q, op)?;
    check_data(y, op)?;
    Ok(op.apply(&q.density())?.sub(y).norm_sq())
}

/// `grad g(Q) = 4 Q A^dagger(A(Q^dagger Q) - y)`, for the real inner product
/// `Re tr(G^dagger dQ)`.
pub fn grad_gradient(q: &FactorMatrix, y: &DataVector, op: &SamplingOperator) -> Result<ComplexMatrix> {
    check_factor(q, op)?;
    check_data(y, op)?;
    let residual = op.apply(&q.density())?.sub(y);
    let back = op.adjoint(&residual)?;
    Ok((&q.0 * back.as_matrix()) * Complex64::new(4.0, 0.0))
}

struct FactoredLeastSquares<'a> {
    y: &'a DataVector,
    op: &'a SamplingOperator,
}

impl Composite for FactoredLeastSquares<'_> {
    type Cache = DataVector;

    fn evaluate(&self, q: &ComplexMatrix) -> Result<Evaluation<DataVector>> {
        let residual = self.op.apply(&gram(q))?.sub(self.y);
        Ok(Evaluation { smooth: residual.norm_sq(), cache: residual })
    }

    fn gradient(&self, q: &ComplexMatrix, residual: &DataVector) -> Result<ComplexMatrix> {
        let back = self.op.adjoint(residual)?;
        Ok((q * back.as_matrix()) * Complex64::new(4.0, 0.0))
    }

    fn prox(&self, z: ComplexMatrix, _alpha: f64) -> Result<(ComplexMatrix, f64)> {
        Ok((z, 0.0))
    }
}

/// GRAD estimate with rank cap `rank`, started from a random factor drawn
/// with `opts.init_seed`.
pub fn grad_estimate(
    y: &DataVector,
    op: &SamplingOperator,
    rank: usize,
    opts: &EstimatorOptions,
) -> Result<EstimateResult> {
    let q0 = FactorMatrix::random(rank, op.dim(), opts.init_seed)?;
    grad_estimate_from(y, op, q0, opts)
}

/// GRAD started from a given factor.
pub fn grad_estimate_from(
    y: &DataVector,
    op: &SamplingOperator,
    q0: FactorMatrix,
    opts: &EstimatorOptions,
) -> Result<EstimateResult> {
    opts.validate()?;
    check_data(y, op)?;
    check_factor(&q0, op)?;
    // curvature of g near tr(Q^dagger Q) = 1 is about 8 Lip(A^dagger A)
    let step = 1.0 / (16.0 * op.lipschitz_estimate(opts.power_iters).max(f64::MIN_POSITIVE));
    let problem = FactoredLeastSquares { y, op };
    let out = minimize(&problem, q0.0, 0.0, step, opts)?;
    let raw = gram(&out.x);
    let residual = op.apply(&raw)?.sub(y).norm_sq();
    let raw_trace = raw.trace();
    let raw_rank = numerical_rank(&raw)?;
    let rho_hat = raw.normalized().map_err(|_| {
        Error::Numerical("GRAD factor collapsed to zero; try a different init_seed".into())
    })?;
    Ok(EstimateResult {
        rho_hat,
        objective_trace: out.objective_trace,
        iterations: out.iterations,
        converged: out.converged,
        residual,
        raw_trace,
        raw_rank,
        collapsed: false,
        mu: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_fixed_rank_state;
    use crate::measurement::{enumerate_settings, random_settings};
    use crate::rng::rng_from_seed;

    #[test]
    fn zero_factor_and_exact_fit() {
        let mut r = rng_from_seed(1);
        let op = SamplingOperator::new(random_settings(2, 5, &mut r).unwrap());
        let y = op.apply(&random_fixed_rank_state(4, 1, &mut r).unwrap()).unwrap();
        let zero = FactorMatrix(ComplexMatrix::zeros(2, 4));
        assert_eq!(grad_gradient(&zero, &y, &op).unwrap().norm(), 0.0);
        assert!((grad_objective(&zero, &y, &op).unwrap() - y.norm_sq()).abs() < 1e-15);

        let q = FactorMatrix::random(2, 4, 3).unwrap();
        let exact = op.apply(&q.density()).unwrap();
        assert!(grad_objective(&q, &exact, &op).unwrap() < 1e-28);
        assert!(grad_gradient(&q, &exact, &op).unwrap().norm() < 1e-10);
    }

    #[test]
    fn maximally_mixed_fixed_point() {
        let op = SamplingOperator::new(enumerate_settings(2).unwrap());
        let y = op.apply(&HermitianMatrix::maximally_mixed(4)).unwrap();
        let res = grad_estimate(&y, &op, 4, &EstimatorOptions::default()).unwrap();
        let err = (res.rho_hat.as_matrix() - HermitianMatrix::maximally_mixed(4).as_matrix()).norm();
        assert!(err < 1e-6, "{err}");
        assert!(res.objective_trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn rejects_bad_rank() {
        let op = SamplingOperator::new(enumerate_settings(1).unwrap());
        let y = DataVector::zeros(3, 2);
        assert!(grad_estimate(&y, &op, 3, &EstimatorOptions::default()).is_err());
        assert!(grad_estimate(&y, &op, 0, &EstimatorOptions::default()).is_err());
    }
}
