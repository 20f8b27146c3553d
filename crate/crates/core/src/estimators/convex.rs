//! Convex estimators on the full matrix `X`: PSD-projected least squares and
//! the matrix Lasso (proximal gradient with eigenvalue soft-thresholding).

use super::descent::{minimize, Composite, Evaluation};
use super::{check_data, numerical_rank, top_eigenprojection, EstimateResult, EstimatorOptions};
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, psd_project, ComplexMatrix, HermitianMatrix};
use crate::measurement::{DataVector, SamplingOperator};

/// Proximal map of `t ||X||_*` over Hermitian matrices: eigenvalues
/// `l -> sign(l) max(|l| - t, 0)`, or `max(l - t, 0)` when `positive` also
/// imposes `X >= 0`. Returns the result and its nuclear norm.
pub fn eigen_soft_threshold(h: &HermitianMatrix, t: f64, positive: bool) -> Result<(HermitianMatrix, f64)> {
    let s = herm_eig(h)?;
    let shrunk: Vec<f64> = s
        .eigenvalues
        .iter()
        .map(|&l| {
            if positive {
                (l - t).max(0.0)
            } else {
                l.signum() * (l.abs() - t).max(0.0)
            }
        })
        .collect();
    let nuclear = shrunk.iter().map(|l| l.abs()).sum();
    Ok((s.reconstruct_with(&shrunk), nuclear))
}

struct LeastSquares<'a> {
    y: &'a DataVector,
    op: &'a SamplingOperator,
    /// Nuclear-norm weight; zero gives plain PSD least squares.
    mu: f64,
    positive: bool,
}

impl Composite for LeastSquares<'_> {
    type Cache = DataVector;

    fn evaluate(&self, x: &ComplexMatrix) -> Result<Evaluation<DataVector>> {
        let residual = self.op.apply(&HermitianMatrix::symmetrized(x.clone()))?.sub(self.y);
        Ok(Evaluation { smooth: residual.norm_sq(), cache: residual })
    }

    fn gradient(&self, _x: &ComplexMatrix, residual: &DataVector) -> Result<ComplexMatrix> {
        Ok(self.op.adjoint(residual)?.into_matrix() * num_complex::Complex64::new(2.0, 0.0))
    }

    fn prox(&self, z: ComplexMatrix, alpha: f64) -> Result<(ComplexMatrix, f64)> {
        let z = HermitianMatrix::symmetrized(z);
        if self.mu == 0.0 {
            if self.positive {
                return Ok((psd_project(&z)?.into_matrix(), 0.0));
            }
            return Ok((z.into_matrix(), 0.0));
        }
        let (x, nuclear) = eigen_soft_threshold(&z, self.mu * alpha, self.positive)?;
        Ok((x.into_matrix(), self.mu * nuclear))
    }
}

/// Final iterate of a convex solve, before renormalization.
pub(crate) struct RawSolve {
    pub x: HermitianMatrix,
    pub residual: f64,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) fn solve_raw(
    y: &DataVector,
    op: &SamplingOperator,
    mu: f64,
    positive: bool,
    x0: HermitianMatrix,
    lip: f64,
    opts: &EstimatorOptions,
) -> Result<RawSolve> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::arg(format!("mu must be finite and non-negative, got {mu}")));
    }
    if x0.dim() != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), found: x0.dim() });
    }
    let problem = LeastSquares { y, op, mu, positive };
    let (x0, h0) = problem.prox(x0.into_matrix(), 0.0)?;
    let out = minimize(&problem, x0, h0, 1.0 / lip, opts)?;
    let x = HermitianMatrix::symmetrized(out.x);
    let residual = op.apply(&x)?.sub(y).norm_sq();
    Ok(RawSolve {
        x,
        residual,
        objective_trace: out.objective_trace,
        iterations: out.iterations,
        converged: out.converged,
    })
}

/// Gradient Lipschitz constant of `||y - A(X)||^2`.
pub(crate) fn smooth_lipschitz(op: &SamplingOperator, opts: &EstimatorOptions) -> f64 {
    2.0 * op.lipschitz_estimate(opts.power_iters).max(f64::MIN_POSITIVE)
}

/// Renormalizes a raw solve. A vanished iterate is replaced by the limiting
/// state, the normalized top eigenprojection of `A^dagger(y)`.
pub(crate) fn finish(raw: RawSolve, y: &DataVector, op: &SamplingOperator, mu: Option<f64>) -> Result<EstimateResult> {
    let raw_trace = raw.x.trace();
    let raw_rank = numerical_rank(&raw.x)?;
    let positive_part = psd_project(&raw.x)?;
    let (rho_hat, collapsed) = if positive_part.trace() > 1e-14 {
        (positive_part.normalized()?, false)
    } else {
        (top_eigenprojection(y, op)?, true)
    };
    Ok(EstimateResult {
        rho_hat,
        objective_trace: raw.objective_trace,
        iterations: raw.iterations,
        converged: raw.converged,
        residual: raw.residual,
        raw_trace,
        raw_rank,
        collapsed,
        mu,
    })
}

/// Least squares under the constraint `X >= 0`, by projected gradient from
/// `I / d`.
pub fn ls_pg_estimate(y: &DataVector, op: &SamplingOperator, opts: &EstimatorOptions) -> Result<EstimateResult> {
    opts.validate()?;
    check_data(y, op)?;
    let lip = smooth_lipschitz(op, opts);
    let raw = solve_raw(y, op, 0.0, true, HermitianMatrix::maximally_mixed(op.dim()), lip, opts)?;
    finish(raw, y, op, None)
}

/// Matrix Lasso `min ||y - A(X)||^2 + mu ||X||_*` over Hermitian `X`
/// (positive semidefinite when `opts.positive`), from `I / d`.
pub fn lasso_estimate(
    y: &DataVector,
    op: &SamplingOperator,
    mu: f64,
    opts: &EstimatorOptions,
) -> Result<EstimateResult> {
    opts.validate()?;
    check_data(y, op)?;
    let lip = smooth_lipschitz(op, opts);
    let raw = solve_raw(y, op, mu, opts.positive, HermitianMatrix::maximally_mixed(op.dim()), lip, opts)?;
    finish(raw, y, op, Some(mu))
}
