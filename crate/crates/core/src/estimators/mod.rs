//! State estimators: factored gradient least squares (GRAD), PSD-projected
//! least squares, the matrix Lasso, and trace-norm minimization.
//!
//! Every estimator returns a Hermitian, positive semidefinite, unit-trace
//! matrix. Trace renormalization happens once, after the iteration stops.

mod convex;
mod descent;
mod grad;
mod tnm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, HermitianMatrix};
use crate::measurement::{DataVector, SamplingOperator};

pub use convex::{eigen_soft_threshold, lasso_estimate, ls_pg_estimate};
pub use grad::{grad_estimate, grad_gradient, grad_objective, FactorMatrix};
pub use tnm::{tnm_estimate, TNM_RESIDUAL_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// Constant step scaled by the power-iteration estimate of `Lip(A^dagger A)`.
    Fixed,
    /// Barzilai-Borwein trial step with Armijo backtracking.
    Backtracking,
}

/// Options shared by the estimators. Keys of the `[estimator]` config table
/// are exactly these field names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorOptions {
    pub max_iters: usize,
    /// Stop when the relative objective decrease stays below `tol` for
    /// `patience` consecutive iterations.
    pub tol: f64,
    pub patience: usize,
    pub step_rule: StepRule,
    pub init_seed: u64,
    /// Lasso regularization weight.
    pub mu: f64,
    /// Residual level for trace-norm minimization.
    pub epsilon: f64,
    /// Keep Lasso iterates positive semidefinite.
    pub positive: bool,
    /// Power iterations for the Lipschitz estimate.
    pub power_iters: usize,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            tol: 1e-9,
            patience: 10,
            step_rule: StepRule::Backtracking,
            init_seed: 0,
            mu: 0.0,
            epsilon: 0.0,
            positive: true,
            power_iters: 50,
        }
    }
}

impl EstimatorOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::arg("max_iters must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::arg("tol must be positive"));
        }
        if self.patience == 0 {
            return Err(Error::arg("patience must be at least 1"));
        }
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return Err(Error::arg("mu must be finite and non-negative"));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::arg("epsilon must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct EstimateResult {
    /// Unit-trace PSD estimate.
    pub rho_hat: HermitianMatrix,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `||y - A(X)||^2` of the final iterate, before renormalization.
    pub residual: f64,
    /// Trace of the final iterate, before renormalization.
    pub raw_trace: f64,
    /// Rank (eigenvalues above 1e-10 of the largest) of the final iterate,
    /// before renormalization.
    pub raw_rank: usize,
    /// The iterate vanished (Lasso weight above the critical value); `rho_hat`
    /// is then the limiting state, the normalized top eigenprojection of
    /// `A^dagger(y)`.
    pub collapsed: bool,
    /// Lasso weight used by trace-norm minimization.
    pub mu: Option<f64>,
}

/// Reconstruction method selector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Estimator {
    Grad { rank: usize },
    LsPg,
    Lasso { mu: f64 },
    Tnm { epsilon: f64 },
}

/// Accepted estimator names.
pub const ESTIMATOR_NAMES: [&str; 4] = ["grad", "ls_pg", "lasso", "tnm"];

impl Estimator {
    /// Builds an estimator from its name; GRAD takes the rank cap `rank`,
    /// Lasso and trace-norm minimization take `opts.mu` and `opts.epsilon`.
    pub fn from_name(name: &str, rank: usize, opts: &EstimatorOptions) -> Result<Self> {
        match name {
            "grad" => Ok(Estimator::Grad { rank }),
            "ls_pg" => Ok(Estimator::LsPg),
            "lasso" => Ok(Estimator::Lasso { mu: opts.mu }),
            "tnm" => Ok(Estimator::Tnm { epsilon: opts.epsilon }),
            _ => Err(Error::arg(format!(
                "unknown estimator {name:?}; expected one of {}",
                ESTIMATOR_NAMES.join(", ")
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Estimator::Grad { .. } => "grad",
            Estimator::LsPg => "ls_pg",
            Estimator::Lasso { .. } => "lasso",
            Estimator::Tnm { .. } => "tnm",
        }
    }

    pub fn estimate(
        &self,
        y: &DataVector,
        op: &SamplingOperator,
        opts: &EstimatorOptions,
    ) -> Result<EstimateResult> {
        match *self {
            Estimator::Grad { rank } => grad_estimate(y, op, rank, opts),
            Estimator::LsPg => ls_pg_estimate(y, op, opts),
            Estimator::Lasso { mu } => lasso_estimate(y, op, mu, opts),
            Estimator::Tnm { epsilon } => tnm_estimate(y, op, epsilon, opts),
        }
    }
}

pub(crate) fn check_data(y: &DataVector, op: &SamplingOperator) -> Result<()> {
    if y.len() != op.data_len() {
        return Err(Error::DimensionMismatch { expected: op.data_len(), found: y.len() });
    }
    Ok(())
}

pub(crate) fn numerical_rank(x: &HermitianMatrix) -> Result<usize> {
    let s = herm_eig(x)?;
    let top = s.eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    if top == 0.0 {
        return Ok(0);
    }
    Ok(s.eigenvalues.iter().filter(|l| l.abs() > 1e-10 * top).count())
}

/// Normalized projector onto the top eigenspace of `A^dagger(y)`.
pub(crate) fn top_eigenprojection(y: &DataVector, op: &SamplingOperator) -> Result<HermitianMatrix> {
    let s = herm_eig(&op.adjoint(y)?)?;
    let top = s.eigenvalues[0];
    let scale = top.abs().max(1.0);
    let weights: Vec<f64> = s
        .eigenvalues
        .iter()
        .map(|&l| if top - l <= 1e-9 * scale { 1.0 } else { 0.0 })
        .collect();
    s.reconstruct_with(&weights).normalized()
}
