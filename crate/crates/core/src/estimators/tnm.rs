//! Trace-norm minimization `min tr(X)` over `X >= 0` with
//! `||y - A(X)||^2 <= epsilon`, reached through the PSD Lasso by bisection
//! on `mu`.

use super::convex::{finish, smooth_lipschitz, solve_raw, RawSolve};
use super::{check_data, EstimateResult, EstimatorOptions};
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, HermitianMatrix};
use crate::measurement::{DataVector, SamplingOperator};

/// Relative residual tolerance of the returned estimate.
pub const TNM_RESIDUAL_TOL: f64 = 0.05;
/// The bisection keeps going until it is this close, relative to `epsilon`.
const TARGET_TOL: f64 = 1e-3;
const MAX_BISECTIONS: usize = 80;
/// Lower end of the `mu` bracket relative to the critical weight.
const MU_FLOOR: f64 = 1e-10;

fn within(residual: f64, epsilon: f64, tol: f64) -> bool {
    (residual - epsilon).abs() <= tol * epsilon
}

/// Bisects `mu` (on a log scale, warm-starting each Lasso solve from the
/// previous iterate) until the residual matches `epsilon`; the result is
/// within 5 percent of `epsilon` and usually within 0.1 percent.
///
/// When the PSD least-squares floor is already within tolerance the least
/// squares solution is returned; when it lies above `epsilon` by more than the
/// tolerance the call fails with [`Error::Infeasible`]. If even the zero
/// matrix meets `epsilon`, the result is the `mu -> infinity` limit.
pub fn tnm_estimate(
    y: &DataVector,
    op: &SamplingOperator,
    epsilon: f64,
    opts: &EstimatorOptions,
) -> Result<EstimateResult> {
    opts.validate()?;
    check_data(y, op)?;
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::arg(format!("epsilon must be positive, got {epsilon}")));
    }
    let lip = smooth_lipschitz(op, opts);
    let start = HermitianMatrix::maximally_mixed(op.dim());
    let floor = solve_raw(y, op, 0.0, true, start, lip, opts)?;
    if floor.residual > (1.0 + TNM_RESIDUAL_TOL) * epsilon {
        return Err(Error::Infeasible { epsilon, floor: floor.residual });
    }
    if floor.residual >= (1.0 - TARGET_TOL) * epsilon {
        return finish(floor, y, op, Some(0.0));
    }

    // At mu >= mu_c the PSD Lasso solution is zero with residual ||y||^2.
    let mu_c = 2.0 * herm_eig(&op.adjoint(y)?)?.eigenvalues[0].max(0.0);
    if mu_c == 0.0 || y.norm_sq() <= (1.0 + TNM_RESIDUAL_TOL) * epsilon {
        let zero = RawSolve {
            x: HermitianMatrix::zeros(op.dim()),
            residual: y.norm_sq(),
            objective_trace: floor.objective_trace,
            iterations: floor.iterations,
            converged: true,
        };
        return finish(zero, y, op, Some(mu_c));
    }

    let (mut lo, mut hi) = ((mu_c * MU_FLOOR).ln(), mu_c.ln());
    let mut warm = floor.x.clone();
    let mut best: Option<(f64, RawSolve)> = None;
    let mut total_iters = floor.iterations;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let mu = mid.exp();
        let raw = solve_raw(y, op, mu, true, warm.clone(), lip, opts)?;
        total_iters += raw.iterations;
        let residual = raw.residual;
        if within(residual, epsilon, TARGET_TOL) {
            best = Some((mu, raw));
            break;
        }
        if residual < epsilon {
            lo = mid;
            warm = raw.x.clone();
        } else {
            hi = mid;
        }
        let closer = best.as_ref().is_none_or(|(_, b)| (b.residual - epsilon).abs() > (residual - epsilon).abs());
        if closer {
            best = Some((mu, raw));
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let (mu, mut raw) = best.expect("at least one bisection step");
    if !within(raw.residual, epsilon, TNM_RESIDUAL_TOL) {
        return Err(Error::Numerical(format!(
            "trace-norm bisection stalled at residual {} for epsilon {epsilon}",
            raw.residual
        )));
    }
    raw.iterations = total_iters;
    finish(raw, y, op, Some(mu))
}
