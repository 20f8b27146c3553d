//! Monotone first-order descent shared by all estimators.
//!
//! Minimizes `F(x) = f(x) + h(x)` with `f` smooth and `h` handled through its
//! proximal map (zero, the PSD indicator, or a nuclear norm). With the
//! backtracking rule each iteration starts from a Barzilai-Borwein step and
//! halves it until the Armijo condition
//! `F(x+) <= F(x) + c * (<grad f(x), x+ - x> + h(x+) - h(x))` holds with
//! `c = 1e-4`, so the objective trace never increases.

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

use super::{EstimatorOptions, StepRule};

pub(crate) const ARMIJO_SHRINK: f64 = 0.5;
pub(crate) const ARMIJO_DECREASE: f64 = 1e-4;
const MIN_STEP: f64 = 1e-30;
const MAX_STEP: f64 = 1e12;
/// Objective values below this count as an exact fit.
const EXACT_FIT: f64 = 1e-28;

/// Result of evaluating the smooth part at a point.
pub(crate) struct Evaluation<C> {
    pub smooth: f64,
    pub cache: C,
}

pub(crate) trait Composite {
    /// Anything the gradient can reuse from the objective evaluation.
    type Cache;

    fn evaluate(&self, x: &ComplexMatrix) -> Result<Evaluation<Self::Cache>>;
    fn gradient(&self, x: &ComplexMatrix, cache: &Self::Cache) -> Result<ComplexMatrix>;
    /// `prox_{alpha h}(z)` and `h` at the result.
    fn prox(&self, z: ComplexMatrix, alpha: f64) -> Result<(ComplexMatrix, f64)>;
}

pub(crate) struct DescentOutcome {
    pub x: ComplexMatrix,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Real inner product `Re tr(A^dagger B)`.
pub(crate) fn real_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

fn axpy(x: &ComplexMatrix, alpha: f64, g: &ComplexMatrix) -> ComplexMatrix {
    let mut out = x.clone();
    out.iter_mut().zip(g.iter()).for_each(|(o, gi)| *o -= gi * alpha);
    out
}

/// Runs the descent from `x0` (which should already satisfy the constraint
/// encoded by `h`, with `h0 = h(x0)`). `fixed_step` is used as the step for
/// [`StepRule::Fixed`] and as the first trial step otherwise.
pub(crate) fn minimize<P: Composite>(
    problem: &P,
    x0: ComplexMatrix,
    h0: f64,
    fixed_step: f64,
    opts: &EstimatorOptions,
) -> Result<DescentOutcome> {
    let mut x = x0;
    let eval = problem.evaluate(&x)?;
    let mut h = h0;
    let mut value = eval.smooth + h;
    if !value.is_finite() {
        return Err(Error::Diverged { iteration: 0, objective: value });
    }
    let mut grad = problem.gradient(&x, &eval.cache)?;
    let mut trace = vec![value];
    let mut alpha = fixed_step;
    let mut prev: Option<(ComplexMatrix, ComplexMatrix)> = None;
    let mut quiet = 0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iters {
        if value <= EXACT_FIT {
            converged = true;
            break;
        }
        iterations += 1;

        let (x_new, h_new, eval_new) = match opts.step_rule {
            StepRule::Fixed => {
                let (xn, hn) = problem.prox(axpy(&x, fixed_step, &grad), fixed_step)?;
                let en = problem.evaluate(&xn)?;
                (xn, hn, en)
            }
            StepRule::Backtracking => {
                if let Some((px, pg)) = &prev {
                    let s = &x - px;
                    let yd = &grad - pg;
                    let sy = real_inner(&s, &yd);
                    let ss = real_inner(&s, &s);
                    alpha = if sy > 0.0 && ss > 0.0 {
                        (ss / sy).clamp(MIN_STEP, MAX_STEP)
                    } else {
                        (alpha * 2.0).min(MAX_STEP)
                    };
                }
                let mut accepted = None;
                while alpha >= MIN_STEP {
                    let (xn, hn) = problem.prox(axpy(&x, alpha, &grad), alpha)?;
                    let en = problem.evaluate(&xn)?;
                    let model = real_inner(&grad, &(&xn - &x)) + hn - h;
                    let trial = en.smooth + hn;
                    if trial.is_finite() && trial <= value + ARMIJO_DECREASE * model {
                        accepted = Some((xn, hn, en));
                        break;
                    }
                    alpha *= ARMIJO_SHRINK;
                }
                match accepted {
                    Some(a) => a,
                    None => {
                        // no decrease at any step length: stationary to working precision
                        converged = true;
                        iterations -= 1;
                        break;
                    }
                }
            }
        };

        let new_value = eval_new.smooth + h_new;
        if !new_value.is_finite() {
            return Err(Error::Diverged { iteration: iterations, objective: new_value });
        }
        let rel = (value - new_value) / value.abs().max(f64::MIN_POSITIVE);
        let new_grad = problem.gradient(&x_new, &eval_new.cache)?;
        prev = Some((std::mem::replace(&mut x, x_new), std::mem::replace(&mut grad, new_grad)));
        h = h_new;
        value = new_value;
        trace.push(value);

        if rel.abs() < opts.tol {
            quiet += 1;
            if quiet >= opts.patience {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    Ok(DescentOutcome { x, objective_trace: trace, iterations, converged })
}
