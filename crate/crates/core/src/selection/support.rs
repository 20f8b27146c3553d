//! The full support-identification pipeline: estimate, bootstrap, re-estimate,
//! compare eigenprojections, truncate.

use serde::{Deserialize, Serialize};

use super::bootstrap::{bootstrap_replica, source_probabilities, BootstrapMode, BootstrapSource, BootstrapSpec};
use super::bootstrap::{PROBABILITY_ENTRY_TOL, PROBABILITY_SUM_TOL};
use super::guta::guta_estimate_or_mixed;
use super::overlap::{haar_threshold, mean_overlaps, rank_from_overlaps, truncate_state, truncation_normalization};
use crate::error::Result;
use crate::estimators::{EstimateResult, Estimator, EstimatorOptions};
use crate::linalg::{herm_eig, DenseMatrixRecord, HermitianMatrix, Spectrum};
use crate::measurement::{DataVector, SamplingOperator};
use crate::parallel::map_indexed;

/// Eigenvalues below this fraction of the largest count as zero.
pub const NULL_SPACE_REL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ThresholdReport {
    pub dim: usize,
    pub estimator: String,
    pub bootstrap: BootstrapSpec,
    /// Spectrum of the estimate from the original data, descending.
    pub eigenvalues: Vec<f64>,
    /// `mean_overlaps[j - 1]` is the mean of `M_j` over all replica pairs.
    pub mean_overlaps: Vec<f64>,
    pub e_d: f64,
    pub selected_rank: usize,
    /// Number of eigenvalues of the estimate above `1e-10` of the largest;
    /// `selected_rank` never exceeds it.
    pub estimate_rank: usize,
    /// `c` in `rho_k = c sum_{j<=k} lambda_j E_j`.
    pub normalization: f64,
    pub guta_rank: Option<usize>,
    pub guta_eps: Option<f64>,
    /// `N = n m` used by the eigenvalue-cut baseline.
    pub guta_total_copies: Option<u64>,
    /// Indices `j` (from 1) where `lambda_j` and `lambda_{j+1}` of the
    /// estimate or of some replica are closer than 1e-9; `M_j` depends on the
    /// eigenbasis convention there.
    pub degenerate_indices: Vec<usize>,
    /// Every index passed the threshold: replicas barely differ.
    pub overfit_warning: bool,
    pub truncated_state: DenseMatrixRecord,
}

pub struct SupportAnalysis {
    pub estimate: EstimateResult,
    pub spectrum: Spectrum,
    pub replica_spectra: Vec<Spectrum>,
    pub truncated: HermitianMatrix,
    pub report: ThresholdReport,
}

#[derive(Clone, Debug)]
pub struct SupportOptions {
    pub estimator: Estimator,
    pub options: EstimatorOptions,
    pub bootstrap: BootstrapSpec,
    /// Also run the eigenvalue-cut baseline at this `eps`.
    pub guta_eps: Option<f64>,
    pub workers: usize,
}

/// Estimates the state from `y`, reconstructs `B` bootstrap replicas, and
/// keeps the eigenprojections whose mean replica overlap beats `e_d`.
pub fn identify_support(y: &DataVector, op: &SamplingOperator, cfg: &SupportOptions) -> Result<SupportAnalysis> {
    cfg.bootstrap.validate()?;
    let estimate = cfg.estimator.estimate(y, op, &cfg.options)?;
    let source = match cfg.bootstrap.mode {
        BootstrapMode::Parametric => BootstrapSource::State(&estimate.rho_hat),
        BootstrapMode::NonParametric => BootstrapSource::Frequencies(y),
    };
    let p = source_probabilities(source, op, cfg.bootstrap.mode)?;
    p.check_probabilities(PROBABILITY_ENTRY_TOL, PROBABILITY_SUM_TOL)?;
    let replica_spectra = map_indexed(cfg.workers, cfg.bootstrap.replicas, |b| {
        let yb = bootstrap_replica(&p, op, &cfg.bootstrap, b)?;
        herm_eig(&cfg.estimator.estimate(&yb, op, &cfg.options)?.rho_hat)
    })?;
    let spectrum = herm_eig(&estimate.rho_hat)?;
    let total_copies = op.ensemble().len() as u64 * cfg.bootstrap.shots_per_setting;
    let guta = match cfg.guta_eps {
        Some(eps) => Some(guta_estimate_or_mixed(&spectrum, total_copies, eps)?.1),
        None => None,
    };
    summarize(estimate, spectrum, replica_spectra, cfg, guta, total_copies)
}

fn summarize(
    estimate: EstimateResult,
    spectrum: Spectrum,
    replica_spectra: Vec<Spectrum>,
    cfg: &SupportOptions,
    guta: Option<usize>,
    total_copies: u64,
) -> Result<SupportAnalysis> {
    let d = spectrum.dim();
    let means = mean_overlaps(&replica_spectra)?;
    // Eigenvectors past the estimate's rank span an exactly degenerate null
    // space; their rank-one split is arbitrary and truncating there changes
    // nothing, so the search stops at the numerical rank.
    let top = spectrum.eigenvalues[0].abs();
    let estimate_rank = spectrum.rank_above(NULL_SPACE_REL * top).max(1);
    let k = rank_from_overlaps(&means[..estimate_rank], d);
    let normalization = truncation_normalization(&spectrum, k)?;
    let truncated = truncate_state(&spectrum, k)?;
    let mut degenerate: Vec<usize> = std::iter::once(&spectrum)
        .chain(replica_spectra.iter())
        .flat_map(|s| s.degenerate_pairs())
        .map(|j| j + 1)
        .collect();
    degenerate.sort_unstable();
    degenerate.dedup();
    let report = ThresholdReport {
        dim: d,
        estimator: cfg.estimator.name().to_string(),
        bootstrap: cfg.bootstrap.clone(),
        eigenvalues: spectrum.eigenvalues.clone(),
        mean_overlaps: means,
        e_d: haar_threshold(d),
        selected_rank: k,
        estimate_rank,
        normalization,
        guta_rank: guta,
        guta_eps: cfg.guta_eps,
        guta_total_copies: cfg.guta_eps.map(|_| total_copies),
        degenerate_indices: degenerate,
        overfit_warning: k == d,
        truncated_state: DenseMatrixRecord::from_matrix(truncated.as_matrix()),
    };
    Ok(SupportAnalysis { estimate, spectrum, replica_spectra, truncated, report })
}
