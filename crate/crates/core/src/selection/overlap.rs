//! Eigenprojection overlaps, the Haar threshold `e_d`, rank selection and
//! spectral truncation.

use crate::error::{Error, Result};
use crate::linalg::{HermitianMatrix, Spectrum};

/// `M_j = |<v1_j | v2_j>|^2`, the Hilbert-Schmidt product of the `j`-th
/// rank-one eigenprojections. `j` counts from 1 (largest eigenvalue).
pub fn eigen_overlap(s1: &Spectrum, s2: &Spectrum, j: usize) -> Result<f64> {
    if s1.dim() != s2.dim() {
        return Err(Error::DimensionMismatch { expected: s1.dim(), found: s2.dim() });
    }
    if j == 0 || j > s1.dim() {
        return Err(Error::arg(format!("overlap index {j} outside 1..={}", s1.dim())));
    }
    Ok(column_overlap(s1, s2, j - 1))
}

fn column_overlap(s1: &Spectrum, s2: &Spectrum, col: usize) -> f64 {
    let a = s1.eigenvectors.column(col);
    let b = s2.eigenvectors.column(col);
    a.dotc(&b).norm_sqr().min(1.0)
}

/// `e_d = 1/d + sqrt(2/(d(d+1)) - 1/d^2)`: mean plus one standard deviation
/// of `|<psi|U|psi>|^2` for Haar-random `U`.
pub fn haar_threshold(d: usize) -> f64 {
    let d = d as f64;
    1.0 / d + (2.0 / (d * (d + 1.0)) - 1.0 / (d * d)).max(0.0).sqrt()
}

/// Mean of `M_j` over all unordered pairs of `spectra`; entry `j - 1` holds
/// the mean for index `j`.
pub fn mean_overlaps(spectra: &[Spectrum]) -> Result<Vec<f64>> {
    if spectra.len() < 2 {
        return Err(Error::arg(format!("need at least 2 spectra, got {}", spectra.len())));
    }
    let d = spectra[0].dim();
    if let Some(bad) = spectra.iter().find(|s| s.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: bad.dim() });
    }
    let mut sums = vec![0.0; d];
    let mut pairs = 0usize;
    for a in 0..spectra.len() {
        for b in a + 1..spectra.len() {
            for (j, s) in sums.iter_mut().enumerate() {
                *s += column_overlap(&spectra[a], &spectra[b], j);
            }
            pairs += 1;
        }
    }
    Ok(sums.into_iter().map(|s| s / pairs as f64).collect())
}

/// Largest `j` whose mean overlap exceeds `e_d`, or 1 if none does.
pub fn rank_from_overlaps(means: &[f64], d: usize) -> usize {
    let e = haar_threshold(d);
    means.iter().rposition(|&m| m > e).map_or(1, |j| j + 1)
}

/// `k = max { j : E(M_j) > e_d }` over all replica pairs, defaulting to 1.
pub fn select_rank(spectra: &[Spectrum], d: usize) -> Result<usize> {
    let means = mean_overlaps(spectra)?;
    if means.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: means.len() });
    }
    Ok(rank_from_overlaps(&means, d))
}

/// Normalization `c = 1 / sum_{j<=k} lambda_j` of the rank-`k` truncation.
pub fn truncation_normalization(s: &Spectrum, k: usize) -> Result<f64> {
    if k == 0 || k > s.dim() {
        return Err(Error::arg(format!("truncation rank {k} outside 1..={}", s.dim())));
    }
    let mass: f64 = s.eigenvalues[..k].iter().sum();
    if !(mass > 1e-14) {
        return Err(Error::Degenerate(format!("top-{k} eigenvalues carry no weight ({mass:e})")));
    }
    Ok(1.0 / mass)
}

/// `rho_k = c sum_{j<=k} lambda_j E_j` with `c` rescaling to unit trace.
pub fn truncate_state(s: &Spectrum, k: usize) -> Result<HermitianMatrix> {
    let c = truncation_normalization(s, k)?;
    let kept: Vec<f64> = s
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(j, &l)| if j < k { c * l.max(0.0) } else { 0.0 })
        .collect();
    Ok(s.reconstruct_with(&kept))
}

/// `E ||rho - rho_k||_F^2` over `truncated`.
pub fn mean_risk(truth: &HermitianMatrix, truncated: &[HermitianMatrix]) -> Result<f64> {
    if truncated.is_empty() {
        return Err(Error::arg("mean risk of an empty ensemble"));
    }
    let mut total = 0.0;
    for t in truncated {
        total += crate::linalg::frobenius_dist_sq(truth, t)?;
    }
    Ok(total / truncated.len() as f64)
}
