//! Eigenvalue thresholding at `4 gamma(eps)` with a uniform shift back to
//! unit trace.

use crate::error::{Error, Result};
use crate::linalg::{HermitianMatrix, Spectrum};

/// `gamma(eps) = sqrt((2d / N) log(2d / eps))`.
pub fn guta_gamma(d: usize, total_copies: u64, eps: f64) -> Result<f64> {
    if total_copies == 0 {
        return Err(Error::arg("total copy count N must be at least 1"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::arg(format!("eps must lie in (0, 1), got {eps}")));
    }
    let two_d = 2.0 * d as f64;
    Ok((two_d / total_copies as f64 * (two_d / eps).ln()).sqrt())
}

/// Thresholded spectrum: eigenvalues below `cut` are zeroed and the survivors
/// shifted by a common amount to sum to one, clipping any pushed below zero
/// and re-shifting the rest until nothing changes.
pub fn threshold_spectrum(eigenvalues: &[f64], cut: f64) -> Result<Vec<f64>> {
    let mut alive: Vec<bool> = eigenvalues.iter().map(|&l| l >= cut).collect();
    if !alive.iter().any(|&a| a) {
        return Err(Error::Degenerate(format!(
            "all {} eigenvalues fall below the cut {cut}",
            eigenvalues.len()
        )));
    }
    loop {
        let count = alive.iter().filter(|&&a| a).count();
        let mass: f64 = eigenvalues.iter().zip(&alive).filter(|(_, &a)| a).map(|(l, _)| l).sum();
        let shift = (1.0 - mass) / count as f64;
        let mut changed = false;
        for (l, a) in eigenvalues.iter().zip(alive.iter_mut()) {
            if *a && l + shift < 0.0 {
                *a = false;
                changed = true;
            }
        }
        if !changed {
            return Ok(eigenvalues
                .iter()
                .zip(&alive)
                .map(|(&l, &a)| if a { l + shift } else { 0.0 })
                .collect());
        }
    }
}

/// Thresholded estimate for a spectrum computed from `N = total_copies`
/// prepared states. Fails with [`Error::Degenerate`] when every eigenvalue
/// falls below `4 gamma`.
pub fn guta_threshold_estimate(s: &Spectrum, total_copies: u64, eps: f64, d: usize) -> Result<HermitianMatrix> {
    if s.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: s.dim() });
    }
    let cut = 4.0 * guta_gamma(d, total_copies, eps)?;
    Ok(s.reconstruct_with(&threshold_spectrum(&s.eigenvalues, cut)?))
}

/// Rank of the thresholded estimate.
pub fn guta_rank(s: &Spectrum, total_copies: u64, eps: f64) -> Result<usize> {
    let cut = 4.0 * guta_gamma(s.dim(), total_copies, eps)?;
    Ok(threshold_spectrum(&s.eigenvalues, cut)?.iter().filter(|&&l| l > 0.0).count())
}

/// Like [`guta_threshold_estimate`], but a spectrum with no survivors is
/// shifted as a whole to `I / d` (rank `d`) instead of failing. Used where a
/// rank must be recorded for every trial.
pub fn guta_estimate_or_mixed(s: &Spectrum, total_copies: u64, eps: f64) -> Result<(HermitianMatrix, usize)> {
    let d = s.dim();
    match guta_threshold_estimate(s, total_copies, eps, d) {
        Ok(rho) => {
            let cut = 4.0 * guta_gamma(d, total_copies, eps)?;
            let rank = threshold_spectrum(&s.eigenvalues, cut)?.iter().filter(|&&l| l > 0.0).count();
            Ok((rho, rank))
        }
        Err(Error::Degenerate(_)) => Ok((HermitianMatrix::maximally_mixed(d), d)),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::herm_eig;

    #[test]
    fn gamma_value() {
        let g = guta_gamma(16, 8100, 0.05).unwrap();
        let oracle = ((32.0f64 / 8100.0) * (640.0f64).ln()).sqrt();
        assert!((g - oracle).abs() < 1e-15);
        assert!((g - 0.1597).abs() < 1e-4);
        assert!((4.0 * g - 0.6390).abs() < 1e-4);
        assert!(guta_gamma(16, 0, 0.05).is_err());
        assert!(guta_gamma(16, 10, 1.0).is_err());
    }

    #[test]
    fn shift_and_clip() {
        let v = threshold_spectrum(&[0.5, 0.3, 0.1, 0.1], 0.2).unwrap();
        assert!((v[0] - 0.6).abs() < 1e-15 && (v[1] - 0.4).abs() < 1e-15);
        assert_eq!(&v[2..], &[0.0, 0.0]);
        // shift of -0.5 drives the smallest survivor negative
        let v = threshold_spectrum(&[1.2, 0.6, 0.2], 0.1).unwrap();
        assert_eq!(v[2], 0.0);
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(v.iter().all(|&l| l >= 0.0));
        assert!(matches!(threshold_spectrum(&[0.1, 0.1], 0.5), Err(Error::Degenerate(_))));
    }

    #[test]
    fn pure_state_unchanged() {
        let mut diag = vec![0.0; 16];
        diag[0] = 1.0;
        let rho = HermitianMatrix::from_real_diagonal(&diag);
        let s = herm_eig(&rho).unwrap();
        let out = guta_threshold_estimate(&s, 8100, 0.05, 16).unwrap();
        assert!((out.as_matrix() - rho.as_matrix()).norm() < 1e-14);
        assert_eq!(guta_rank(&s, 8100, 0.05).unwrap(), 1);
        // N = 50 puts the cut above 1
        assert!(matches!(guta_rank(&s, 50, 0.05), Err(Error::Degenerate(_))));
        let (mixed, rank) = guta_estimate_or_mixed(&s, 50, 0.05).unwrap();
        assert_eq!(rank, 16);
        assert!((mixed.as_matrix() - HermitianMatrix::maximally_mixed(16).as_matrix()).norm() < 1e-15);
    }
}
