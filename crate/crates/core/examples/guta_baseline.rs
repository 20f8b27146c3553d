//! The eigenvalue-cut baseline: `gamma(eps)` for a given number of copies,
//! the shifted and clipped spectrum, and the rank it keeps.

use cstomo::linalg::{herm_eig, HermitianMatrix};
use cstomo::selection::{guta_estimate_or_mixed, guta_gamma, threshold_spectrum};

fn main() -> cstomo::Result<()> {
    let d = 16;
    for n in [50u64, 810, 8100, 81_000] {
        println!("N = {n:>6}: gamma = {:.5}, cut 4 gamma = {:.5}", guta_gamma(d, n, 0.05)?, 4.0 * guta_gamma(d, n, 0.05)?);
    }

    let mut eig = vec![0.62, 0.25, 0.06, 0.03];
    eig.extend(std::iter::repeat_n(0.04 / 12.0, 12));
    let cut = 4.0 * guta_gamma(d, 81_000, 0.05)?;
    let kept = threshold_spectrum(&eig, cut)?;
    let shown: Vec<String> = kept.iter().take(5).map(|x| format!("{x:.4}")).collect();
    println!("spectrum after the cut at {cut:.4}: [{} ...]", shown.join(", "));

    let s = herm_eig(&HermitianMatrix::from_real_diagonal(&eig))?;
    for n in [50u64, 81_000] {
        let (_, rank) = guta_estimate_or_mixed(&s, n, 0.05)?;
        println!("N = {n}: kept rank {rank}");
    }
    Ok(())
}
