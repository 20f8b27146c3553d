//! Dense complex linear algebra for density matrices.
//!
//! Everything here works on `nalgebra` dense matrices of `Complex64`. The
//! dimensions in play are small (at most 2^7 = 128), so plain O(d^3)
//! routines are used throughout.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense complex matrix, column-major storage.
pub type ComplexMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type ComplexVector = DVector<Complex64>;

/// Eigenvalues closer than this are treated as one degenerate cluster.
pub const DEGENERACY_GAP: f64 = 1e-9;

const HERMITIAN_TOL: f64 = 1e-9;
const EIG_MAX_SWEEPS: usize = 10_000;

/// A Hermitian matrix. Construction symmetrizes the input, so the stored
/// entries satisfy `H = H^dagger` exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Validates squareness, finiteness and Hermiticity (to a relative
    /// tolerance of 1e-9), then symmetrizes.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::arg(format!(
                "matrix is not square: {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical("matrix has non-finite entries".into()));
        }
        let scale = m.norm().max(1.0);
        let skew = (&m - m.adjoint()).norm();
        if skew > HERMITIAN_TOL * scale {
            return Err(Error::arg(format!("matrix is not Hermitian (skew norm {skew:e})")));
        }
        Ok(Self::symmetrized(m))
    }

    /// Hermitian part `(M + M^dagger) / 2` of a square matrix.
    pub fn symmetrized(m: ComplexMatrix) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        let h = (&m + m.adjoint()).scale(0.5);
        HermitianMatrix(h)
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianMatrix(ComplexMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        HermitianMatrix(ComplexMatrix::identity(dim, dim))
    }

    /// The maximally mixed state `I / d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self::identity(dim) * (1.0 / dim as f64)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        let mut m = ComplexMatrix::zeros(d, d);
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        HermitianMatrix(m)
    }

    /// Rank-one projector `|psi><psi|` (not normalized).
    pub fn outer(psi: &ComplexVector) -> Self {
        HermitianMatrix::symmetrized(psi * psi.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    /// Real Hilbert-Schmidt inner product `tr(A B)`.
    pub fn inner(&self, other: &HermitianMatrix) -> f64 {
        // tr(A B) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a * b.conj()).re)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// `<psi| H |psi>` for a column vector `psi`.
    pub fn expectation(&self, psi: &ComplexVector) -> f64 {
        (psi.adjoint() * &self.0 * psi)[(0, 0)].re
    }

    /// Returns `self / tr(self)`.
    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if !(t.abs() > f64::MIN_POSITIVE) || !t.is_finite() {
            return Err(Error::Degenerate(format!("cannot normalize matrix with trace {t:e}")));
        }
        Ok(self.clone() * (1.0 / t))
    }

    /// `tr(H^2)`, the purity for states.
    pub fn purity(&self) -> f64 {
        self.inner(self)
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(&self.0 - &rhs.0)
    }
}

impl Mul<f64> for HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(mut self, rhs: f64) -> HermitianMatrix {
        self.0.iter_mut().for_each(|z| *z *= rhs);
        self
    }
}

/// Eigendecomposition `H = V diag(lambda) V^dagger` with eigenvalues sorted
/// in descending order.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, j: usize) -> ComplexVector {
        self.eigenvectors.column(j).into_owned()
    }

    /// `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> HermitianMatrix {
        self.reconstruct_with(&self.eigenvalues)
    }

    /// `V diag(values) V^dagger` with replacement eigenvalues.
    pub fn reconstruct_with(&self, values: &[f64]) -> HermitianMatrix {
        let d = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for (j, &v) in values.iter().enumerate().take(d) {
            scaled.column_mut(j).scale_mut(v);
        }
        HermitianMatrix::symmetrized(scaled * self.eigenvectors.adjoint())
    }

    /// Indices `j` (0-based) where eigenvalue `j` and `j + 1` are closer than
    /// [`DEGENERACY_GAP`].
    pub fn degenerate_pairs(&self) -> Vec<usize> {
        self.eigenvalues
            .windows(2)
            .enumerate()
            .filter(|(_, w)| (w[0] - w[1]).abs() < DEGENERACY_GAP)
            .map(|(j, _)| j)
            .collect()
    }

    /// Number of eigenvalues strictly above `tol`.
    pub fn rank_above(&self, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l > tol).count()
    }
}

fn lexicographic_abs_desc(a: &ComplexVector, b: &ComplexVector) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match y.norm().partial_cmp(&x.norm()).unwrap_or(Ordering::Equal) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Rotate the global phase so the first entry of (near-)maximal modulus is
/// real and positive.
fn fix_phase(v: &mut ComplexVector) {
    let max = v.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if max == 0.0 {
        return;
    }
    if let Some(pivot) = v.iter().find(|z| z.norm() >= max * (1.0 - 1e-12)).copied() {
        let phase = pivot.conj() / pivot.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
}

/// Hermitian eigendecomposition with descending eigenvalues.
///
/// Inside a numerically degenerate cluster (consecutive gaps below
/// [`DEGENERACY_GAP`]) eigenvectors are ordered by descending lexicographic
/// comparison of their absolute entries. Each eigenvector's phase is fixed
/// so that its first largest-modulus entry is real positive.
pub fn herm_eig(h: &HermitianMatrix) -> Result<Spectrum> {
    let d = h.dim();
    if d == 0 {
        return Err(Error::arg("cannot diagonalize a 0x0 matrix"));
    }
    let eig = SymmetricEigen::try_new(h.as_matrix().clone(), f64::EPSILON, EIG_MAX_SWEEPS)
        .ok_or(Error::EigenNoConvergence { dim: d, max_iters: EIG_MAX_SWEEPS })?;

    let mut pairs: Vec<(f64, ComplexVector)> = (0..d)
        .map(|j| {
            let mut v = eig.eigenvectors.column(j).into_owned();
            fix_phase(&mut v);
            (eig.eigenvalues[j], v)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));

    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && (pairs[end - 1].0 - pairs[end].0).abs() < DEGENERACY_GAP {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|a, b| lexicographic_abs_desc(&a.1, &b.1));
        }
        start = end;
    }

    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let columns: Vec<ComplexVector> = pairs.into_iter().map(|p| p.1).collect();
    let eigenvectors = ComplexMatrix::from_columns(&columns);
    Ok(Spectrum { eigenvalues, eigenvectors })
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries (`E|z|^2 = 1`).
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    // column-major fill keeps the draw order fixed for a given seed
    let mut m = ComplexMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    m
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::arg("unitary dimension must be at least 1"));
    }
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        let phase = if n > 0.0 { rjj / n } else { Complex64::new(1.0, 0.0) };
        q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    Ok(q)
}

/// Random state of rank `r`: `G G^dagger / tr(G G^dagger)` with `G` a
/// `d x r` Ginibre matrix.
pub fn random_fixed_rank_state<R: Rng + ?Sized>(
    d: usize,
    r: usize,
    rng: &mut R,
) -> Result<HermitianMatrix> {
    if r == 0 || r > d {
        return Err(Error::arg(format!("rank {r} must lie in 1..={d}")));
    }
    let g = ginibre(d, r, rng);
    HermitianMatrix::symmetrized(&g * g.adjoint()).normalized()
}

/// Haar-random pure state vector in `C^d`.
pub fn random_pure_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexVector {
    let g = ginibre(d, 1, rng);
    let n = g.norm();
    g.column(0).into_owned() / Complex64::new(n, 0.0)
}

/// Frobenius-nearest positive semidefinite matrix: clip negative
/// eigenvalues to zero.
pub fn psd_project(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    let s = herm_eig(h)?;
    if s.eigenvalues.iter().all(|&l| l >= 0.0) {
        return Ok(h.clone());
    }
    let clipped: Vec<f64> = s.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    Ok(s.reconstruct_with(&clipped))
}

/// Squared Frobenius distance `||A - B||_F^2`.
pub fn frobenius_dist_sq(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(a.as_matrix()
        .iter()
        .zip(b.as_matrix().iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum())
}

/// Trace distance `||A - B||_1 / 2`.
pub fn trace_distance(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let s = herm_eig(&(a - b))?;
    Ok(0.5 * s.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}

/// Kronecker product of a list of matrices, left factor most significant.
pub fn kron_all(factors: &[ComplexMatrix]) -> ComplexMatrix {
    factors
        .iter()
        .fold(ComplexMatrix::identity(1, 1), |acc, f| acc.kronecker(f))
}

/// Serializable snapshot of a complex matrix in row-major order with real
/// and imaginary parts interleaved: `[re(0,0), im(0,0), re(0,1), ...]`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DenseMatrixRecord {
    pub rows: usize,
    pub cols: usize,
    pub layout: String,
    pub data: Vec<f64>,
}

pub const INTERLEAVED_LAYOUT: &str = "row-major, interleaved re/im";

impl DenseMatrixRecord {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let mut data = Vec::with_capacity(2 * m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push(m[(i, j)].re);
                data.push(m[(i, j)].im);
            }
        }
        DenseMatrixRecord {
            rows: m.nrows(),
            cols: m.ncols(),
            layout: INTERLEAVED_LAYOUT.to_string(),
            data,
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.data.len() != 2 * self.rows * self.cols {
            return Err(Error::data(format!(
                "matrix record has {} values, expected {}",
                self.data.len(),
                2 * self.rows * self.cols
            )));
        }
        Ok(ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            let k = 2 * (i * self.cols + j);
            Complex64::new(self.data[k], self.data[k + 1])
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn random_hermitian(d: usize, seed: u64) -> HermitianMatrix {
        let mut rng = rng_from_seed(seed);
        HermitianMatrix::symmetrized(ginibre(d, d, &mut rng))
    }

    #[test]
    fn identity_spectrum() {
        let s = herm_eig(&HermitianMatrix::identity(2)).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 1.0]);
        // degenerate cluster: standard basis in lexicographic order
        assert!((s.eigenvectors.clone() - ComplexMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn diagonal_spectrum() {
        let h = HermitianMatrix::from_real_diagonal(&[0.3, 0.7]);
        let s = herm_eig(&h).unwrap();
        assert!((s.eigenvalues[0] - 0.7).abs() < 1e-15);
        assert!((s.eigenvalues[1] - 0.3).abs() < 1e-15);
        assert!((s.eigenvector(0)[1].re - 1.0).abs() < 1e-14);
        assert!((s.eigenvector(1)[0].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_reconstruction() {
        for (seed, d) in [(1, 3), (2, 8), (3, 17), (4, 32)] {
            let h = random_hermitian(d, seed);
            let s = herm_eig(&h).unwrap();
            assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
            let err = (s.reconstruct().as_matrix() - h.as_matrix()).norm();
            assert!(err <= 1e-9 * h.frobenius_norm(), "d={d} err={err}");
            let v = &s.eigenvectors;
            let ortho = (v.adjoint() * v - ComplexMatrix::identity(d, d)).norm();
            assert!(ortho < 1e-10);
        }
    }

    #[test]
    fn degenerate_order_is_deterministic() {
        // rotate a degenerate diagonal matrix; ordering must not depend on the rotation
        let mut rng = rng_from_seed(11);
        let u = haar_unitary(4, &mut rng).unwrap();
        let d = ComplexMatrix::from_diagonal(&ComplexVector::from_vec(
            [2.0, 1.0, 1.0, 0.0].iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        ));
        let h = HermitianMatrix::symmetrized(&u * d * u.adjoint());
        let a = herm_eig(&h).unwrap();
        let b = herm_eig(&h).unwrap();
        assert_eq!(a.eigenvectors, b.eigenvectors);
        assert_eq!(a.degenerate_pairs(), vec![1]);
    }

    #[test]
    fn haar_unitarity() {
        let mut rng = rng_from_seed(5);
        let u1 = haar_unitary(1, &mut rng).unwrap();
        assert!((u1[(0, 0)].norm() - 1.0).abs() < 1e-14);
        for _ in 0..10 {
            let u = haar_unitary(4, &mut rng).unwrap();
            assert!((u.adjoint() * &u - ComplexMatrix::identity(4, 4)).norm() < 1e-10);
        }
    }

    #[test]
    fn fixed_rank_states() {
        let mut rng = rng_from_seed(9);
        let pure = random_fixed_rank_state(2, 1, &mut rng).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-12);

        let rho = random_fixed_rank_state(16, 4, &mut rng).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        let s = herm_eig(&rho).unwrap();
        assert_eq!(s.rank_above(1e-12), 4);
        assert!(*s.eigenvalues.last().unwrap() >= -1e-12);

        assert!(matches!(
            random_fixed_rank_state(2, 3, &mut rng),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn psd_projection_clips() {
        let h = HermitianMatrix::from_real_diagonal(&[0.5, -0.5]);
        let p = psd_project(&h).unwrap();
        let expected = HermitianMatrix::from_real_diagonal(&[0.5, 0.0]);
        assert!(frobenius_dist_sq(&p, &expected).unwrap() < 1e-24);

        let mut rng = rng_from_seed(3);
        let rho = random_fixed_rank_state(4, 2, &mut rng).unwrap();
        let p = psd_project(&rho).unwrap();
        assert!(frobenius_dist_sq(&p, &rho).unwrap().sqrt() < 1e-10);
    }

    #[test]
    fn psd_projection_matches_independent_clip() {
        // oracle: nalgebra's eigensolver used directly, no sorting or phase fixing
        for seed in 0..5 {
            let h = random_hermitian(4, 100 + seed);
            let eig = SymmetricEigen::new(h.as_matrix().clone());
            let mut oracle = ComplexMatrix::zeros(4, 4);
            for j in 0..4 {
                let v = eig.eigenvectors.column(j);
                let l = eig.eigenvalues[j].max(0.0);
                oracle += (v * v.adjoint()).scale(l);
            }
            let p = psd_project(&h).unwrap();
            assert!((p.as_matrix() - oracle).norm() < 1e-9);
            let pp = psd_project(&p).unwrap();
            assert!((pp.as_matrix() - p.as_matrix()).norm() < 1e-10);
        }
    }

    #[test]
    fn frobenius_distance() {
        let a = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]);
        let b = HermitianMatrix::from_real_diagonal(&[0.0, 1.0]);
        assert_eq!(frobenius_dist_sq(&a, &a).unwrap(), 0.0);
        assert!((frobenius_dist_sq(&a, &b).unwrap() - 2.0).abs() < 1e-15);
        assert!(frobenius_dist_sq(&a, &HermitianMatrix::zeros(3)).is_err());

        let x = random_hermitian(5, 21);
        let y = random_hermitian(5, 22);
        let mut oracle = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                let dz = x.as_matrix()[(i, j)] - y.as_matrix()[(i, j)];
                oracle += dz.re * dz.re + dz.im * dz.im;
            }
        }
        assert!((frobenius_dist_sq(&x, &y).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(HermitianMatrix::new(m).is_err());
        assert!(HermitianMatrix::new(ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn dense_record_layout() {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| Complex64::new(i as f64, j as f64));
        let rec = DenseMatrixRecord::from_matrix(&m);
        assert_eq!(rec.data, vec![0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0]);
        assert_eq!(rec.to_matrix().unwrap(), m);
    }
}
