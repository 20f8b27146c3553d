//! The sampling operator `A` and its adjoint.
//!
//! `A` maps a Hermitian `X` to the outcome probabilities `tr(X P_k^(j))` of
//! every setting `j` and outcome `k`. Two routes are provided:
//!
//! * [`SamplingOperator::apply`] goes through the Pauli expansion of `X`.
//!   The projector of outcome `k` in setting `W_1..W_L` is
//!   `prod_l (I + (-1)^{k_l} W_l) / 2`, so a block of probabilities is a
//!   Walsh-Hadamard transform of the `2^L` Pauli coefficients compatible with
//!   the setting. Cost is `O(L 4^L + n L 2^L)` per application.
//! * [`SamplingOperator::apply_by_conjugation`] computes `diag(U X U^dagger)`
//!   per setting with the basis-change unitary. It is `O(n d^3)` and kept as
//!   a reference route.
//!
//! Outcome `k` is 0-based; bit `L-1-l` of `k` is the outcome of qubit `l`
//! (qubit 1 is the most significant bit), and bit value 0 means eigenvalue +1.

use num_complex::Complex64;

use super::pauli::{MeasurementSetting, SettingEnsemble};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix};

/// Flat vector of per-setting outcome values, setting-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DataVector {
    values: Vec<f64>,
    block_len: usize,
}

impl DataVector {
    pub fn new(values: Vec<f64>, block_len: usize) -> Result<Self> {
        if block_len == 0 || values.len() % block_len != 0 {
            return Err(Error::arg(format!(
                "data length {} is not a multiple of block length {block_len}",
                values.len()
            )));
        }
        Ok(Self { values, block_len })
    }

    pub fn zeros(num_settings: usize, block_len: usize) -> Self {
        Self { values: vec![0.0; num_settings * block_len], block_len }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn num_blocks(&self) -> usize {
        self.values.len() / self.block_len
    }

    pub fn block(&self, j: usize) -> &[f64] {
        &self.values[j * self.block_len..(j + 1) * self.block_len]
    }

    pub fn blocks(&self) -> std::slice::Chunks<'_, f64> {
        self.values.chunks(self.block_len)
    }

    pub fn dot(&self, other: &DataVector) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    /// `self - other`, entrywise.
    pub fn sub(&self, other: &DataVector) -> DataVector {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        DataVector { values, block_len: self.block_len }
    }

    /// Checks that every block is a probability vector up to the given
    /// tolerances.
    pub fn check_probabilities(&self, entry_tol: f64, sum_tol: f64) -> Result<()> {
        for (j, block) in self.blocks().enumerate() {
            if let Some(p) = block.iter().find(|&&p| !(p >= -entry_tol && p <= 1.0 + entry_tol)) {
                return Err(Error::data(format!("block {j} has invalid probability {p}")));
            }
            let s: f64 = block.iter().sum();
            if (s - 1.0).abs() > sum_tol {
                return Err(Error::data(format!("block {j} sums to {s}, not 1")));
            }
        }
        Ok(())
    }
}

/// In-place unnormalized Walsh-Hadamard transform,
/// `out[k] = sum_s (-1)^{popcount(k & s)} in[s]`.
fn walsh_hadamard(v: &mut [f64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let a = v[j];
                let b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Interleaved index of entry `(a, b)`: base-4 digit `2 a_l + b_l` per qubit.
fn interleave(a: usize, b: usize, num_qubits: usize) -> usize {
    let mut idx = 0;
    for l in 0..num_qubits {
        let shift = num_qubits - 1 - l;
        let al = (a >> shift) & 1;
        let bl = (b >> shift) & 1;
        idx = idx * 4 + 2 * al + bl;
    }
    idx
}

/// Pauli coefficients `c_p = tr(sigma_p X)` for all `4^L` Pauli strings,
/// indexed base-4 with qubit 1 as the most significant digit.
pub fn pauli_coefficients(x: &HermitianMatrix, num_qubits: usize) -> Vec<f64> {
    let d = 1usize << num_qubits;
    let mut t = vec![Complex64::new(0.0, 0.0); d * d];
    let m = x.as_matrix();
    for a in 0..d {
        for b in 0..d {
            t[interleave(a, b, num_qubits)] = m[(a, b)];
        }
    }
    let i = Complex64::new(0.0, 1.0);
    for l in 0..num_qubits {
        let stride = 1usize << (2 * (num_qubits - 1 - l));
        for base in 0..t.len() {
            if (base / stride) % 4 != 0 {
                continue;
            }
            let (m00, m01, m10, m11) =
                (t[base], t[base + stride], t[base + 2 * stride], t[base + 3 * stride]);
            t[base] = m00 + m11;
            t[base + stride] = m01 + m10;
            t[base + 2 * stride] = i * (m01 - m10);
            t[base + 3 * stride] = m00 - m11;
        }
    }
    t.into_iter().map(|z| z.re).collect()
}

/// Inverse of [`pauli_coefficients`]: `X = (1/d) sum_p c_p sigma_p`.
pub fn from_pauli_coefficients(coeffs: &[f64], num_qubits: usize) -> HermitianMatrix {
    let d = 1usize << num_qubits;
    debug_assert_eq!(coeffs.len(), d * d);
    let mut t: Vec<Complex64> = coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    let i = Complex64::new(0.0, 1.0);
    for l in 0..num_qubits {
        let stride = 1usize << (2 * (num_qubits - 1 - l));
        for base in 0..t.len() {
            if (base / stride) % 4 != 0 {
                continue;
            }
            let (ci, cx, cy, cz) =
                (t[base], t[base + stride], t[base + 2 * stride], t[base + 3 * stride]);
            t[base] = (ci + cz) * 0.5;
            t[base + stride] = (cx - i * cy) * 0.5;
            t[base + 2 * stride] = (cx + i * cy) * 0.5;
            t[base + 3 * stride] = (ci - cz) * 0.5;
        }
    }
    let mut m = ComplexMatrix::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            m[(a, b)] = t[interleave(a, b, num_qubits)];
        }
    }
    HermitianMatrix::symmetrized(m)
}

/// Matrix-free sampling operator for a fixed setting ensemble.
#[derive(Clone, Debug)]
pub struct SamplingOperator {
    ensemble: SettingEnsemble,
    /// For setting `j` and subset mask `s`, the base-4 index of the Pauli
    /// string carrying `W_l` on the qubits in `s` and `I` elsewhere.
    compatible: Vec<Vec<usize>>,
}

impl SamplingOperator {
    pub fn new(ensemble: SettingEnsemble) -> Self {
        let l = ensemble.num_qubits();
        let d = ensemble.dim();
        let compatible = ensemble
            .iter()
            .map(|s| {
                (0..d)
                    .map(|mask| {
                        s.axes().iter().enumerate().fold(0usize, |acc, (q, axis)| {
                            let on = (mask >> (l - 1 - q)) & 1 == 1;
                            acc * 4 + if on { axis.pauli().code() } else { 0 }
                        })
                    })
                    .collect()
            })
            .collect();
        Self { ensemble, compatible }
    }

    pub fn ensemble(&self) -> &SettingEnsemble {
        &self.ensemble
    }

    pub fn num_qubits(&self) -> usize {
        self.ensemble.num_qubits()
    }

    pub fn dim(&self) -> usize {
        self.ensemble.dim()
    }

    pub fn data_len(&self) -> usize {
        self.ensemble.data_len()
    }

    fn check_dim(&self, x: &HermitianMatrix) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.dim() });
        }
        Ok(())
    }

    /// `A(X)`: probabilities `tr(X P_k^(j))`, setting-major.
    pub fn apply(&self, x: &HermitianMatrix) -> Result<DataVector> {
        self.check_dim(x)?;
        let coeffs = pauli_coefficients(x, self.num_qubits());
        Ok(self.apply_coefficients(&coeffs))
    }

    /// `A` applied to a Pauli coefficient vector.
    pub fn apply_coefficients(&self, coeffs: &[f64]) -> DataVector {
        let d = self.dim();
        let inv_d = 1.0 / d as f64;
        let mut out = Vec::with_capacity(self.data_len());
        let mut block = vec![0.0; d];
        for table in &self.compatible {
            for (slot, &p) in block.iter_mut().zip(table) {
                *slot = coeffs[p];
            }
            walsh_hadamard(&mut block);
            out.extend(block.iter().map(|v| v * inv_d));
        }
        DataVector { values: out, block_len: d }
    }

    /// Pauli coefficients of `A^dagger(z)`.
    pub fn adjoint_coefficients(&self, z: &DataVector) -> Result<Vec<f64>> {
        if z.len() != self.data_len() {
            return Err(Error::DimensionMismatch { expected: self.data_len(), found: z.len() });
        }
        let d = self.dim();
        let mut coeffs = vec![0.0; d * d];
        let mut block = vec![0.0; d];
        for (table, zb) in self.compatible.iter().zip(z.values().chunks(d)) {
            block.copy_from_slice(zb);
            walsh_hadamard(&mut block);
            for (&p, v) in table.iter().zip(&block) {
                coeffs[p] += v;
            }
        }
        Ok(coeffs)
    }

    /// `A^dagger(z) = sum_{j,k} z_{jk} P_k^(j)`.
    pub fn adjoint(&self, z: &DataVector) -> Result<HermitianMatrix> {
        let coeffs = self.adjoint_coefficients(z)?;
        Ok(from_pauli_coefficients(&coeffs, self.num_qubits()))
    }

    /// `A(X)` computed as `diag(U X U^dagger)` per setting.
    pub fn apply_by_conjugation(&self, x: &HermitianMatrix) -> Result<DataVector> {
        self.check_dim(x)?;
        let mut out = Vec::with_capacity(self.data_len());
        for s in self.ensemble.iter() {
            out.extend(block_by_conjugation(x, s));
        }
        Ok(DataVector { values: out, block_len: self.dim() })
    }

    /// `A^dagger(z)` computed as `sum_j U_j^dagger diag(z_j) U_j`.
    pub fn adjoint_by_conjugation(&self, z: &DataVector) -> Result<HermitianMatrix> {
        if z.len() != self.data_len() {
            return Err(Error::DimensionMismatch { expected: self.data_len(), found: z.len() });
        }
        let d = self.dim();
        let mut acc = ComplexMatrix::zeros(d, d);
        for (s, zb) in self.ensemble.iter().zip(z.values().chunks(d)) {
            let u = s.basis_unitary();
            let mut scaled = u.clone();
            for (k, &w) in zb.iter().enumerate() {
                scaled.row_mut(k).scale_mut(w);
            }
            acc += u.adjoint() * scaled;
        }
        Ok(HermitianMatrix::symmetrized(acc))
    }

    /// Largest eigenvalue of `A^dagger A`, by power iteration from the
    /// maximally mixed state.
    pub fn lipschitz_estimate(&self, iterations: usize) -> f64 {
        let d = self.dim();
        let mut coeffs = vec![0.0; d * d];
        coeffs[0] = 1.0;
        // a fixed non-symmetric start so components beyond the identity are excited
        for (i, c) in coeffs.iter_mut().enumerate().skip(1) {
            *c = 1.0 / (1.0 + i as f64).sqrt();
        }
        let mut lambda = 0.0;
        for _ in 0..iterations.max(1) {
            let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
            coeffs.iter_mut().for_each(|c| *c /= norm);
            let next = self
                .adjoint_coefficients(&self.apply_coefficients(&coeffs))
                .expect("length matches by construction");
            // A^dagger A acts diagonally on Pauli coefficients
            lambda = coeffs.iter().zip(&next).map(|(a, b)| a * b).sum::<f64>();
            coeffs = next;
        }
        lambda
    }

    /// Explicit `(n 2^L) x d^2` matrix of `A` acting on row-major `vec(X)`.
    /// Row `(j, k)` is `conj(vec(P_k^(j)))`. Only for `L <= 4`.
    pub fn explicit_matrix(&self) -> Result<ComplexMatrix> {
        if self.num_qubits() > 4 {
            return Err(Error::arg("explicit sampling matrix is limited to L <= 4"));
        }
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(self.data_len(), d * d);
        for (j, s) in self.ensemble.iter().enumerate() {
            let u = s.basis_unitary();
            for k in 0..d {
                let row = j * d + k;
                for a in 0..d {
                    for b in 0..d {
                        // P_ab = conj(U_ka) U_kb, conj(P_ab) = U_ka conj(U_kb)
                        m[(row, a * d + b)] = u[(k, a)] * u[(k, b)].conj();
                    }
                }
            }
        }
        Ok(m)
    }
}

fn block_by_conjugation(x: &HermitianMatrix, s: &MeasurementSetting) -> Vec<f64> {
    let u = s.basis_unitary();
    let rotated = &u * x.as_matrix() * u.adjoint();
    (0..rotated.nrows()).map(|k| rotated[(k, k)].re).collect()
}

/// `A(rho)` for a whole ensemble.
pub fn apply_sampling_operator(rho: &HermitianMatrix, ens: &SettingEnsemble) -> Result<DataVector> {
    SamplingOperator::new(ens.clone()).apply(rho)
}

/// `A^dagger(z)` for a whole ensemble.
pub fn adjoint_sampling_operator(z: &DataVector, ens: &SettingEnsemble) -> Result<HermitianMatrix> {
    SamplingOperator::new(ens.clone()).adjoint(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ginibre, random_fixed_rank_state, ComplexVector};
    use crate::measurement::pauli::{enumerate_settings, pauli_string_matrix, random_settings, Pauli};
    use crate::rng::rng_from_seed;

    fn single(s: &str) -> SettingEnsemble {
        let setting: MeasurementSetting = s.parse().unwrap();
        SettingEnsemble::new(setting.num_qubits(), vec![setting]).unwrap()
    }

    fn ket0() -> HermitianMatrix {
        HermitianMatrix::from_real_diagonal(&[1.0, 0.0])
    }

    #[test]
    fn eigenstate_and_superposition() {
        let z = apply_sampling_operator(&ket0(), &single("Z")).unwrap();
        assert_eq!(z.values(), &[1.0, 0.0]);
        let x = apply_sampling_operator(&ket0(), &single("X")).unwrap();
        assert!((x.values()[0] - 0.5).abs() < 1e-15 && (x.values()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn matches_explicit_projectors() {
        let mut rng = rng_from_seed(42);
        let rho = random_fixed_rank_state(8, 3, &mut rng).unwrap();
        let ens = enumerate_settings(3).unwrap();
        let op = SamplingOperator::new(ens.clone());
        let fast = op.apply(&rho).unwrap();
        let conj = op.apply_by_conjugation(&rho).unwrap();
        for (j, s) in ens.iter().enumerate() {
            let u = s.basis_unitary();
            for k in 0..8 {
                let v: ComplexVector = u.row(k).adjoint();
                let proj = &v * v.adjoint();
                let oracle = (rho.as_matrix() * proj).trace().re;
                assert!((fast.block(j)[k] - oracle).abs() < 1e-12);
                assert!((conj.block(j)[k] - oracle).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pauli_transform_round_trip() {
        let mut rng = rng_from_seed(7);
        let x = HermitianMatrix::symmetrized(ginibre(8, 8, &mut rng));
        let c = pauli_coefficients(&x, 3);
        // spot-check against a dense trace
        let paulis = [Pauli::Y, Pauli::I, Pauli::Z];
        let idx = paulis.iter().fold(0, |acc, p| acc * 4 + p.code());
        let direct = (pauli_string_matrix(&paulis) * x.as_matrix()).trace().re;
        assert!((c[idx] - direct).abs() < 1e-12);
        let back = from_pauli_coefficients(&c, 3);
        assert!((back.as_matrix() - x.as_matrix()).norm() < 1e-12);
    }

    #[test]
    fn adjoint_of_indicator_is_projector() {
        let z = DataVector::new(vec![1.0, 0.0], 2).unwrap();
        let p = adjoint_sampling_operator(&z, &single("Z")).unwrap();
        assert!((p.as_matrix() - ket0().as_matrix()).norm() < 1e-15);

        let zero = DataVector::zeros(9, 4);
        let ens = enumerate_settings(2).unwrap();
        let m = adjoint_sampling_operator(&zero, &ens).unwrap();
        assert_eq!(m.frobenius_norm(), 0.0);
    }

    #[test]
    fn adjoint_routes_agree() {
        let mut rng = rng_from_seed(8);
        let ens = random_settings(3, 12, &mut rng).unwrap();
        let op = SamplingOperator::new(ens);
        let z = DataVector::new((0..op.data_len()).map(|i| (i as f64 * 0.37).sin()).collect(), 8).unwrap();
        let a = op.adjoint(&z).unwrap();
        let b = op.adjoint_by_conjugation(&z).unwrap();
        assert!((a.as_matrix() - b.as_matrix()).norm() < 1e-12);
    }

    #[test]
    fn explicit_matrix_agrees() {
        let mut rng = rng_from_seed(9);
        let ens = random_settings(2, 5, &mut rng).unwrap();
        let op = SamplingOperator::new(ens);
        let x = HermitianMatrix::symmetrized(ginibre(4, 4, &mut rng));
        let m = op.explicit_matrix().unwrap();
        let vec_x = ComplexVector::from_iterator(16, (0..4).flat_map(|a| (0..4).map(move |b| (a, b))).map(|(a, b)| x.as_matrix()[(a, b)]));
        let via_matrix = m * vec_x;
        let fast = op.apply(&x).unwrap();
        for (i, v) in fast.values().iter().enumerate() {
            assert!((via_matrix[i].re - v).abs() < 1e-12);
            assert!(via_matrix[i].im.abs() < 1e-12);
        }
    }

    #[test]
    fn lipschitz_of_complete_set() {
        // A^dagger A is diagonal in the Pauli basis; the identity component is
        // compatible with every setting, so the top eigenvalue is n
        let op = SamplingOperator::new(enumerate_settings(2).unwrap());
        let lip = op.lipschitz_estimate(50);
        assert!((lip - 9.0).abs() < 1e-6, "{lip}");
    }

    #[test]
    fn dimension_errors() {
        let op = SamplingOperator::new(single("ZZ"));
        assert!(op.apply(&ket0()).is_err());
        assert!(op.adjoint(&DataVector::zeros(1, 2)).is_err());
    }
}
