//! Local Pauli axes, measurement settings and setting ensembles.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{kron_all, ComplexMatrix};

/// Largest qubit count accepted anywhere in the crate.
pub const MAX_QUBITS: usize = 10;

/// Single-qubit Pauli operator, including the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Digit used in base-4 Pauli string indices (I=0, X=1, Y=2, Z=3).
    pub fn code(self) -> usize {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    pub fn matrix(self) -> ComplexMatrix {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let entries = match self {
            Pauli::I => [l, o, o, l],
            Pauli::X => [o, l, l, o],
            Pauli::Y => [o, -i, i, o],
            Pauli::Z => [l, o, o, -l],
        };
        ComplexMatrix::from_row_slice(2, 2, &entries)
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Dense matrix of a Pauli string, qubit 1 as the leftmost tensor factor.
pub fn pauli_string_matrix(paulis: &[Pauli]) -> ComplexMatrix {
    let factors: Vec<ComplexMatrix> = paulis.iter().map(|p| p.matrix()).collect();
    kron_all(&factors)
}

/// Measurement axis of one qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn pauli(self) -> Pauli {
        match self {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
            Axis::Z => Pauli::Z,
        }
    }

    /// Rows are the bras of the eigenbasis, outcome 0 (eigenvalue +1) first:
    /// X: (|0> +- |1>)/sqrt2, Y: (|0> +- i|1>)/sqrt2, Z: |0>, |1>.
    pub fn basis_change(self) -> ComplexMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let r = |x: f64| Complex64::new(x, 0.0);
        match self {
            Axis::Z => ComplexMatrix::identity(2, 2),
            Axis::X => ComplexMatrix::from_row_slice(2, 2, &[r(h), r(h), r(h), r(-h)]),
            Axis::Y => ComplexMatrix::from_row_slice(
                2,
                2,
                &[r(h), Complex64::new(0.0, -h), r(h), Complex64::new(0.0, h)],
            ),
        }
    }

    fn from_char(c: char) -> Option<Axis> {
        match c {
            'X' => Some(Axis::X),
            'Y' => Some(Axis::Y),
            'Z' => Some(Axis::Z),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        self.pauli().as_char()
    }
}

/// One local Pauli axis per qubit; qubit 1 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MeasurementSetting {
    axes: Vec<Axis>,
}

impl MeasurementSetting {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > MAX_QUBITS {
            return Err(Error::arg(format!(
                "setting must have between 1 and {MAX_QUBITS} qubits, got {}",
                axes.len()
            )));
        }
        Ok(Self { axes })
    }

    pub fn uniform(axis: Axis, num_qubits: usize) -> Result<Self> {
        Self::new(vec![axis; num_qubits])
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn num_qubits(&self) -> usize {
        self.axes.len()
    }

    /// Position of this setting in the base-3 enumeration (X=0, Y=1, Z=2,
    /// qubit 1 most significant).
    pub fn index(&self) -> u64 {
        self.axes.iter().fold(0u64, |acc, a| {
            acc * 3
                + match a {
                    Axis::X => 0,
                    Axis::Y => 1,
                    Axis::Z => 2,
                }
        })
    }

    pub fn from_index(index: u64, num_qubits: usize) -> Result<Self> {
        let mut axes = vec![Axis::X; num_qubits];
        let mut rest = index;
        for slot in axes.iter_mut().rev() {
            *slot = Axis::ALL[(rest % 3) as usize];
            rest /= 3;
        }
        if rest != 0 {
            return Err(Error::arg(format!("setting index {index} out of range for {num_qubits} qubits")));
        }
        Self::new(axes)
    }

    /// Tensor product of single-qubit basis changes; row `k` is `<v_k|`.
    pub fn basis_unitary(&self) -> ComplexMatrix {
        let factors: Vec<ComplexMatrix> = self.axes.iter().map(|a| a.basis_change()).collect();
        kron_all(&factors)
    }

    /// The Pauli correlation observable `W_1 (x) ... (x) W_L`.
    pub fn observable(&self) -> ComplexMatrix {
        let p: Vec<Pauli> = self.axes.iter().map(|a| a.pauli()).collect();
        pauli_string_matrix(&p)
    }
}

/// Basis-change unitary of a setting: rows are the outcome bras.
pub fn setting_basis_unitary(s: &MeasurementSetting) -> ComplexMatrix {
    s.basis_unitary()
}

impl FromStr for MeasurementSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let axes = s
            .trim()
            .chars()
            .map(|c| Axis::from_char(c).ok_or_else(|| Error::data(format!("invalid axis '{c}' in setting \"{s}\""))))
            .collect::<Result<Vec<_>>>()?;
        MeasurementSetting::new(axes)
    }
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.axes.iter().try_for_each(|a| write!(f, "{}", a.as_char()))
    }
}

/// Ordered, duplicate-free list of settings on a fixed number of qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SettingEnsemble {
    num_qubits: usize,
    settings: Vec<MeasurementSetting>,
}

impl SettingEnsemble {
    pub fn new(num_qubits: usize, settings: Vec<MeasurementSetting>) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::arg(format!("qubit count {num_qubits} outside 1..={MAX_QUBITS}")));
        }
        if settings.is_empty() {
            return Err(Error::arg("setting ensemble is empty"));
        }
        let mut seen = HashSet::with_capacity(settings.len());
        for s in &settings {
            if s.num_qubits() != num_qubits {
                return Err(Error::arg(format!(
                    "setting {s} has {} qubits, expected {num_qubits}",
                    s.num_qubits()
                )));
            }
            if !seen.insert(s.clone()) {
                return Err(Error::arg(format!("duplicate setting {s}")));
            }
        }
        Ok(Self { num_qubits, settings })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.settings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.settings.is_empty()
    }

    pub fn settings(&self) -> &[MeasurementSetting] {
        &self.settings
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MeasurementSetting> {
        self.settings.iter()
    }

    /// Length of the data vector, `n * 2^L`.
    pub fn data_len(&self) -> usize {
        self.len() * self.dim()
    }
}

fn total_settings(num_qubits: usize) -> u64 {
    3u64.pow(num_qubits as u32)
}

/// All `3^L` settings in base-3 order.
pub fn enumerate_settings(num_qubits: usize) -> Result<SettingEnsemble> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::arg(format!("qubit count {num_qubits} outside 1..={MAX_QUBITS}")));
    }
    let settings = (0..total_settings(num_qubits))
        .map(|i| MeasurementSetting::from_index(i, num_qubits))
        .collect::<Result<Vec<_>>>()?;
    SettingEnsemble::new(num_qubits, settings)
}

/// `n` distinct settings drawn uniformly without replacement, returned in
/// base-3 order.
pub fn random_settings<R: Rng + ?Sized>(
    num_qubits: usize,
    n: usize,
    rng: &mut R,
) -> Result<SettingEnsemble> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::arg(format!("qubit count {num_qubits} outside 1..={MAX_QUBITS}")));
    }
    let total = total_settings(num_qubits) as usize;
    if n == 0 || n > total {
        return Err(Error::arg(format!("cannot draw {n} distinct settings out of {total}")));
    }
    let mut idx = rand::seq::index::sample(rng, total, n).into_vec();
    idx.sort_unstable();
    let settings = idx
        .into_iter()
        .map(|i| MeasurementSetting::from_index(i as u64, num_qubits))
        .collect::<Result<Vec<_>>>()?;
    SettingEnsemble::new(num_qubits, settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn parse_and_display() {
        let s: MeasurementSetting = "XXYZZXY".parse().unwrap();
        assert_eq!(s.to_string(), "XXYZZXY");
        assert_eq!(s.num_qubits(), 7);
        assert!("XQ".parse::<MeasurementSetting>().is_err());
        assert!("".parse::<MeasurementSetting>().is_err());
        assert_eq!(MeasurementSetting::from_index(s.index(), 7).unwrap(), s);
    }

    #[test]
    fn single_qubit_bases() {
        let z = MeasurementSetting::uniform(Axis::Z, 1).unwrap();
        assert_eq!(z.basis_unitary(), ComplexMatrix::identity(2, 2));

        let x = MeasurementSetting::uniform(Axis::X, 1).unwrap().basis_unitary();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let hadamard = ComplexMatrix::from_row_slice(
            2,
            2,
            &[h, h, h, -h].map(|v| Complex64::new(v, 0.0)),
        );
        assert!((x - hadamard).norm() < 1e-15);
    }

    #[test]
    fn basis_rows_are_eigenvectors() {
        // row k of U conjugated is an eigenvector of the axis Pauli with eigenvalue (-1)^k
        for axis in Axis::ALL {
            let u = axis.basis_change();
            let p = axis.pauli().matrix();
            for k in 0..2 {
                let v = u.row(k).adjoint();
                let sign = if k == 0 { 1.0 } else { -1.0 };
                assert!((&p * &v - v.scale(sign)).norm() < 1e-15);
            }
            assert!((&u * u.adjoint() - ComplexMatrix::identity(2, 2)).norm() < 1e-15);
        }
    }

    #[test]
    fn two_qubit_basis_is_tensor_product() {
        let s: MeasurementSetting = "ZX".parse().unwrap();
        let u = s.basis_unitary();
        let h = Axis::X.basis_change();
        // explicit block construction of I (x) H
        let mut oracle = ComplexMatrix::zeros(4, 4);
        for b in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    oracle[(2 * b + i, 2 * b + j)] = h[(i, j)];
                }
            }
        }
        assert!((u - oracle).norm() < 1e-15);
    }

    #[test]
    fn enumeration_sizes() {
        let one = enumerate_settings(1).unwrap();
        assert_eq!(one.len(), 3);
        let names: HashSet<String> = one.iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["X", "Y", "Z"].iter().map(|s| s.to_string()).collect());
        assert_eq!(enumerate_settings(7).unwrap().len(), 2187);
    }

    #[test]
    fn random_selection() {
        let mut rng = rng_from_seed(1);
        let full = random_settings(4, 81, &mut rng).unwrap();
        assert_eq!(full, enumerate_settings(4).unwrap());
        let part = random_settings(7, 127, &mut rng).unwrap();
        assert_eq!(part.len(), 127);
        assert!(random_settings(2, 10, &mut rng).is_err());
        assert!(random_settings(2, 0, &mut rng).is_err());
    }

    #[test]
    fn ensemble_rejects_duplicates() {
        let s: MeasurementSetting = "XZ".parse().unwrap();
        assert!(SettingEnsemble::new(2, vec![s.clone(), s]).is_err());
        let t: MeasurementSetting = "XZZ".parse().unwrap();
        assert!(SettingEnsemble::new(2, vec![t]).is_err());
    }
}
