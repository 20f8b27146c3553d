//! Logical states of the seven-qubit color code (the Steane [[7,1,3]] code)
//! and fidelity against pure reference states.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, HermitianMatrix};
use crate::measurement::{pauli_string_matrix, Pauli};

pub const CODE_QUBITS: usize = 7;

/// Supports of the Hamming(7,4) parity checks, 0-based qubit indices.
const CHECK_SUPPORTS: [[usize; 4]; 3] = [[3, 4, 5, 6], [1, 2, 5, 6], [0, 2, 4, 6]];

/// A signed Pauli string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerGenerator {
    pub paulis: Vec<Pauli>,
    pub sign: i8,
}

impl StabilizerGenerator {
    pub fn parse(s: &str) -> Result<Self> {
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, s.strip_prefix('+').unwrap_or(s)),
        };
        let paulis = body
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::arg(format!("invalid Pauli '{c}'"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { paulis, sign })
    }

    pub fn matrix(&self) -> ComplexMatrix {
        pauli_string_matrix(&self.paulis) * Complex64::new(self.sign as f64, 0.0)
    }

    /// Two Pauli strings commute iff they anticommute on an even number of sites.
    pub fn commutes_with(&self, other: &StabilizerGenerator) -> bool {
        let anti = self
            .paulis
            .iter()
            .zip(&other.paulis)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    pub fn label(&self) -> String {
        let body: String = self.paulis.iter().map(|p| p.as_char()).collect();
        if self.sign < 0 {
            format!("-{body}")
        } else {
            format!("+{body}")
        }
    }
}

/// Three X-type then three Z-type generators on the Hamming(7,4) check supports.
pub fn steane_generators() -> Vec<StabilizerGenerator> {
    [Pauli::X, Pauli::Z]
        .iter()
        .flat_map(|&p| {
            CHECK_SUPPORTS.iter().map(move |support| {
                let mut paulis = vec![Pauli::I; CODE_QUBITS];
                support.iter().for_each(|&q| paulis[q] = p);
                StabilizerGenerator { paulis, sign: 1 }
            })
        })
        .collect()
}

/// `prod_i (I + S_i) / 2` over the generators.
pub fn code_projector(generators: &[StabilizerGenerator]) -> ComplexMatrix {
    let d = 1usize << CODE_QUBITS;
    let id = ComplexMatrix::identity(d, d);
    generators.iter().fold(id.clone(), |acc, g| {
        acc * (&id + g.matrix()) * Complex64::new(0.5, 0.0)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogicalLabel {
    #[serde(rename = "0bar")]
    Zero,
    #[serde(rename = "1bar")]
    One,
    #[serde(rename = "plus")]
    Plus,
}

impl LogicalLabel {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "0bar" => Ok(Self::Zero),
            "1bar" => Ok(Self::One),
            "plus" => Ok(Self::Plus),
            _ => Err(Error::arg(format!("unknown logical state '{s}' (expected 0bar, 1bar or plus)"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Zero => "0bar",
            Self::One => "1bar",
            Self::Plus => "plus",
        }
    }
}

#[derive(Clone, Debug)]
pub struct LogicalState {
    pub label: LogicalLabel,
    pub vector: ComplexVector,
}

impl LogicalState {
    pub fn density_matrix(&self) -> HermitianMatrix {
        HermitianMatrix::outer(&self.vector)
    }
}

fn basis_vector(d: usize, index: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(d);
    v[index] = Complex64::new(1.0, 0.0);
    v
}

fn project_and_normalize(mut v: ComplexVector, generators: &[StabilizerGenerator]) -> Result<ComplexVector> {
    for g in generators {
        let sv = g.matrix() * &v;
        v = (v + sv) * Complex64::new(0.5, 0.0);
    }
    let n = v.norm();
    if n < 1e-12 {
        return Err(Error::Numerical("seed vector has no overlap with the code space".into()));
    }
    v /= Complex64::new(n, 0.0);
    // largest-modulus amplitude real positive
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(pivot) = v.iter().find(|z| z.norm() >= max * (1.0 - 1e-12)).copied() {
        let phase = pivot.conj() / pivot.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
    Ok(v)
}

/// `(|0bar>, |1bar>)`: the code words with `Z^{(x)7}` eigenvalue +1 and -1.
pub fn logical_states() -> Result<(LogicalState, LogicalState)> {
    let gens = steane_generators();
    let d = 1usize << CODE_QUBITS;
    // |0000000> and |1111111> lie in the +1 / -1 eigenspaces of Z^{(x)7} and of
    // every Z-type generator; projecting onto the X-type checks keeps that.
    let zero = project_and_normalize(basis_vector(d, 0), &gens)?;
    let one = project_and_normalize(basis_vector(d, d - 1), &gens)?;
    Ok((
        LogicalState { label: LogicalLabel::Zero, vector: zero },
        LogicalState { label: LogicalLabel::One, vector: one },
    ))
}

/// The logical state with the given label; `plus` is `(|0bar> + |1bar>)/sqrt2`.
pub fn logical_state(label: LogicalLabel) -> Result<LogicalState> {
    let (zero, one) = logical_states()?;
    Ok(match label {
        LogicalLabel::Zero => zero,
        LogicalLabel::One => one,
        LogicalLabel::Plus => LogicalState {
            label,
            vector: (zero.vector + one.vector) * Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        },
    })
}

/// `<psi| rho |psi>`.
pub fn fidelity(psi: &ComplexVector, rho_hat: &HermitianMatrix) -> Result<f64> {
    if psi.len() != rho_hat.dim() {
        return Err(Error::DimensionMismatch { expected: rho_hat.dim(), found: psi.len() });
    }
    Ok(rho_hat.expectation(psi))
}

/// Relabels qubits: qubit `l` of the result is qubit `perm[l]` of the input.
pub fn permute_qubits(psi: &ComplexVector, perm: &[usize]) -> Result<ComplexVector> {
    let l = perm.len();
    if psi.len() != 1usize << l {
        return Err(Error::DimensionMismatch { expected: 1 << l, found: psi.len() });
    }
    let mut seen = vec![false; l];
    for &p in perm {
        if p >= l || std::mem::replace(&mut seen[p], true) {
            return Err(Error::arg(format!("{perm:?} is not a permutation of 0..{l}")));
        }
    }
    let mut out = ComplexVector::zeros(psi.len());
    for (new_index, slot) in out.iter_mut().enumerate() {
        let mut old_index = 0;
        for (q, &src) in perm.iter().enumerate() {
            let bit = (new_index >> (l - 1 - q)) & 1;
            old_index |= bit << (l - 1 - src);
        }
        *slot = psi[old_index];
    }
    Ok(out)
}

/// Pure state file: `{"label": ..., "L": ..., "amplitudes": [[re, im], ...]}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct StateFile {
    #[serde(default)]
    pub label: Option<String>,
    #[serde(rename = "L")]
    pub num_qubits: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_vector(label: Option<&str>, psi: &ComplexVector) -> Self {
        StateFile {
            label: label.map(str::to_string),
            num_qubits: psi.len().trailing_zeros() as usize,
            amplitudes: psi.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    /// Validates length and normalization (to 1e-8).
    pub fn to_vector(&self) -> Result<ComplexVector> {
        if self.amplitudes.len() != 1usize << self.num_qubits {
            return Err(Error::data(format!(
                "state file has {} amplitudes for L = {}",
                self.amplitudes.len(),
                self.num_qubits
            )));
        }
        let v = ComplexVector::from_iterator(
            self.amplitudes.len(),
            self.amplitudes.iter().map(|a| Complex64::new(a[0], a[1])),
        );
        let n = v.norm();
        if (n - 1.0).abs() > 1e-8 {
            return Err(Error::data(format!("state vector has norm {n}, expected 1")));
        }
        Ok(v)
    }
}

pub fn write_state_json<W: Write>(label: Option<&str>, psi: &ComplexVector, writer: W) -> Result<()> {
    serde_json::to_writer_pretty(writer, &StateFile::from_vector(label, psi))?;
    Ok(())
}

pub fn read_state_json<R: Read>(reader: R) -> Result<ComplexVector> {
    let f: StateFile = serde_json::from_reader(reader)?;
    f.to_vector()
}
