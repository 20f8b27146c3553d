//! Outcome counts: multinomial shot noise and Pauli correlators.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::operator::{DataVector, SamplingOperator};
use super::pauli::{MeasurementSetting, SettingEnsemble};
use crate::error::{Error, Result};
use crate::linalg::HermitianMatrix;
use crate::rng;

const NEGATIVE_CLIP: f64 = 1e-12;
const SUM_TOL: f64 = 1e-8;

/// Outcome counts of one setting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub setting: MeasurementSetting,
    pub counts: Vec<u64>,
    pub shots: u64,
}

impl MeasurementRecord {
    pub fn new(setting: MeasurementSetting, counts: Vec<u64>) -> Result<Self> {
        let expected = 1usize << setting.num_qubits();
        if counts.len() != expected {
            return Err(Error::data(format!(
                "setting {setting} needs {expected} counts, got {}",
                counts.len()
            )));
        }
        let shots = counts.iter().sum();
        if shots == 0 {
            return Err(Error::data(format!("setting {setting} has zero shots")));
        }
        Ok(Self { setting, counts, shots })
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let m = self.shots as f64;
        self.counts.iter().map(|&c| c as f64 / m).collect()
    }
}

/// Clips entries in `[-1e-12, 0)` to zero and renormalizes. Anything more
/// negative, or a sum outside `1 +- 1e-8`, is a numerical error.
pub fn sanitize_probabilities(p: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = p.iter().find(|&&x| !(x >= -NEGATIVE_CLIP)) {
        return Err(Error::Numerical(format!("probability {bad} is negative")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::Numerical(format!("probabilities sum to {sum}")));
    }
    let clipped: Vec<f64> = p.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    Ok(clipped.into_iter().map(|x| x / total).collect())
}

/// Multinomial draw of `m` trials by sequential conditional binomials.
pub fn sample_multinomial<R: Rng + ?Sized>(p: &[f64], m: u64, rng: &mut R) -> Result<Vec<u64>> {
    let p = sanitize_probabilities(p)?;
    let mut counts = vec![0u64; p.len()];
    let mut remaining = m;
    let mut mass = 1.0;
    for (k, &pk) in p.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if k + 1 == p.len() {
            counts[k] = remaining;
            break;
        }
        let q = if mass > 0.0 { (pk / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(remaining, q)
            .map_err(|e| Error::Numerical(format!("binomial({remaining}, {q}): {e}")))?
            .sample(rng);
        counts[k] = draw;
        remaining -= draw;
        mass -= pk;
    }
    Ok(counts)
}

/// Simulates `m` shots of setting `s` on state `rho`.
pub fn simulate_counts<R: Rng + ?Sized>(
    rho: &HermitianMatrix,
    s: &MeasurementSetting,
    m: u64,
    rng: &mut R,
) -> Result<MeasurementRecord> {
    if m == 0 {
        return Err(Error::arg("shot count must be at least 1"));
    }
    let ens = SettingEnsemble::new(s.num_qubits(), vec![s.clone()])?;
    let p = SamplingOperator::new(ens).apply(rho)?;
    let counts = sample_multinomial(p.values(), m, rng)?;
    MeasurementRecord::new(s.clone(), counts)
}

/// Draws `m` shots for every block of `probabilities`; block `j` uses the
/// stream `(seed, j)`.
pub fn sample_records(
    probabilities: &DataVector,
    ens: &SettingEnsemble,
    m: u64,
    seed: u64,
) -> Result<Vec<MeasurementRecord>> {
    if m == 0 {
        return Err(Error::arg("shot count must be at least 1"));
    }
    if probabilities.len() != ens.data_len() {
        return Err(Error::DimensionMismatch { expected: ens.data_len(), found: probabilities.len() });
    }
    ens.iter()
        .zip(probabilities.blocks())
        .enumerate()
        .map(|(j, (s, p))| {
            let mut r = rng::stream(seed, &[j as u64]);
            MeasurementRecord::new(s.clone(), sample_multinomial(p, m, &mut r)?)
        })
        .collect()
}

/// Simulates `m` shots of every setting of the operator's ensemble.
pub fn simulate_records(
    rho: &HermitianMatrix,
    op: &SamplingOperator,
    m: u64,
    seed: u64,
) -> Result<Vec<MeasurementRecord>> {
    let p = op.apply(rho)?;
    sample_records(&p, op.ensemble(), m, seed)
}

/// Stacks record frequencies in ensemble order.
pub fn frequencies_vector(records: &[MeasurementRecord], ens: &SettingEnsemble) -> Result<DataVector> {
    if records.len() != ens.len() {
        return Err(Error::data(format!(
            "{} records for {} settings",
            records.len(),
            ens.len()
        )));
    }
    let mut values = Vec::with_capacity(ens.data_len());
    for (rec, s) in records.iter().zip(ens.iter()) {
        if &rec.setting != s {
            return Err(Error::data(format!("record for {} where {s} was expected", rec.setting)));
        }
        values.extend(rec.frequencies());
    }
    DataVector::new(values, ens.dim())
}

/// Ensemble of the settings in `records`, in record order.
pub fn ensemble_of(records: &[MeasurementRecord]) -> Result<SettingEnsemble> {
    let first = records.first().ok_or_else(|| Error::data("no measurement records"))?;
    SettingEnsemble::new(
        first.setting.num_qubits(),
        records.iter().map(|r| r.setting.clone()).collect(),
    )
}

/// Variance `p (1 - p) / m` of one frequency.
pub fn outcome_variance(p: f64, m: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::arg(format!("probability {p} outside [0, 1]")));
    }
    if m == 0 {
        return Err(Error::arg("shot count must be at least 1"));
    }
    Ok(p * (1.0 - p) / m as f64)
}

/// Sum of per-outcome variances `sum_k y_k (1 - y_k) / m` over all blocks;
/// the expected squared residual of the data around its mean.
pub fn expected_noise_level(y: &DataVector, m: u64) -> f64 {
    y.values().iter().map(|&p| p * (1.0 - p)).sum::<f64>() / m as f64
}

/// `sum_k (-1)^{parity(k)} w_k` over one outcome block.
pub fn parity_sum(block: &[f64]) -> f64 {
    block
        .iter()
        .enumerate()
        .map(|(k, &w)| if k.count_ones() % 2 == 0 { w } else { -w })
        .sum()
}

/// Pauli correlator `tr(rho W_1 (x) ... (x) W_L)` estimated from counts.
pub fn pauli_correlator(rec: &MeasurementRecord) -> f64 {
    parity_sum(&rec.frequencies())
}
