//! Bootstrap replicas of a measurement dataset.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::HermitianMatrix;
use crate::measurement::{frequencies_vector, sample_records, DataVector, SamplingOperator};
use crate::rng::derive_seed;

pub const PROBABILITY_ENTRY_TOL: f64 = 1e-12;
pub const PROBABILITY_SUM_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BootstrapMode {
    /// Resample from the probabilities of a fitted state.
    Parametric,
    /// Resample from the observed frequencies.
    NonParametric,
}

impl std::str::FromStr for BootstrapMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "parametric" => Ok(BootstrapMode::Parametric),
            "non-parametric" | "nonparametric" | "non_parametric" => Ok(BootstrapMode::NonParametric),
            _ => Err(Error::arg(format!("unknown bootstrap mode {s:?} (parametric, non-parametric)"))),
        }
    }
}

impl BootstrapMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BootstrapMode::Parametric => "parametric",
            BootstrapMode::NonParametric => "non-parametric",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSpec {
    pub mode: BootstrapMode,
    pub replicas: usize,
    pub shots_per_setting: u64,
    pub seed: u64,
}

impl BootstrapSpec {
    pub fn validate(&self) -> Result<()> {
        if self.replicas < 2 {
            return Err(Error::arg(format!("bootstrap needs at least 2 replicas, got {}", self.replicas)));
        }
        if self.shots_per_setting == 0 {
            return Err(Error::arg("shots_per_setting must be at least 1"));
        }
        Ok(())
    }

    /// Seed of replica `b`.
    pub fn replica_seed(&self, b: usize) -> u64 {
        derive_seed(self.seed, &[b as u64])
    }
}

/// What replicas are drawn from.
#[derive(Clone, Copy, Debug)]
pub enum BootstrapSource<'a> {
    State(&'a HermitianMatrix),
    Frequencies(&'a DataVector),
}

/// Source probabilities for the requested mode.
pub fn source_probabilities(source: BootstrapSource<'_>, op: &SamplingOperator, mode: BootstrapMode) -> Result<DataVector> {
    match (mode, source) {
        (BootstrapMode::Parametric, BootstrapSource::State(rho)) => op.apply(rho),
        (BootstrapMode::NonParametric, BootstrapSource::Frequencies(y)) => {
            if y.len() != op.data_len() {
                return Err(Error::DimensionMismatch { expected: op.data_len(), found: y.len() });
            }
            Ok(y.clone())
        }
        (BootstrapMode::Parametric, _) => Err(Error::arg("parametric bootstrap needs a state")),
        (BootstrapMode::NonParametric, _) => Err(Error::arg("non-parametric bootstrap needs frequencies")),
    }
}

/// One replica: `m` multinomial draws per setting against `probabilities`.
pub fn bootstrap_replica(probabilities: &DataVector, op: &SamplingOperator, spec: &BootstrapSpec, b: usize) -> Result<DataVector> {
    let ens = op.ensemble();
    let records = sample_records(probabilities, ens, spec.shots_per_setting, spec.replica_seed(b))?;
    frequencies_vector(&records, ens)
}

/// `spec.replicas` independent datasets.
pub fn bootstrap_datasets(source: BootstrapSource<'_>, op: &SamplingOperator, spec: &BootstrapSpec) -> Result<Vec<DataVector>> {
    spec.validate()?;
    let p = source_probabilities(source, op, spec.mode)?;
    p.check_probabilities(PROBABILITY_ENTRY_TOL, PROBABILITY_SUM_TOL)?;
    (0..spec.replicas).map(|b| bootstrap_replica(&p, op, spec, b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{Axis, MeasurementSetting, SettingEnsemble};

    fn z_op() -> SamplingOperator {
        let s = MeasurementSetting::uniform(Axis::Z, 1).unwrap();
        SamplingOperator::new(SettingEnsemble::new(1, vec![s]).unwrap())
    }

    #[test]
    fn parametric_pure_state_is_deterministic() {
        let op = z_op();
        let rho = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]);
        let spec = BootstrapSpec { mode: BootstrapMode::Parametric, replicas: 5, shots_per_setting: 30, seed: 1 };
        for y in bootstrap_datasets(BootstrapSource::State(&rho), &op, &spec).unwrap() {
            assert_eq!(y.values(), &[1.0, 0.0]);
        }
    }

    #[test]
    fn non_parametric_concentrates() {
        let op = z_op();
        let f = DataVector::new(vec![0.5, 0.5], 2).unwrap();
        let m = 100_000;
        let spec = BootstrapSpec { mode: BootstrapMode::NonParametric, replicas: 10, shots_per_setting: m, seed: 2 };
        let reps = bootstrap_datasets(BootstrapSource::Frequencies(&f), &op, &spec).unwrap();
        let sigma = (0.25 / m as f64).sqrt();
        for y in &reps {
            assert!((y.values()[0] - 0.5).abs() < 5.0 * sigma);
        }
        let again = bootstrap_datasets(BootstrapSource::Frequencies(&f), &op, &spec).unwrap();
        assert_eq!(reps.iter().map(|y| y.values().to_vec()).collect::<Vec<_>>(),
                   again.iter().map(|y| y.values().to_vec()).collect::<Vec<_>>());
        let seeds: std::collections::BTreeSet<_> = (0..10).map(|b| spec.replica_seed(b)).collect();
        assert_eq!(seeds.len(), 10);
    }

    #[test]
    fn rejects_bad_inputs() {
        let op = z_op();
        let f = DataVector::new(vec![0.7, 0.7], 2).unwrap();
        let spec = BootstrapSpec { mode: BootstrapMode::NonParametric, replicas: 3, shots_per_setting: 10, seed: 0 };
        assert!(matches!(bootstrap_datasets(BootstrapSource::Frequencies(&f), &op, &spec), Err(Error::Data(_))));
        let one = BootstrapSpec { replicas: 1, ..spec.clone() };
        assert!(bootstrap_datasets(BootstrapSource::Frequencies(&f), &op, &one).is_err());
        let rho = HermitianMatrix::maximally_mixed(2);
        assert!(bootstrap_datasets(BootstrapSource::State(&rho), &op, &spec).is_err());
    }
}
