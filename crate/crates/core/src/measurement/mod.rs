//! Pauli-basis measurements: settings, the sampling operator, shot noise and
//! file formats.

mod counts;
pub mod io;
mod operator;
mod pauli;

pub use counts::{
    ensemble_of, expected_noise_level, frequencies_vector, outcome_variance, parity_sum,
    pauli_correlator, sample_multinomial, sample_records, sanitize_probabilities, simulate_counts,
    simulate_records, MeasurementRecord,
};
pub use operator::{
    adjoint_sampling_operator, apply_sampling_operator, from_pauli_coefficients,
    pauli_coefficients, DataVector, SamplingOperator,
};
pub use pauli::{
    enumerate_settings, pauli_string_matrix, random_settings, setting_basis_unitary, Axis,
    MeasurementSetting, Pauli, SettingEnsemble, MAX_QUBITS,
};
