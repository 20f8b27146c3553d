//! Pauli correlators from counts by parity sums, next to the exact traces.

use cstomo::codes::{logical_state, LogicalLabel};
use cstomo::measurement::{
    pauli_correlator, pauli_string_matrix, simulate_records, MeasurementSetting, SamplingOperator, SettingEnsemble,
};

fn main() -> cstomo::Result<()> {
    let zero = logical_state(LogicalLabel::Zero)?;
    let rho = zero.density_matrix();
    let settings: Vec<MeasurementSetting> =
        ["ZZZZZZZ", "XXXXXXX", "XXXXZZZ", "ZZZZXXX", "YYYYYYY"].iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
    let op = SamplingOperator::new(SettingEnsemble::new(7, settings)?);
    let records = simulate_records(&rho, &op, 400, 1)?;
    println!("{:>9} {:>9} {:>9}", "setting", "counts", "exact");
    for rec in &records {
        let paulis: Vec<_> = rec.setting.axes().iter().map(|a| a.pauli()).collect();
        let exact = (rho.as_matrix() * pauli_string_matrix(&paulis)).trace().re;
        println!("{:>9} {:>9.4} {:>9.4}", rec.setting.to_string(), pauli_correlator(rec), exact);
    }
    Ok(())
}
