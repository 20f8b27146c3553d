//! Shot-noise simulation of a random low-rank state, written as a counts CSV
//! to stdout.
//!
//!     cargo run --example simulate_counts -- 3 10 100 > counts.csv

use cstomo::linalg::random_fixed_rank_state;
use cstomo::measurement::io::write_counts_csv;
use cstomo::measurement::{random_settings, simulate_records, SamplingOperator};
use cstomo::rng::stream;

fn main() -> cstomo::Result<()> {
    let arg = |i: usize, default: u64| std::env::args().nth(i).and_then(|s| s.parse().ok()).unwrap_or(default);
    let (l, n, m) = (arg(1, 3) as usize, arg(2, 10) as usize, arg(3, 100));
    let rho = random_fixed_rank_state(1 << l, 1, &mut stream(42, &[0]))?;
    let op = SamplingOperator::new(random_settings(l, n, &mut stream(42, &[1]))?);
    let records = simulate_records(&rho, &op, m, 43)?;
    write_counts_csv(&records, std::io::stdout().lock())
}
