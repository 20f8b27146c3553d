pub mod cli;
pub mod codes;
pub mod error;
pub mod estimators;
pub mod linalg;
pub mod measurement;
pub mod parallel;
pub mod rng;
pub mod selection;

pub use error::{Error, Result};

/// Floats in CSV output: 17 significant digits, scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}
