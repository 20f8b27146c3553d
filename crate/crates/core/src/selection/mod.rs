//! Quantum support identification: bootstrap replicas, eigenprojection
//! overlaps against the Haar threshold `e_d`, spectral truncation, the
//! eigenvalue-cut baseline, and the simulation grid.

mod bootstrap;
mod grid;
mod guta;
mod overlap;
mod support;

pub use bootstrap::{
    bootstrap_datasets, bootstrap_replica, source_probabilities, BootstrapMode, BootstrapSource, BootstrapSpec,
};
pub use guta::{guta_estimate_or_mixed, guta_gamma, guta_rank, guta_threshold_estimate, threshold_spectrum};
pub use overlap::{
    eigen_overlap, haar_threshold, mean_overlaps, mean_risk, rank_from_overlaps, select_rank, truncate_state,
    truncation_normalization,
};
pub use support::{identify_support, NULL_SPACE_REL, SupportAnalysis, SupportOptions, ThresholdReport};
pub use grid::{
    run_cell, run_trial, simulation_grid, write_grid_csv, write_guta_csv, CellResult, GridCell, GridConfig, GridPaths,
    GridRun, TrialOutcome, GRID_HEADER, GUTA_HEADER,
};
