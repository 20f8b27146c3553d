//! The rank-selection simulation study: random fixed-rank states, random
//! settings, bootstrap rank selection and the eigenvalue-cut baseline, over a
//! grid of (true rank, settings, repetitions) cells.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::bootstrap::{BootstrapMode, BootstrapSpec};
use super::guta::guta_estimate_or_mixed;
use super::support::{identify_support, SupportOptions};
use crate::error::{Error, Result};
use crate::estimators::{Estimator, EstimatorOptions};
use crate::format_float;
use crate::linalg::{frobenius_dist_sq, random_fixed_rank_state};
use crate::measurement::{frequencies_vector, random_settings, simulate_records, SamplingOperator, MAX_QUBITS};
use crate::parallel::map_indexed;
use crate::rng::{derive_seed, stream};

pub const GRID_HEADER: [&str; 8] = ["true_rank", "n_settings", "m", "trial", "selected_rank", "risk", "estimator", "seed"];
pub const GUTA_HEADER: [&str; 7] = ["true_rank", "n_settings", "m", "trial", "guta_rank", "risk", "seed"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub num_qubits: usize,
    pub ranks: Vec<usize>,
    pub settings: Vec<usize>,
    pub repetitions: Vec<u64>,
    pub trials: usize,
    pub replicas: usize,
    pub bootstrap: BootstrapMode,
    pub estimator: Estimator,
    pub options: EstimatorOptions,
    /// `eps` of the eigenvalue-cut baseline.
    pub guta_eps: f64,
    pub seed: u64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            num_qubits: 4,
            ranks: vec![1, 2, 4, 8],
            settings: vec![1, 10, 16, 32, 56, 81],
            repetitions: vec![5, 10, 16, 100],
            trials: 100,
            replicas: 20,
            bootstrap: BootstrapMode::Parametric,
            estimator: Estimator::LsPg,
            options: EstimatorOptions::default(),
            guta_eps: 0.05,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridCell {
    pub true_rank: usize,
    pub n_settings: usize,
    pub m: u64,
}

impl GridCell {
    fn file_stem(&self) -> String {
        format!("rank{}_n{}_m{}", self.true_rank, self.n_settings, self.m)
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_qubits == 0 || self.num_qubits > MAX_QUBITS {
            return Err(Error::arg(format!("num_qubits must lie in 1..={MAX_QUBITS}")));
        }
        let d = 1usize << self.num_qubits;
        let total = 3usize.pow(self.num_qubits as u32);
        if self.ranks.is_empty() || self.settings.is_empty() || self.repetitions.is_empty() {
            return Err(Error::arg("ranks, settings and repetitions must be non-empty"));
        }
        if let Some(r) = self.ranks.iter().find(|&&r| r == 0 || r > d) {
            return Err(Error::arg(format!("rank {r} outside 1..={d}")));
        }
        if let Some(n) = self.settings.iter().find(|&&n| n == 0 || n > total) {
            return Err(Error::arg(format!("settings count {n} outside 1..={total}")));
        }
        if self.repetitions.contains(&0) {
            return Err(Error::arg("repetitions must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::arg("trials must be at least 1"));
        }
        if !(self.guta_eps > 0.0 && self.guta_eps < 1.0) {
            return Err(Error::arg("guta_eps must lie in (0, 1)"));
        }
        self.options.validate()?;
        self.bootstrap_spec(0, 0).validate()
    }

    /// All cells in canonical order: rank, then settings, then repetitions.
    pub fn cells(&self) -> Vec<GridCell> {
        let mut out = Vec::new();
        for &true_rank in &self.ranks {
            for &n_settings in &self.settings {
                for &m in &self.repetitions {
                    out.push(GridCell { true_rank, n_settings, m });
                }
            }
        }
        out
    }

    fn bootstrap_spec(&self, m: u64, seed: u64) -> BootstrapSpec {
        BootstrapSpec { mode: self.bootstrap, replicas: self.replicas, shots_per_setting: m.max(1), seed }
    }

    /// Seed of one trial; all randomness in the trial derives from it.
    pub fn trial_seed(&self, cell: &GridCell, trial: usize) -> u64 {
        derive_seed(self.seed, &[cell.true_rank as u64, cell.n_settings as u64, cell.m, trial as u64])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub selected_rank: usize,
    pub risk: f64,
    pub guta_rank: usize,
    pub guta_risk: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub cell: GridCell,
    pub estimator: String,
    pub trials: Vec<TrialOutcome>,
}

impl CellResult {
    pub fn mean_selected_rank(&self) -> f64 {
        mean(self.trials.iter().map(|t| t.selected_rank as f64))
    }
    pub fn mean_risk(&self) -> f64 {
        mean(self.trials.iter().map(|t| t.risk))
    }
    pub fn mean_guta_rank(&self) -> f64 {
        mean(self.trials.iter().map(|t| t.guta_rank as f64))
    }
    pub fn mean_guta_risk(&self) -> f64 {
        mean(self.trials.iter().map(|t| t.guta_risk))
    }
    /// Fraction of trials whose selected rank equals the true rank.
    pub fn hit_rate(&self) -> f64 {
        mean(self.trials.iter().map(|t| f64::from(u8::from(t.selected_rank == self.cell.true_rank))))
    }
    pub fn guta_hit_rate(&self) -> f64 {
        mean(self.trials.iter().map(|t| f64::from(u8::from(t.guta_rank == self.cell.true_rank))))
    }
}

fn mean(it: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = it.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

/// One trial: draw a state and settings, simulate, reconstruct, bootstrap,
/// select the rank and truncate; also run the eigenvalue-cut baseline on the
/// same estimate.
pub fn run_trial(cfg: &GridConfig, cell: &GridCell, trial: usize) -> Result<TrialOutcome> {
    let seed = cfg.trial_seed(cell, trial);
    let d = 1usize << cfg.num_qubits;
    let mut r = stream(seed, &[0]);
    let rho = random_fixed_rank_state(d, cell.true_rank, &mut r)?;
    let op = SamplingOperator::new(random_settings(cfg.num_qubits, cell.n_settings, &mut r)?);
    let records = simulate_records(&rho, &op, cell.m, derive_seed(seed, &[1]))?;
    let y = frequencies_vector(&records, op.ensemble())?;
    let support = SupportOptions {
        estimator: cfg.estimator,
        options: EstimatorOptions { init_seed: derive_seed(seed, &[3]), ..cfg.options.clone() },
        bootstrap: cfg.bootstrap_spec(cell.m, derive_seed(seed, &[2])),
        guta_eps: None,
        workers: 1,
    };
    let analysis = identify_support(&y, &op, &support)?;
    let total = cell.n_settings as u64 * cell.m;
    let (guta_state, guta_rank) = guta_estimate_or_mixed(&analysis.spectrum, total, cfg.guta_eps)?;
    Ok(TrialOutcome {
        trial,
        seed,
        selected_rank: analysis.report.selected_rank,
        risk: frobenius_dist_sq(&rho, &analysis.truncated)?,
        guta_rank,
        guta_risk: frobenius_dist_sq(&rho, &guta_state)?,
    })
}

/// All trials of one cell, spread over `workers` threads.
pub fn run_cell(cfg: &GridConfig, cell: &GridCell, workers: usize) -> Result<CellResult> {
    cfg.validate()?;
    let trials = map_indexed(workers, cfg.trials, |t| run_trial(cfg, cell, t))?;
    Ok(CellResult { cell: *cell, estimator: cfg.estimator.name().to_string(), trials })
}

fn csv_err(e: csv::Error) -> Error {
    Error::data(format!("csv: {e}"))
}

/// Writes the overlap-method rows of `results` (header [`GRID_HEADER`]).
pub fn write_grid_csv<W: Write>(results: &[CellResult], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(GRID_HEADER).map_err(csv_err)?;
    for c in results {
        for t in &c.trials {
            w.write_record([
                c.cell.true_rank.to_string(),
                c.cell.n_settings.to_string(),
                c.cell.m.to_string(),
                t.trial.to_string(),
                t.selected_rank.to_string(),
                format_float(t.risk),
                c.estimator.clone(),
                t.seed.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes the baseline rows of `results` (header [`GUTA_HEADER`]).
pub fn write_guta_csv<W: Write>(results: &[CellResult], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(GUTA_HEADER).map_err(csv_err)?;
    for c in results {
        for t in &c.trials {
            w.write_record([
                c.cell.true_rank.to_string(),
                c.cell.n_settings.to_string(),
                c.cell.m.to_string(),
                t.trial.to_string(),
                t.guta_rank.to_string(),
                format_float(t.guta_risk),
                t.seed.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::data(format!("bad number {s:?} in cell file")))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::data(format!("bad integer {s:?} in cell file")))
}

/// Reads back a finished cell from its two CSV files.
fn read_cell(cell: &GridCell, grid: &Path, guta: &Path) -> Result<CellResult> {
    let mut main = csv::Reader::from_path(grid).map_err(csv_err)?;
    let mut base = csv::Reader::from_path(guta).map_err(csv_err)?;
    let mut trials = Vec::new();
    let mut estimator = String::new();
    for (a, b) in main.records().zip(base.records()) {
        let (a, b) = (a.map_err(csv_err)?, b.map_err(csv_err)?);
        estimator = a[6].to_string();
        trials.push(TrialOutcome {
            trial: parse_usize(&a[3])?,
            seed: a[7].parse().map_err(|_| Error::data("bad seed in cell file"))?,
            selected_rank: parse_usize(&a[4])?,
            risk: parse_f64(&a[5])?,
            guta_rank: parse_usize(&b[4])?,
            guta_risk: parse_f64(&b[5])?,
        });
    }
    Ok(CellResult { cell: *cell, estimator, trials })
}

/// Paths written by [`simulation_grid`] under its output directory.
pub struct GridPaths {
    pub grid_csv: PathBuf,
    pub guta_csv: PathBuf,
    pub cells_dir: PathBuf,
}

impl GridPaths {
    pub fn new(out: &Path) -> Self {
        Self {
            grid_csv: out.join("grid.csv"),
            guta_csv: out.join("grid_guta.csv"),
            cells_dir: out.join("cells"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GridRun {
    pub results: Vec<CellResult>,
    /// Cells loaded from a previous run instead of being recomputed.
    pub resumed: Vec<GridCell>,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Runs every cell of `cfg`, writing each finished cell under `out/cells/`
/// and, at the end, `out/grid.csv` and `out/grid_guta.csv` in canonical cell
/// order. Cells already present from an earlier run with the same config are
/// loaded, not recomputed.
pub fn simulation_grid(cfg: &GridConfig, out: &Path, workers: usize) -> Result<GridRun> {
    cfg.validate()?;
    let paths = GridPaths::new(out);
    fs::create_dir_all(&paths.cells_dir)?;
    let fingerprint = paths.cells_dir.join("config.json");
    let current = serde_json::to_string_pretty(cfg)?;
    match fs::read_to_string(&fingerprint) {
        Ok(previous) if previous != current => {
            return Err(Error::arg(format!(
                "{} holds cells from a different grid config; use a fresh output directory",
                paths.cells_dir.display()
            )))
        }
        Ok(_) => {}
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => write_atomic(&fingerprint, current.as_bytes())?,
        Err(e) => return Err(e.into()),
    }

    let mut results = Vec::new();
    let mut resumed = Vec::new();
    for cell in cfg.cells() {
        let stem = cell.file_stem();
        let grid_path = paths.cells_dir.join(format!("{stem}.csv"));
        let guta_path = paths.cells_dir.join(format!("{stem}.guta.csv"));
        if grid_path.exists() && guta_path.exists() {
            let r = read_cell(&cell, &grid_path, &guta_path)?;
            if r.trials.len() == cfg.trials {
                results.push(r);
                resumed.push(cell);
                continue;
            }
        }
        let r = run_cell(cfg, &cell, workers)?;
        let (mut a, mut b) = (Vec::new(), Vec::new());
        write_grid_csv(std::slice::from_ref(&r), &mut a)?;
        write_guta_csv(std::slice::from_ref(&r), &mut b)?;
        write_atomic(&guta_path, &b)?;
        write_atomic(&grid_path, &a)?;
        results.push(r);
    }
    let (mut a, mut b) = (Vec::new(), Vec::new());
    write_grid_csv(&results, &mut a)?;
    write_guta_csv(&results, &mut b)?;
    write_atomic(&paths.grid_csv, &a)?;
    write_atomic(&paths.guta_csv, &b)?;
    Ok(GridRun { results, resumed })
}
