//! The five subcommands.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::manifest::{digest_input, InputDigest};
use super::CliError;
use crate::codes::{fidelity, logical_state, permute_qubits, read_state_json, write_state_json, LogicalLabel};
use crate::error::Error;
use crate::estimators::{EstimateResult, Estimator, EstimatorOptions};
use crate::format_float;
use crate::linalg::{herm_eig, random_fixed_rank_state, ComplexVector, DenseMatrixRecord, HermitianMatrix};
use crate::measurement::io::{read_counts_csv, read_settings_json, write_correlators_csv, write_counts_csv, write_settings_json};
use crate::measurement::{
    enumerate_settings, ensemble_of, frequencies_vector, random_settings, simulate_records, DataVector,
    MeasurementRecord, SamplingOperator, MAX_QUBITS,
};
use crate::rng::{derive_seed, stream};
use crate::selection::{identify_support, simulation_grid, BootstrapSpec, GridConfig, SupportOptions, ThresholdReport};

pub(crate) struct CommandOutput {
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Run(Error::Data(format!("{}: {e}", path.display()))))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(dir.join(name)).map_err(Error::from)?))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(Error::from)?;
    w.write_all(b"\n").map_err(Error::from)?;
    w.flush().map_err(Error::from)?;
    Ok(())
}

fn required<'a>(path: &'a Option<PathBuf>, key: &str) -> Result<&'a Path, CliError> {
    path.as_deref().ok_or_else(|| usage(format!("missing input: pass a counts file or set {key}")))
}

fn check_qubits(l: usize) -> Result<(), CliError> {
    if l == 0 || l > MAX_QUBITS {
        return Err(usage(format!("num_qubits must lie in 1..={MAX_QUBITS}, got {l}")));
    }
    Ok(())
}

struct Dataset {
    records: Vec<MeasurementRecord>,
    op: SamplingOperator,
    y: DataVector,
}

fn load_counts(path: &Path) -> Result<Dataset, CliError> {
    let records = read_counts_csv(open(path)?)?;
    let ens = ensemble_of(&records)?;
    let y = frequencies_vector(&records, &ens)?;
    Ok(Dataset { records, op: SamplingOperator::new(ens), y })
}

fn load_reference(
    path: &Option<PathBuf>,
    permutation: &Option<Vec<usize>>,
    inputs: &mut Vec<InputDigest>,
) -> Result<Option<ComplexVector>, CliError> {
    let Some(p) = path else { return Ok(None) };
    inputs.push(digest_input("reference", p)?);
    let psi = read_state_json(open(p)?)?;
    Ok(Some(match permutation {
        Some(perm) => permute_qubits(&psi, perm)?,
        None => psi,
    }))
}

fn clipped_fidelity(psi: &Option<ComplexVector>, rho: &HermitianMatrix) -> Result<Option<f64>, CliError> {
    match psi {
        Some(psi) => Ok(Some(fidelity(psi, rho)?.clamp(0.0, 1.0))),
        None => Ok(None),
    }
}

pub(crate) fn simulate(cfg: &RunConfig, out: &Path) -> Result<CommandOutput, CliError> {
    let s = &cfg.simulate;
    check_qubits(s.num_qubits)?;
    let d = 1usize << s.num_qubits;
    let mut inputs = Vec::new();
    if s.shots == 0 {
        return Err(usage("simulate.shots must be at least 1"));
    }
    let (rho, pure): (HermitianMatrix, Option<(String, ComplexVector)>) = match s.state.as_str() {
        "random" => {
            if s.rank == 0 || s.rank > d {
                return Err(usage(format!("simulate.rank must lie in 1..={d}")));
            }
            (random_fixed_rank_state(d, s.rank, &mut stream(cfg.seed, &[0]))?, None)
        }
        "file" => {
            let p = s.state_file.as_deref().ok_or_else(|| usage("state = \"file\" needs simulate.state_file"))?;
            inputs.push(digest_input("state", p)?);
            let psi = read_state_json(open(p)?)?;
            if psi.len() != d {
                return Err(CliError::Run(Error::Data(format!(
                    "state file has dimension {}, but num_qubits = {} needs {d}",
                    psi.len(),
                    s.num_qubits
                ))));
            }
            (HermitianMatrix::outer(&psi), Some(("file".to_string(), psi)))
        }
        label => {
            let label = LogicalLabel::parse(label).map_err(|_| {
                usage(format!("unknown state {label:?}; expected 0bar, 1bar, plus, random or file"))
            })?;
            if s.num_qubits != crate::codes::CODE_QUBITS {
                return Err(usage(format!("logical states need num_qubits = {}", crate::codes::CODE_QUBITS)));
            }
            let st = logical_state(label)?;
            (st.density_matrix(), Some((label.as_str().to_string(), st.vector)))
        }
    };
    let ens = match (&s.settings_file, s.n_settings) {
        (Some(p), _) => {
            inputs.push(digest_input("settings", p)?);
            let ens = read_settings_json(open(p)?)?;
            if ens.num_qubits() != s.num_qubits {
                return Err(CliError::Run(Error::Data(format!(
                    "settings file is for L = {}, config says {}",
                    ens.num_qubits(),
                    s.num_qubits
                ))));
            }
            ens
        }
        (None, Some(n)) => random_settings(s.num_qubits, n, &mut stream(cfg.seed, &[1]))?,
        (None, None) => enumerate_settings(s.num_qubits)?,
    };
    let op = SamplingOperator::new(ens);
    let records = simulate_records(&rho, &op, s.shots, derive_seed(cfg.seed, &[2]))?;

    let mut outputs = vec!["counts.csv".to_string(), "settings.json".to_string(), "truth.json".to_string()];
    let mut w = create(out, "counts.csv")?;
    write_counts_csv(&records, &mut w)?;
    w.flush().map_err(Error::from)?;
    let mut w = create(out, "settings.json")?;
    write_settings_json(op.ensemble(), &mut w)?;
    w.write_all(b"\n").map_err(Error::from)?;
    w.flush().map_err(Error::from)?;
    write_json(out, "truth.json", &DenseMatrixRecord::from_matrix(rho.as_matrix()))?;
    if let Some((label, psi)) = pure {
        let mut w = create(out, "state.json")?;
        write_state_json(Some(&label), &psi, &mut w)?;
        w.write_all(b"\n").map_err(Error::from)?;
        w.flush().map_err(Error::from)?;
        outputs.push("state.json".into());
    }
    Ok(CommandOutput { inputs, outputs })
}

/// Contents of `estimate.json`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EstimateReport {
    pub estimator: String,
    pub options: EstimatorOptions,
    pub num_qubits: usize,
    pub dim: usize,
    pub n_settings: usize,
    /// Eigenvalues of `rho_hat`, descending.
    pub eigenvalues: Vec<f64>,
    /// `<psi|rho_hat|psi>` clipped to [0, 1], when a reference was given.
    pub fidelity: Option<f64>,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
    pub raw_trace: f64,
    pub raw_rank: usize,
    pub collapsed: bool,
    pub mu: Option<f64>,
    pub rho_hat: DenseMatrixRecord,
}

impl EstimateReport {
    pub fn new(
        estimator: &Estimator,
        options: &EstimatorOptions,
        op: &SamplingOperator,
        res: &EstimateResult,
        fidelity: Option<f64>,
    ) -> Result<Self, Error> {
        Ok(Self {
            estimator: estimator.name().to_string(),
            options: options.clone(),
            num_qubits: op.num_qubits(),
            dim: op.dim(),
            n_settings: op.ensemble().len(),
            eigenvalues: herm_eig(&res.rho_hat)?.eigenvalues,
            fidelity,
            objective_trace: res.objective_trace.clone(),
            iterations: res.iterations,
            converged: res.converged,
            residual: res.residual,
            raw_trace: res.raw_trace,
            raw_rank: res.raw_rank,
            collapsed: res.collapsed,
            mu: res.mu,
            rho_hat: DenseMatrixRecord::from_matrix(res.rho_hat.as_matrix()),
        })
    }
}

fn estimator_from(name: &str, rank: usize, opts: &EstimatorOptions) -> Result<Estimator, CliError> {
    opts.validate().map_err(|e| usage(e.to_string()))?;
    Estimator::from_name(name, rank, opts).map_err(|e| usage(e.to_string()))
}

pub(crate) fn reconstruct(cfg: &RunConfig, out: &Path) -> Result<CommandOutput, CliError> {
    let r = &cfg.reconstruct;
    let estimator = estimator_from(&r.estimator, r.rank, &cfg.estimator)?;
    let counts = required(&r.counts, "reconstruct.counts")?;
    let mut inputs = vec![digest_input("counts", counts)?];
    let data = load_counts(counts)?;
    let reference = load_reference(&r.reference, &r.reference_permutation, &mut inputs)?;
    let res = estimator.estimate(&data.y, &data.op, &cfg.estimator)?;
    let report = EstimateReport::new(&estimator, &cfg.estimator, &data.op, &res, clipped_fidelity(&reference, &res.rho_hat)?)?;
    write_json(out, "estimate.json", &report)?;
    Ok(CommandOutput { inputs, outputs: vec!["estimate.json".into()] })
}

/// Contents of `threshold_report.json`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SelectRankReport {
    #[serde(flatten)]
    pub report: ThresholdReport,
    /// Fidelity of the full estimate and of the truncated state to the
    /// reference, when one was given.
    pub fidelity_estimate: Option<f64>,
    pub fidelity_truncated: Option<f64>,
}

pub(crate) fn select_rank(cfg: &RunConfig, out: &Path) -> Result<CommandOutput, CliError> {
    let s = &cfg.select_rank;
    let estimator = estimator_from(&s.estimator, s.rank, &cfg.estimator)?;
    if s.replicas < 2 {
        return Err(usage(format!("select_rank.replicas must be at least 2, got {}", s.replicas)));
    }
    if s.guta && !(s.guta_eps > 0.0 && s.guta_eps < 1.0) {
        return Err(usage("select_rank.guta_eps must lie in (0, 1)"));
    }
    let counts = required(&s.counts, "select_rank.counts")?;
    let mut inputs = vec![digest_input("counts", counts)?];
    let data = load_counts(counts)?;
    let shots = data.records[0].shots;
    if data.records.iter().any(|r| r.shots != shots) {
        return Err(CliError::Run(Error::Data("bootstrap needs the same shot count for every setting".into())));
    }
    let reference = load_reference(&s.reference, &s.reference_permutation, &mut inputs)?;
    let support = SupportOptions {
        estimator,
        options: cfg.estimator.clone(),
        bootstrap: BootstrapSpec { mode: s.mode, replicas: s.replicas, shots_per_setting: shots, seed: cfg.seed },
        guta_eps: s.guta.then_some(s.guta_eps),
        workers: cfg.workers,
    };
    let analysis = identify_support(&data.y, &data.op, &support)?;
    if analysis.report.overfit_warning {
        eprintln!(
            "warning: every eigenprojection passed the threshold (rank {}); replicas barely differ, the rank is likely overfit",
            analysis.report.selected_rank
        );
    }
    let report = SelectRankReport {
        fidelity_estimate: clipped_fidelity(&reference, &analysis.estimate.rho_hat)?,
        fidelity_truncated: clipped_fidelity(&reference, &analysis.truncated)?,
        report: analysis.report,
    };
    write_json(out, "threshold_report.json", &report)?;
    let est = EstimateReport::new(&estimator, &cfg.estimator, &data.op, &analysis.estimate, report.fidelity_estimate)?;
    write_json(out, "estimate.json", &est)?;
    Ok(CommandOutput { inputs, outputs: vec!["threshold_report.json".into(), "estimate.json".into()] })
}

pub const SUMMARY_HEADER: [&str; 10] = [
    "true_rank",
    "n_settings",
    "m",
    "trials",
    "mean_selected_rank",
    "mean_risk",
    "mean_guta_rank",
    "mean_guta_risk",
    "estimator",
    "bootstrap",
];

pub(crate) fn grid_config(cfg: &RunConfig) -> Result<GridConfig, CliError> {
    let g = &cfg.grid;
    let grid = GridConfig {
        num_qubits: g.num_qubits,
        ranks: g.ranks.clone(),
        settings: g.settings.clone(),
        repetitions: g.repetitions.clone(),
        trials: g.trials,
        replicas: g.replicas,
        bootstrap: g.bootstrap,
        estimator: estimator_from(&g.estimator, g.rank, &cfg.estimator)?,
        options: cfg.estimator.clone(),
        guta_eps: g.guta_eps,
        seed: cfg.seed,
    };
    grid.validate().map_err(|e| usage(e.to_string()))?;
    Ok(grid)
}

pub(crate) fn benchmark_grid(cfg: &RunConfig, out: &Path) -> Result<CommandOutput, CliError> {
    let grid = grid_config(cfg)?;
    let run = simulation_grid(&grid, out, cfg.workers)?;
    if !run.resumed.is_empty() {
        eprintln!("resumed {} of {} cells from {}", run.resumed.len(), run.results.len(), out.join("cells").display());
    }
    let mut w = csv::Writer::from_writer(create(out, "grid_summary.csv")?);
    let csv_err = |e: csv::Error| CliError::Run(Error::Data(format!("csv: {e}")));
    w.write_record(SUMMARY_HEADER).map_err(csv_err)?;
    for c in &run.results {
        w.write_record([
            c.cell.true_rank.to_string(),
            c.cell.n_settings.to_string(),
            c.cell.m.to_string(),
            c.trials.len().to_string(),
            format_float(c.mean_selected_rank()),
            format_float(c.mean_risk()),
            format_float(c.mean_guta_rank()),
            format_float(c.mean_guta_risk()),
            c.estimator.clone(),
            grid.bootstrap.as_str().to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(Error::from)?;
    Ok(CommandOutput {
        inputs: Vec::new(),
        outputs: vec!["grid.csv".into(), "grid_guta.csv".into(), "grid_summary.csv".into(), "cells/".into()],
    })
}

pub(crate) fn correlators(cfg: &RunConfig, out: &Path) -> Result<CommandOutput, CliError> {
    let counts = required(&cfg.correlators.counts, "correlators.counts")?;
    let inputs = vec![digest_input("counts", counts)?];
    let records = read_counts_csv(open(counts)?)?;
    let mut w = create(out, "correlators.csv")?;
    write_correlators_csv(&records, &mut w)?;
    w.flush().map_err(Error::from)?;
    Ok(CommandOutput { inputs, outputs: vec!["correlators.csv".into()] })
}
