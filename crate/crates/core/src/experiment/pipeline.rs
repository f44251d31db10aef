//! Stages and their on-disk artifacts.
//!
//! ```text
//! out/
//!   circuits/circuit_000.txt ...   generate
//!   inputs.csv  noise.toml  generate.json
//!   design/triplets.txt rows.csv columns.csv design.json
//!   estimates_S{S}.csv  simulate_S{S}.json
//!   solution_{label}.csv  solve_{label}.json
//!   summary.json                   report
//! ```

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, ExperimentError, Stats};
use crate::clifford::Circuit;
use crate::design::{
    analyze, build_design, diagnostics, gram_rank, solve, write_column_map, write_row_map, write_solution_csv,
    write_triplets, align_estimates, DesignError, DesignMatrix, Diagnostics, InventoryMode, RankReport, RowKey,
};
use crate::generator::{generate_experiments, Experiment, ExperimentDesignSpec};
use crate::noise::{load_noise_model, random_noise_model, save_noise_model, GateInventory, NoiseModel};
use crate::pauli::PauliString;
use crate::seeding::derive_seed;
use crate::simulator::{exact_circuit_eigenvalue, read_estimates_csv, simulate_experiment, write_estimates_csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Generate,
    Design,
    Simulate,
    Solve,
    Report,
    All,
}

impl Stage {
    pub const NAMES: [&'static str; 6] = ["generate", "design", "simulate", "solve", "report", "all"];
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Stage, String> {
        Ok(match s {
            "generate" => Stage::Generate,
            "design" => Stage::Design,
            "simulate" => Stage::Simulate,
            "solve" => Stage::Solve,
            "report" => Stage::Report,
            "all" => Stage::All,
            _ => return Err(format!("unknown stage {s:?}; expected one of {}", Stage::NAMES.join(", "))),
        })
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = *self as usize;
        f.write_str(Stage::NAMES[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Solve this estimates file instead of the simulated ones.
    pub estimates: Option<PathBuf>,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> RunOptions {
        RunOptions { out_dir: out_dir.into(), estimates: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub attempt: u64,
    pub pad_depth: usize,
    pub circuits: usize,
    pub rank: usize,
    pub columns: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateRecord {
    pub n: usize,
    pub circuits: usize,
    pub pad_depth: usize,
    pub half_depths: Vec<usize>,
    pub weight_two_circuits: Vec<usize>,
    pub inputs: usize,
    pub dropped_inputs: usize,
    pub attempts: Vec<AttemptRecord>,
    /// `"file:<path>"` or `"random:<seed>"`.
    pub noise_source: String,
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignRecord {
    pub rows: usize,
    pub columns: usize,
    pub nnz: usize,
    /// Gates plus measured qubits.
    pub modeled_gates: usize,
    pub rank: RankReport,
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateRecord {
    pub shots: u64,
    pub rows: usize,
    pub batches_per_circuit: Vec<usize>,
    pub total_batches: usize,
    /// Shots times total batches; one shot of a batch counts as one sample.
    pub sample_count: u64,
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub label: String,
    pub estimates: String,
    pub rows: usize,
    pub columns: usize,
    pub diagnostics: Diagnostics,
    /// Per-gate TVD, when truth is available.
    pub tvd: Option<Stats>,
    /// Per-gate largest eigenvalue error.
    pub eigenvalue_error: Option<Stats>,
    /// `|Λ̂ - Λ|` over the circuit eigenvalue rows.
    pub circuit_eigenvalue_error: Option<Stats>,
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotSummary {
    pub label: String,
    pub shots: Option<u64>,
    pub total_batches: Option<usize>,
    pub sample_count: Option<u64>,
    pub rows_used: usize,
    pub dropped_rows: usize,
    pub truncated_variables: usize,
    pub clipped_gates: usize,
    pub residual_norm: f64,
    pub tvd: Option<Stats>,
    pub eigenvalue_error: Option<Stats>,
    pub circuit_eigenvalue_error: Option<Stats>,
    pub simulate_seconds: Option<f64>,
    pub solve_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub circuits: usize,
    pub pad_depth: usize,
    pub modeled_gates: usize,
    pub parameters: usize,
    pub rows: usize,
    pub rank: usize,
    pub full_rank: bool,
    pub pinv_norm: Option<f64>,
    pub condition: Option<f64>,
    pub generate_attempts: usize,
    pub runs: Vec<ShotSummary>,
    /// Every solve fit its rows exactly.
    pub zero_residual: bool,
    pub generate_seconds: f64,
    pub design_seconds: f64,
}

/// Cap the worker pool at `ACES_THREADS` if set. Returns the cap.
pub fn configure_threads() -> Result<Option<usize>, ExperimentError> {
    let Ok(v) = std::env::var("ACES_THREADS") else {
        return Ok(None);
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| ExperimentError::Config(format!("ACES_THREADS must be a positive integer, got {v:?}")))?;
    // a second call in one process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(Some(n))
}

/// Circuits that pass the rank check, with the attempt history.
#[derive(Debug, Clone)]
pub struct GeneratedDesign {
    pub spec: ExperimentDesignSpec,
    pub experiments: Vec<Experiment>,
    pub attempts: Vec<AttemptRecord>,
}

fn full_design(experiments: &[Experiment]) -> Result<DesignMatrix, DesignError> {
    let circuits: Vec<Circuit> = experiments.iter().map(|e| e.circuit.clone()).collect();
    let rows: Vec<RowKey> = experiments
        .iter()
        .enumerate()
        .flat_map(|(i, e)| e.inputs.iter().map(move |p| RowKey { circuit_id: i, input: p.clone() }))
        .collect();
    let inventory = GateInventory::from_circuits(&circuits);
    build_design(&circuits, &rows, &inventory, InventoryMode::Frozen)
}

/// Draw circuits until the design has rank `N`. A deficient attempt raises
/// the pad depth, or adds a circuit once the pad is at its maximum.
pub fn generate_with_retry(config: &ExperimentConfig) -> Result<GeneratedDesign, ExperimentError> {
    let d = &config.design;
    let mut circuits = d.circuits;
    let mut pad = d.pad_depth;
    let mut attempts = Vec::new();
    for attempt in 0..=d.max_retries as u64 {
        let spec = d.spec(config.seed, circuits, pad);
        let experiments = generate_experiments(&spec, attempt)?;
        let a = full_design(&experiments)?;
        let rank = gram_rank(&a);
        attempts.push(AttemptRecord { attempt, pad_depth: pad, circuits, rank, columns: a.column_count() });
        if rank == a.column_count() {
            return Ok(GeneratedDesign { spec, experiments, attempts });
        }
        if attempt == d.max_retries as u64 {
            let last = analyze(&a, d.dense_limit)
                .require_full_rank()
                .err()
                .unwrap_or(DesignError::RankDeficient { rank, columns: a.column_count(), combinations: String::new() });
            return Err(ExperimentError::RankFailure { attempts: attempts.len(), last });
        }
        if pad + d.pad_increment <= d.max_pad_depth && d.pad_increment > 0 {
            pad += d.pad_increment;
        } else {
            circuits += 1;
        }
    }
    unreachable!("the last attempt returns")
}

fn write(path: &Path, text: &str) -> Result<(), ExperimentError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| ExperimentError::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| ExperimentError::io(path, e))
}

fn read(path: &Path) -> Result<String, ExperimentError> {
    if !path.exists() {
        return Err(ExperimentError::Missing(path.display().to_string()));
    }
    fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ExperimentError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| ExperimentError::io(path, e))?;
    text.push('\n');
    write(path, &text)
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, ExperimentError> {
    serde_json::from_str(&read(path)?).map_err(|e| ExperimentError::io(path, e))
}

fn circuit_path(out: &Path, i: usize) -> PathBuf {
    out.join("circuits").join(format!("circuit_{i:03}.txt"))
}

fn write_inputs_csv(experiments: &[Experiment]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["circuit_id", "input_pauli"]).expect("in-memory write");
    for (i, e) in experiments.iter().enumerate() {
        for p in &e.inputs {
            w.write_record([i.to_string(), p.to_string()]).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}

#[derive(Deserialize)]
struct InputRow {
    circuit_id: usize,
    input_pauli: String,
}

/// Saved circuits and their inputs.
fn load_experiments(out: &Path) -> Result<Vec<Experiment>, ExperimentError> {
    let inputs_path = out.join("inputs.csv");
    let text = read(&inputs_path)?;
    let mut circuits = Vec::new();
    loop {
        let path = circuit_path(out, circuits.len());
        if !path.exists() {
            break;
        }
        circuits.push(Circuit::from_text(&read(&path)?)?);
    }
    if circuits.is_empty() {
        return Err(ExperimentError::Missing(circuit_path(out, 0).display().to_string()));
    }
    let mut experiments: Vec<Experiment> =
        circuits.into_iter().map(|circuit| Experiment { circuit, inputs: Vec::new(), dropped_inputs: 0 }).collect();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    for row in reader.deserialize::<InputRow>() {
        let row = row.map_err(|e| ExperimentError::io(&inputs_path, e))?;
        let p: PauliString = row.input_pauli.parse().map_err(|e| ExperimentError::io(&inputs_path, e))?;
        experiments
            .get_mut(row.circuit_id)
            .ok_or(DesignError::UnknownCircuit(row.circuit_id))?
            .inputs
            .push(p);
    }
    Ok(experiments)
}

fn load_noise(out: &Path) -> Result<NoiseModel, ExperimentError> {
    Ok(load_noise_model(&read(&out.join("noise.toml"))?)?)
}

fn generate_stage(config: &ExperimentConfig, out: &Path) -> Result<GenerateRecord, ExperimentError> {
    let start = Instant::now();
    let generated = generate_with_retry(config)?;
    let circuits: Vec<Circuit> = generated.experiments.iter().map(|e| e.circuit.clone()).collect();
    let inventory = GateInventory::from_circuits(&circuits);
    let (noise, noise_source) = match &config.noise.file {
        Some(f) => {
            let text = fs::read_to_string(f).map_err(|e| ExperimentError::io(f, e))?;
            (load_noise_model(&text)?, format!("file:{}", f.display()))
        }
        None => {
            let seed = config.noise.seed.unwrap_or_else(|| derive_seed(config.seed, "noise", &[]));
            (random_noise_model(&inventory, &config.noise.ranges, seed)?, format!("random:{seed}"))
        }
    };
    noise.covers(&inventory)?;

    if out.join("circuits").exists() {
        // stale circuits from a larger earlier run would be read back
        fs::remove_dir_all(out.join("circuits")).map_err(|e| ExperimentError::io(&out.join("circuits"), e))?;
    }
    for (i, c) in circuits.iter().enumerate() {
        write(&circuit_path(out, i), &c.to_text())?;
    }
    write(&out.join("inputs.csv"), &write_inputs_csv(&generated.experiments))?;
    write(&out.join("noise.toml"), &save_noise_model(&noise))?;
    let spec = &generated.spec;
    let record = GenerateRecord {
        n: spec.n,
        circuits: spec.circuit_count(),
        pad_depth: spec.pad_depth,
        half_depths: spec.half_depths.clone(),
        weight_two_circuits: spec.weight_two_circuits.clone(),
        inputs: generated.experiments.iter().map(|e| e.inputs.len()).sum(),
        dropped_inputs: generated.experiments.iter().map(|e| e.dropped_inputs).sum(),
        attempts: generated.attempts,
        noise_source,
        runtime_seconds: start.elapsed().as_secs_f64(),
    };
    write_json(&out.join("generate.json"), &record)?;
    Ok(record)
}

fn design_stage(config: &ExperimentConfig, out: &Path) -> Result<DesignRecord, ExperimentError> {
    let start = Instant::now();
    let experiments = load_experiments(out)?;
    let a = full_design(&experiments)?;
    let rank = analyze(&a, config.design.dense_limit);
    let dir = out.join("design");
    write(&dir.join("triplets.txt"), &write_triplets(&a))?;
    write(&dir.join("rows.csv"), &write_row_map(&a))?;
    write(&dir.join("columns.csv"), &write_column_map(&a))?;
    let inventory = GateInventory::from_circuits(experiments.iter().map(|e| &e.circuit));
    let record = DesignRecord {
        rows: a.row_count(),
        columns: a.column_count(),
        nnz: a.nnz(),
        modeled_gates: inventory.gate_count(),
        rank: rank.clone(),
        runtime_seconds: start.elapsed().as_secs_f64(),
    };
    write_json(&dir.join("design.json"), &record)?;
    rank.require_full_rank()?;
    Ok(record)
}

fn simulate_stage(config: &ExperimentConfig, out: &Path) -> Result<Vec<SimulateRecord>, ExperimentError> {
    let experiments = load_experiments(out)?;
    let noise = load_noise(out)?;
    let options = config.simulator.options();
    let mut records = Vec::new();
    for &shots in &config.shots {
        let start = Instant::now();
        let per_circuit = experiments
            .par_iter()
            .enumerate()
            .map(|(i, e)| {
                let (estimates, batches) =
                    simulate_experiment(&e.circuit, i, &noise, &e.inputs, shots, config.seed, options)?;
                let truth = e
                    .inputs
                    .iter()
                    .map(|p| exact_circuit_eigenvalue(&e.circuit, &noise, p))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((estimates, batches.len(), truth))
            })
            .collect::<Result<Vec<_>, ExperimentError>>()?;
        let mut estimates = Vec::new();
        let mut truth = Vec::new();
        let mut batches_per_circuit = Vec::new();
        for (est, b, t) in per_circuit {
            estimates.extend(est);
            truth.extend(t);
            batches_per_circuit.push(b);
        }
        write(&out.join(format!("estimates_S{shots}.csv")), &write_estimates_csv(&estimates, Some(&truth)))?;
        let total_batches: usize = batches_per_circuit.iter().sum();
        let record = SimulateRecord {
            shots,
            rows: estimates.len(),
            batches_per_circuit,
            total_batches,
            sample_count: shots * total_batches as u64,
            runtime_seconds: start.elapsed().as_secs_f64(),
        };
        write_json(&out.join(format!("simulate_S{shots}.json")), &record)?;
        records.push(record);
    }
    Ok(records)
}

/// `(label, path)` of every estimates file the solve stage reads.
fn estimate_sources(config: &ExperimentConfig, options: &RunOptions) -> Vec<(String, PathBuf)> {
    match &options.estimates {
        Some(p) => {
            let label = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "external".into());
            vec![(label, p.clone())]
        }
        None => config
            .shots
            .iter()
            .map(|s| (format!("S{s}"), options.out_dir.join(format!("estimates_S{s}.csv"))))
            .collect(),
    }
}

fn solve_stage(config: &ExperimentConfig, options: &RunOptions) -> Result<Vec<SolveRecord>, ExperimentError> {
    let out = options.out_dir.as_path();
    let circuits: Vec<Circuit> = load_experiments(out)?.into_iter().map(|e| e.circuit).collect();
    let inventory = GateInventory::from_circuits(&circuits);
    let noise_path = out.join("noise.toml");
    let mut records = Vec::new();
    for (label, path) in estimate_sources(config, options) {
        let start = Instant::now();
        let table = read_estimates_csv(&read(&path)?)?;
        let rows: Vec<RowKey> =
            table.estimates.iter().map(|e| RowKey { circuit_id: e.circuit_id, input: e.input.clone() }).collect();
        let a = build_design(&circuits, &rows, &inventory, InventoryMode::Frozen)?;
        let (lambda_hat, stderr) = align_estimates(&a, &table.estimates)?;
        let mut solution = solve(&a, &lambda_hat, Some(&stderr), &config.solver)?;
        // truth only for simulated data scored against the model that made it
        let truth = table.truth.is_some() && noise_path.exists();
        if truth {
            solution.attach_truth(&load_noise(out)?)?;
        }
        write(&out.join(format!("solution_{label}.csv")), &write_solution_csv(&solution))?;
        let circuit_errors: Option<Vec<f64>> =
            table.truth.as_ref().map(|t| lambda_hat.iter().zip(t).map(|(a, b)| (a - b).abs()).collect());
        let eigenvalue_errors: Vec<f64> =
            solution.gates.iter().filter_map(|g| g.truth.as_ref().map(|t| t.max_eigenvalue_error)).collect();
        let record = SolveRecord {
            label: label.clone(),
            estimates: path.display().to_string(),
            rows: a.row_count(),
            columns: a.column_count(),
            diagnostics: diagnostics(&a, &solution, config.design.dense_limit),
            tvd: Stats::of(&solution.tvds()),
            eigenvalue_error: Stats::of(&eigenvalue_errors),
            circuit_eigenvalue_error: circuit_errors.as_deref().and_then(Stats::of),
            runtime_seconds: start.elapsed().as_secs_f64(),
        };
        write_json(&out.join(format!("solve_{label}.json")), &record)?;
        records.push(record);
    }
    Ok(records)
}

fn report_stage(config: &ExperimentConfig, options: &RunOptions) -> Result<Summary, ExperimentError> {
    let out = options.out_dir.as_path();
    let generate: GenerateRecord = read_json(&out.join("generate.json"))?;
    let design: DesignRecord = read_json(&out.join("design").join("design.json"))?;
    let mut runs = Vec::new();
    for (label, _) in estimate_sources(config, options) {
        let solve: SolveRecord = read_json(&out.join(format!("solve_{label}.json")))?;
        let simulate: Option<SimulateRecord> = match label.strip_prefix('S').and_then(|s| s.parse::<u64>().ok()) {
            Some(s) if options.estimates.is_none() => Some(read_json(&out.join(format!("simulate_S{s}.json")))?),
            _ => None,
        };
        let d = &solve.diagnostics;
        runs.push(ShotSummary {
            label,
            shots: simulate.as_ref().map(|s| s.shots),
            total_batches: simulate.as_ref().map(|s| s.total_batches),
            sample_count: simulate.as_ref().map(|s| s.sample_count),
            rows_used: solve.rows - d.dropped_rows,
            dropped_rows: d.dropped_rows,
            truncated_variables: d.truncated_variables,
            clipped_gates: d.clipped_gates,
            residual_norm: d.residual_norm,
            tvd: solve.tvd,
            eigenvalue_error: solve.eigenvalue_error,
            circuit_eigenvalue_error: solve.circuit_eigenvalue_error,
            simulate_seconds: simulate.as_ref().map(|s| s.runtime_seconds),
            solve_seconds: solve.runtime_seconds,
        });
    }
    let summary = Summary {
        n: generate.n,
        circuits: generate.circuits,
        pad_depth: generate.pad_depth,
        modeled_gates: design.modeled_gates,
        parameters: design.columns,
        rows: design.rows,
        rank: design.rank.rank,
        full_rank: design.rank.full_rank(),
        pinv_norm: design.rank.pinv_norm,
        condition: design.rank.condition,
        generate_attempts: generate.attempts.len(),
        zero_residual: !runs.is_empty() && runs.iter().all(|r| r.residual_norm < 1e-9),
        runs,
        generate_seconds: generate.runtime_seconds,
        design_seconds: design.runtime_seconds,
    };
    write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Run one stage. Returns the summary for `Report` and `All`.
pub fn run_stage(config: &ExperimentConfig, stage: Stage, options: &RunOptions) -> Result<Option<Summary>, ExperimentError> {
    let out = options.out_dir.as_path();
    match stage {
        Stage::Generate => generate_stage(config, out).map(|_| None),
        Stage::Design => design_stage(config, out).map(|_| None),
        Stage::Simulate => simulate_stage(config, out).map(|_| None),
        Stage::Solve => solve_stage(config, options).map(|_| None),
        Stage::Report => report_stage(config, options).map(Some),
        Stage::All => run_pipeline(config, options).map(Some),
    }
}

/// Every stage in order.
pub fn run_pipeline(config: &ExperimentConfig, options: &RunOptions) -> Result<Summary, ExperimentError> {
    let out = options.out_dir.as_path();
    generate_stage(config, out)?;
    design_stage(config, out)?;
    if options.estimates.is_none() {
        simulate_stage(config, out)?;
    }
    solve_stage(config, options)?;
    report_stage(config, options)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::with_seed(seed);
        cfg.design.n = 4;
        cfg.design.circuits = 8;
        cfg.design.max_half_depth = 3;
        cfg.design.weight_two_circuits = 8;
        cfg.shots = vec![2000];
        cfg
    }

    #[test]
    fn stage_names_round_trip() {
        for name in Stage::NAMES {
            assert_eq!(name.parse::<Stage>().unwrap().to_string(), name);
        }
        assert!("bogus".parse::<Stage>().is_err());
    }

    #[test]
    fn small_pipeline_runs() {
        let dir = tempfile::tempdir().unwrap();
        let summary = run_pipeline(&small(5), &RunOptions::new(dir.path())).unwrap();
        assert!(summary.full_rank);
        assert_eq!(summary.rank, summary.parameters);
        let run = &summary.runs[0];
        assert_eq!(run.sample_count, Some(2000 * run.total_batches.unwrap() as u64));
        assert!(run.tvd.is_some());
    }

    #[test]
    fn missing_upstream_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let err = run_stage(&small(5), Stage::Simulate, &RunOptions::new(dir.path())).unwrap_err();
        assert!(matches!(err, ExperimentError::Missing(_)), "{err}");
    }

    #[test]
    fn retry_gives_up_with_rank_failure() {
        let mut cfg = small(1);
        cfg.design.n = 6;
        cfg.design.circuits = 1;
        cfg.design.half_depths = Some(vec![1]);
        cfg.design.pad_depth = 0;
        cfg.design.max_retries = 0;
        assert!(matches!(generate_with_retry(&cfg), Err(ExperimentError::RankFailure { .. })));
    }
}
