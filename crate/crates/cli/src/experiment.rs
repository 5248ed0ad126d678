//! Seeded batch execution and result tables.

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use stochopt::aco::aco_run;
use stochopt::annealing::simulated_annealing;
use stochopt::effort::{computational_effort, success_curve, Effort, EnsembleStats, SuccessPredicate};
use stochopt::hopfield::{hopfield_solve, HopfieldConfig};
use stochopt::local_search::{hill_climb, random_search, steepest_descent, LocalSearchConfig};
use stochopt::problems::{ProblemInstance, Solution};
use stochopt::swarm::pso_run_instance;
use stochopt::tabu::tabu_search;
use stochopt::{Budget, Problem, RngStream, RunRecord, RunStatus};

use crate::config::{AlgorithmConfig, ExperimentConfig};
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub type Record = RunRecord<f64, Solution<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaRow {
    pub replica: u64,
    pub seed: u64,
    pub best_fitness: Option<f64>,
    pub evaluations: u64,
    pub evaluations_to_success: Option<u64>,
    pub success: bool,
    pub status: RunStatus,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub runs: usize,
    pub successes: usize,
    pub median_best: Option<f64>,
    pub mean_best: Option<f64>,
    pub min_best: Option<f64>,
    pub max_best: Option<f64>,
    pub predicate: Option<SuccessPredicate>,
    pub confidence: f64,
    /// `(n, P(n))` at every jump.
    pub success_curve: Vec<(u64, f64)>,
    pub effort: Option<Effort>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub rows: Vec<ReplicaRow>,
    pub summary: Summary,
    /// Best-so-far curve of each replica, in replica order.
    pub best_curves: Vec<Vec<(u64, f64)>>,
}

/// Full JSON report: the config echo is enough to re-run the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    #[serde(flatten)]
    pub table: ResultTable,
    pub wall_time_ms: f64,
}

impl Report {
    /// Copy with every wall-time field zeroed.
    pub fn without_timing(&self) -> Report {
        let mut r = self.clone();
        r.wall_time_ms = 0.0;
        for row in &mut r.table.rows {
            row.wall_time_ms = 0.0;
        }
        r
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let r: Report = serde_json::from_str(text).map_err(|e| CliError::Config(format!("report: {e}")))?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!("unsupported schema_version {}", r.schema_version)));
        }
        Ok(r)
    }
}

/// One replica of `cfg` on an already loaded instance.
pub fn run_replica(
    cfg: &ExperimentConfig,
    inst: &ProblemInstance<f64>,
    predicate: Option<&SuccessPredicate>,
    replica: u64,
) -> Result<Record, CliError> {
    let seed = cfg.base_seed.wrapping_add(replica);
    let mut rng = RngStream::new(seed);
    let mut budget = Budget::new(cfg.budget)?;
    if let (true, Some(p)) = (cfg.stop_at_target, predicate) {
        budget = budget.with_target(p.threshold());
    }
    let tsp = || match inst {
        ProblemInstance::Tsp(t) => Ok(t),
        _ => Err(CliError::Config(format!("{} needs a TSP instance", cfg.algorithm.name()))),
    };
    let rec = match &cfg.algorithm {
        AlgorithmConfig::Random => random_search(inst, &budget, &mut rng)?,
        AlgorithmConfig::Hillclimb { accept } => {
            let start = inst.random_solution(&mut rng);
            let ls = LocalSearchConfig { accept: *accept, ..LocalSearchConfig::new(budget) };
            hill_climb(inst, start, &ls, &mut rng)?
        }
        AlgorithmConfig::Steepest { restart_on_optimum } => {
            let start = inst.random_solution(&mut rng);
            let ls = LocalSearchConfig { restart_on_optimum: *restart_on_optimum, ..LocalSearchConfig::new(budget) };
            steepest_descent(inst, start, &ls, &mut rng)?
        }
        AlgorithmConfig::Sa(c) => simulated_annealing(inst, c, &budget, &mut rng)?,
        AlgorithmConfig::Tabu(c) => tabu_search(inst, c, &budget, &mut rng)?,
        AlgorithmConfig::Hopfield(c) => {
            let hc = HopfieldConfig { restarts: cfg.budget, ..*c };
            hopfield_solve(tsp()?, &hc, &mut rng)?.map_solution(Solution::Permutation)
        }
        AlgorithmConfig::Pso(c) => pso_run_instance(inst, c, budget, &mut rng)?,
        AlgorithmConfig::Aco(c) => aco_run(tsp()?, c, budget, &mut rng)?.map_solution(Solution::Permutation),
    };
    Ok(rec)
}

fn summarize(
    records: &[Record],
    cfg: &ExperimentConfig,
    predicate: Option<SuccessPredicate>,
) -> Result<(Summary, Vec<Option<u64>>), CliError> {
    let bests: Vec<f64> = records.iter().filter_map(|r| r.best_fitness).collect();
    let mut sorted = bests.clone();
    sorted.sort_by(f64::total_cmp);
    let median = (!sorted.is_empty()).then(|| {
        let m = sorted.len() / 2;
        if sorted.len() % 2 == 1 {
            sorted[m]
        } else {
            0.5 * (sorted[m - 1] + sorted[m])
        }
    });
    let mean = (!bests.is_empty()).then(|| bests.iter().sum::<f64>() / bests.len() as f64);
    let (curve, effort, times, successes) = match predicate {
        Some(p) => {
            let stats = EnsembleStats::from_records(records, cfg.budget, p)?;
            let effort = computational_effort(&stats, cfg.confidence).ok();
            (success_curve(&stats), effort, stats.success_times.clone(), stats.successes())
        }
        None => (Vec::new(), None, vec![None; records.len()], 0),
    };
    Ok((
        Summary {
            runs: records.len(),
            successes,
            median_best: median,
            mean_best: mean,
            min_best: sorted.first().copied(),
            max_best: sorted.last().copied(),
            predicate,
            confidence: cfg.confidence,
            success_curve: curve,
            effort,
        },
        times,
    ))
}

/// Records of every replica, in replica order, with their wall times.
pub fn run_records(
    cfg: &ExperimentConfig,
    base_dir: &Path,
) -> Result<(Vec<Record>, Vec<f64>, Option<SuccessPredicate>), CliError> {
    cfg.validate()?;
    let inst = cfg.instance.load(base_dir)?;
    cfg.algorithm.check_instance(&inst)?;
    let predicate = cfg.success.map(|s| s.resolve(&inst)).transpose()?;
    let mut records = Vec::with_capacity(cfg.replicas as usize);
    let mut times = Vec::with_capacity(cfg.replicas as usize);
    for i in 0..cfg.replicas {
        let t = Instant::now();
        records.push(run_replica(cfg, &inst, predicate.as_ref(), i)?);
        times.push(t.elapsed().as_secs_f64() * 1e3);
    }
    Ok((records, times, predicate))
}

/// Runs every replica; relative instance paths resolve against `base_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, base_dir: &Path) -> Result<Report, CliError> {
    let start = Instant::now();
    let (records, times, predicate) = run_records(cfg, base_dir)?;
    let (summary, success_times) = summarize(&records, cfg, predicate)?;
    let rows = records
        .iter()
        .zip(&times)
        .zip(&success_times)
        .enumerate()
        .map(|(i, ((r, &ms), &hit))| ReplicaRow {
            replica: i as u64,
            seed: r.seed,
            best_fitness: r.best_fitness,
            evaluations: r.evaluations,
            evaluations_to_success: hit,
            success: hit.is_some(),
            status: r.status,
            wall_time_ms: ms,
        })
        .collect();
    let best_curves = records.iter().map(|r| r.best_curve.clone()).collect();
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        table: ResultTable { rows, summary, best_curves },
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// One CSV row per replica, in replica order.
pub fn write_csv(table: &ResultTable, path: &Path) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    for row in &table.rows {
        w.serialize(CsvRow::from(row)).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn write_json(report: &Report, path: &Path) -> Result<(), CliError> {
    fs::write(path, report.to_json()? + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Flat CSV record (the csv crate cannot serialize nested enums inline).
#[derive(Serialize)]
struct CsvRow {
    replica: u64,
    seed: u64,
    best_fitness: Option<f64>,
    evaluations: u64,
    evaluations_to_success: Option<u64>,
    success: bool,
    status: String,
    wall_time_ms: f64,
}

impl From<&ReplicaRow> for CsvRow {
    fn from(r: &ReplicaRow) -> Self {
        let status =
            serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        CsvRow {
            replica: r.replica,
            seed: r.seed,
            best_fitness: r.best_fitness,
            evaluations: r.evaluations,
            evaluations_to_success: r.evaluations_to_success,
            success: r.success,
            status,
            wall_time_ms: r.wall_time_ms,
        }
    }
}
