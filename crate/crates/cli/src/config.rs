//! Experiment configuration files (JSON).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stochopt::aco::AcoConfig;
use stochopt::annealing::SaConfig;
use stochopt::effort::{SuccessPredicate, Tolerance};
use stochopt::hopfield::HopfieldConfig;
use stochopt::local_search::AcceptRule;
use stochopt::problems::{ContinuousLandscape, LandscapeKind, ProblemInstance, TabletopInstance};
use stochopt::swarm::SwarmConfig;
use stochopt::tabu::TabuConfig;

use crate::parse::{parse_binpacking_file, parse_tsp_file};
use crate::CliError;

/// Largest instances the exhaustive oracle accepts.
pub const ORACLE_MAX_CITIES: usize = 10;
pub const ORACLE_MAX_ITEMS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSpec {
    /// TSPLIB-subset file; relative paths resolve against the config file.
    Tsp { path: PathBuf },
    BinPacking {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        penalty: Option<f64>,
    },
    Landscape {
        kind: LandscapeKind,
        dimension: usize,
        /// Same bounds for every variable; the kind's default box otherwise.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bounds: Option<(f64, f64)>,
    },
    /// The eight-state cube landscape.
    Cube,
}

impl InstanceSpec {
    pub fn load(&self, base_dir: &Path) -> Result<ProblemInstance<f64>, CliError> {
        Ok(match self {
            InstanceSpec::Tsp { path } => ProblemInstance::Tsp(parse_tsp_file(&base_dir.join(path))?),
            InstanceSpec::BinPacking { path, penalty } => {
                let mut inst = parse_binpacking_file(&base_dir.join(path))?;
                if let Some(p) = penalty {
                    inst = inst.with_penalty(*p)?;
                }
                ProblemInstance::BinPacking(inst)
            }
            InstanceSpec::Landscape { kind, dimension, bounds } => {
                let land = match bounds {
                    None => ContinuousLandscape::new(*kind, *dimension)?,
                    Some(b) => ContinuousLandscape::with_bounds(*kind, vec![*b; *dimension])?,
                };
                ProblemInstance::Continuous(land)
            }
            InstanceSpec::Cube => ProblemInstance::Tabletop(TabletopInstance::cube()),
        })
    }
}

/// Known optimum of `inst`: exhaustive search for small TSP and bin
/// packing instances, the analytic minimum for landscapes.
pub fn oracle_optimum(inst: &ProblemInstance<f64>) -> Result<f64, CliError> {
    match inst {
        ProblemInstance::Tsp(t) if t.len() <= ORACLE_MAX_CITIES => Ok(t.exhaustive_optimum()?.0),
        ProblemInstance::Tsp(t) => Err(CliError::Config(format!(
            "no oracle for {} cities (limit {ORACLE_MAX_CITIES}); set success.target",
            t.len()
        ))),
        ProblemInstance::BinPacking(b) if b.len() <= ORACLE_MAX_ITEMS => Ok(b.exhaustive_optimum()?.0 as f64),
        ProblemInstance::BinPacking(b) => Err(CliError::Config(format!(
            "no oracle for {} items (limit {ORACLE_MAX_ITEMS}); set success.target",
            b.len()
        ))),
        ProblemInstance::Continuous(_) => Ok(0.0),
        ProblemInstance::Tabletop(t) => Ok(t.costs().iter().copied().fold(f64::INFINITY, f64::min)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgorithmConfig {
    Random,
    Hillclimb {
        #[serde(default)]
        accept: AcceptRule,
    },
    Steepest {
        #[serde(default)]
        restart_on_optimum: bool,
    },
    Sa(SaConfig<f64>),
    Tabu(TabuConfig<f64>),
    /// The budget is the number of restarts.
    Hopfield(HopfieldConfig<f64>),
    Pso(SwarmConfig<f64>),
    Aco(AcoConfig<f64>),
}

impl AlgorithmConfig {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmConfig::Random => "random",
            AlgorithmConfig::Hillclimb { .. } => "hillclimb",
            AlgorithmConfig::Steepest { .. } => "steepest",
            AlgorithmConfig::Sa(_) => "sa",
            AlgorithmConfig::Tabu(_) => "tabu",
            AlgorithmConfig::Hopfield(_) => "hopfield",
            AlgorithmConfig::Pso(_) => "pso",
            AlgorithmConfig::Aco(_) => "aco",
        }
    }

    /// Rejects algorithm/instance pairs that cannot run.
    pub fn check_instance(&self, inst: &ProblemInstance<f64>) -> Result<(), CliError> {
        let ok = match (self, inst) {
            (AlgorithmConfig::Hopfield(_) | AlgorithmConfig::Aco(_), ProblemInstance::Tsp(_)) => true,
            (AlgorithmConfig::Hopfield(_) | AlgorithmConfig::Aco(_), _) => false,
            (AlgorithmConfig::Pso(_), i) => matches!(i, ProblemInstance::Continuous(_)),
            (AlgorithmConfig::Steepest { .. } | AlgorithmConfig::Tabu(_), i) => {
                !matches!(i, ProblemInstance::Continuous(_))
            }
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(CliError::Config(format!(
                "algorithm {} cannot run on a {} instance",
                self.name(),
                stochopt::Problem::kind(inst)
            )))
        }
    }
}

/// Success means reaching `target` within `tolerance`. Without a target the
/// instance oracle supplies it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuccessSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    /// Defaults to 1e-9 relative, or 1e-6 absolute on continuous landscapes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<Tolerance>,
}

impl SuccessSpec {
    pub fn resolve(&self, inst: &ProblemInstance<f64>) -> Result<SuccessPredicate, CliError> {
        let target = match self.target {
            Some(t) => t,
            None => oracle_optimum(inst)?,
        };
        let tolerance = self.tolerance.unwrap_or(match inst {
            ProblemInstance::Continuous(_) => Tolerance::Absolute(1e-6),
            _ => Tolerance::Relative(1e-9),
        });
        Ok(SuccessPredicate { target, tolerance })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
}

fn yes() -> bool {
    true
}

fn default_confidence() -> f64 {
    0.99
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    pub algorithm: AlgorithmConfig,
    pub replicas: u64,
    /// Replica `i` runs with seed `base_seed + i`.
    #[serde(default)]
    pub base_seed: u64,
    /// Evaluations per replica.
    pub budget: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub success: Option<SuccessSpec>,
    /// End a replica as soon as it meets the success predicate.
    #[serde(default = "yes")]
    pub stop_at_target: bool,
    /// Confidence `z` of the computational effort.
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default)]
    pub output: OutputPaths,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.replicas == 0 {
            return Err(CliError::Config("replicas must be at least 1".into()));
        }
        if self.budget == 0 {
            return Err(CliError::Config("budget must be at least 1".into()));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(CliError::Config("confidence must lie in (0, 1)".into()));
        }
        Ok(())
    }
}
