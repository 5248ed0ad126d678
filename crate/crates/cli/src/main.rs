use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use stochopt::effort::{humanize_seconds, operation_count, runtime_projection, ComplexityClass};
use stochopt::problems::{ProblemInstance, Solution};
use stochopt_cli::config::{ORACLE_MAX_CITIES, ORACLE_MAX_ITEMS};
use stochopt_cli::experiment::{write_csv, write_json};
use stochopt_cli::{
    emit_plot_data, parse_binpacking_file, parse_tsp_file, run_experiment, ExperimentConfig, PlotKind, Report,
};

#[derive(Parser)]
#[command(name = "optimize", version, about = "Seeded stochastic optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write CSV and JSON results.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Directory for results when the config names no output paths.
        #[arg(long, env = "OPTIMIZE_OUTPUT_DIR", default_value = "results")]
        out_dir: PathBuf,
    },
    /// Exhaustive optimum of a small TSP (.tsp) or bin packing instance.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Projected runtime of a complexity class at problem size N.
    Project {
        /// poly:K, exp:BASE, tsp or factorial
        #[arg(long)]
        class: String,
        #[arg(long)]
        n: u64,
        /// Operations per second.
        #[arg(long, default_value_t = 1e9)]
        rate: f64,
    },
    /// Plot data from a JSON report.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: PlotKind,
    },
}

fn parse_class(s: &str) -> Result<ComplexityClass> {
    let (name, arg) = s.split_once(':').map_or((s, None), |(a, b)| (a, Some(b)));
    Ok(match (name, arg) {
        ("poly", Some(k)) => ComplexityClass::Poly(k.parse().context("polynomial degree")?),
        ("exp", Some(b)) => ComplexityClass::Exp(b.parse().context("exponential base")?),
        ("tsp", None) => ComplexityClass::TspFactorial,
        ("factorial", None) => ComplexityClass::Factorial,
        _ => bail!("unknown complexity class `{s}` (poly:K, exp:BASE, tsp, factorial)"),
    })
}

#[derive(Serialize)]
struct OracleAnswer {
    kind: &'static str,
    size: usize,
    optimum: f64,
    solution: Solution<f64>,
}

fn oracle(path: &Path) -> Result<OracleAnswer> {
    let inst = if path.extension().is_some_and(|e| e == "tsp") {
        ProblemInstance::Tsp(parse_tsp_file(path)?)
    } else {
        ProblemInstance::BinPacking(parse_binpacking_file(path)?)
    };
    Ok(match inst {
        ProblemInstance::Tsp(t) => {
            if t.len() > ORACLE_MAX_CITIES {
                bail!("oracle supports at most {ORACLE_MAX_CITIES} cities, got {}", t.len());
            }
            let (optimum, tour) = t.exhaustive_optimum()?;
            OracleAnswer { kind: "tsp", size: t.len(), optimum, solution: Solution::Permutation(tour) }
        }
        ProblemInstance::BinPacking(b) => {
            if b.len() > ORACLE_MAX_ITEMS {
                bail!("oracle supports at most {ORACLE_MAX_ITEMS} items, got {}", b.len());
            }
            let (bins, a) = b.exhaustive_optimum()?;
            OracleAnswer { kind: "bin_packing", size: b.len(), optimum: bins as f64, solution: Solution::Assignment(a) }
        }
        _ => unreachable!(),
    })
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, out_dir } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let base = config.parent().unwrap_or(Path::new("."));
            let report = run_experiment(&cfg, base)?;
            let stem = config.file_stem().and_then(|s| s.to_str()).unwrap_or("experiment");
            let csv = cfg.output.csv.clone().unwrap_or_else(|| out_dir.join(format!("{stem}.csv")));
            let json = cfg.output.json.clone().unwrap_or_else(|| out_dir.join(format!("{stem}.json")));
            for p in [&csv, &json] {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                }
            }
            write_csv(&report.table, &csv)?;
            write_json(&report, &json)?;
            let s = &report.table.summary;
            println!("{} on {} replicas: {} successes", cfg.algorithm.name(), s.runs, s.successes);
            if let Some(m) = s.median_best {
                println!("median best fitness {m}");
            }
            if let Some(e) = &s.effort {
                println!("computational effort I = {} at n* = {} (z = {})", e.effort, e.n_star, s.confidence);
            }
            println!("wrote {} and {}", csv.display(), json.display());
        }
        Command::Oracle { instance } => {
            println!("{}", serde_json::to_string_pretty(&oracle(&instance)?)?);
        }
        Command::Project { class, n, rate } => {
            let c = parse_class(&class)?;
            let secs = runtime_projection(c, n, rate)?;
            if let Ok(ops) = operation_count(c, n) {
                println!("operations {ops}");
            }
            println!("seconds {secs:e}");
            println!("about {}", humanize_seconds(secs));
        }
        Command::Plot { input, kind } => {
            let text = fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
            let report = Report::from_json(&text)?;
            print!("{}", emit_plot_data(&report.table, kind)?);
        }
    }
    Ok(())
}
