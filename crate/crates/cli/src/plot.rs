//! Two-column plot data: `x y` lines per series, a blank line between
//! series, `#` header lines.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::experiment::ResultTable;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    /// Best-so-far fitness against evaluations, one series per replica.
    BestCurve,
    /// Cumulative success probability `P(n)`.
    PnCurve,
    /// Computational effort `I(n, z)`.
    EffortCurve,
}

pub fn emit_plot_data(table: &ResultTable, kind: PlotKind) -> Result<String, CliError> {
    if table.rows.is_empty() {
        return Err(CliError::Config("result table has no rows".into()));
    }
    let mut out = String::new();
    match kind {
        PlotKind::BestCurve => {
            for (row, curve) in table.rows.iter().zip(&table.best_curves) {
                if !out.is_empty() {
                    out.push('\n');
                }
                let _ = writeln!(out, "# best_curve replica={} seed={}", row.replica, row.seed);
                let _ = writeln!(out, "# evaluations best_fitness");
                for (x, y) in curve {
                    let _ = writeln!(out, "{x} {y}");
                }
            }
        }
        PlotKind::PnCurve => {
            let _ = writeln!(out, "# pn_curve runs={}", table.summary.runs);
            let _ = writeln!(out, "# evaluations success_probability");
            for (x, y) in &table.summary.success_curve {
                let _ = writeln!(out, "{x} {y}");
            }
        }
        PlotKind::EffortCurve => {
            let effort = table
                .summary
                .effort
                .as_ref()
                .ok_or_else(|| CliError::Config("effort undefined: no replica succeeded".into()))?;
            let _ = writeln!(
                out,
                "# effort_curve z={} n_star={} effort={}",
                table.summary.confidence, effort.n_star, effort.effort
            );
            let _ = writeln!(out, "# evaluations effort");
            for (x, y) in &effort.curve {
                let _ = writeln!(out, "{x} {y}");
            }
        }
    }
    Ok(out)
}

/// Parses plot text back into `(x, y)` series.
pub fn read_series(text: &str) -> Vec<Vec<(f64, f64)>> {
    let mut series = Vec::new();
    for block in text.split("\n\n") {
        let pts: Vec<(f64, f64)> = block
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
            .filter_map(|l| {
                let mut it = l.split_whitespace().map(str::parse::<f64>);
                Some((it.next()?.ok()?, it.next()?.ok()?))
            })
            .collect();
        series.push(pts);
    }
    series
}
