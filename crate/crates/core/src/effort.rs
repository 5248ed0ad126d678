//! Success statistics over run ensembles, computational effort, and
//! runtime projections for complexity classes.
//!
//! `P(n)` is the fraction of runs that met the success predicate within
//! `n` evaluations. The number of independent runs needed to succeed with
//! probability `z` is `R = ⌈ln(1−z) / ln(1−P(n))⌉`, and the effort is
//! `I(n, z) = n·R`. When `P(n) = 1` a single run suffices and `I = n`.
//!
//! `P` only changes at observed success times and `I` grows with `n`
//! between them, so the minimum over all `n` is attained at a success time.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::run::RunRecord;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tolerance {
    /// `|f − target| ≤ tol·max(|target|, 1)`
    Relative(f64),
    Absolute(f64),
}

/// A run succeeds once its best fitness is within tolerance of `target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessPredicate {
    pub target: f64,
    pub tolerance: Tolerance,
}

impl SuccessPredicate {
    /// Known optimum, with the default relative tolerance of 1e-9.
    pub fn optimum(target: f64) -> Self {
        Self { target, tolerance: Tolerance::Relative(1e-9) }
    }

    pub fn absolute(target: f64, tol: f64) -> Self {
        Self { target, tolerance: Tolerance::Absolute(tol) }
    }

    /// Largest fitness still counted as a success (minimization).
    pub fn threshold(&self) -> f64 {
        self.target
            + match self.tolerance {
                Tolerance::Relative(r) => r * self.target.abs().max(1.0),
                Tolerance::Absolute(a) => a,
            }
    }

    pub fn holds(&self, fitness: f64) -> bool {
        fitness <= self.threshold()
    }
}

/// Success times and final bests of an ensemble of runs sharing one
/// instance, algorithm and configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub budget: u64,
    pub predicate: Option<SuccessPredicate>,
    /// First evaluation meeting the predicate, per run.
    pub success_times: Vec<Option<u64>>,
    pub best_fitness: Vec<f64>,
}

impl EnsembleStats {
    /// Success times are re-derived from each run's best curve.
    pub fn from_records<F: Real, S>(
        records: &[RunRecord<F, S>],
        budget: u64,
        predicate: SuccessPredicate,
    ) -> Result<Self> {
        if records.is_empty() {
            return validation("ensemble has no runs");
        }
        let threshold = predicate.threshold();
        let success_times = records
            .iter()
            .map(|r| r.best_curve.iter().find(|(_, f)| f.as_f64() <= threshold).map(|&(at, _)| at))
            .collect();
        let best_fitness = records.iter().map(|r| r.best_fitness.map_or(f64::INFINITY, Real::as_f64)).collect();
        Ok(Self { budget, predicate: Some(predicate), success_times, best_fitness })
    }

    /// Ensemble given directly by success times (`None` = never succeeded).
    pub fn from_success_times(times: Vec<Option<u64>>, budget: u64) -> Result<Self> {
        if times.is_empty() {
            return validation("ensemble has no runs");
        }
        if times.iter().flatten().any(|&t| t == 0 || t > budget) {
            return validation("success times must lie in 1..=budget");
        }
        let best_fitness = vec![f64::NAN; times.len()];
        Ok(Self { budget, predicate: None, success_times: times, best_fitness })
    }

    pub fn runs(&self) -> usize {
        self.success_times.len()
    }

    pub fn successes(&self) -> usize {
        self.success_times.iter().flatten().count()
    }

    /// Distinct success times, ascending.
    pub fn jump_points(&self) -> Vec<u64> {
        let mut t: Vec<u64> = self.success_times.iter().flatten().copied().collect();
        t.sort_unstable();
        t.dedup();
        t
    }

    /// Success times with failures placed just past the budget.
    pub fn censored_times(&self) -> Vec<f64> {
        self.success_times.iter().map(|t| t.map_or(self.budget as f64 + 1.0, |v| v as f64)).collect()
    }

    pub fn median_best(&self) -> Option<f64> {
        median(&self.best_fitness)
    }
}

fn median(xs: &[f64]) -> Option<f64> {
    let mut v: Vec<f64> = xs.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

pub fn cumulative_success(e: &EnsembleStats, n: u64) -> Result<f64> {
    if n == 0 {
        return validation("evaluation count must be at least 1");
    }
    if e.runs() == 0 {
        return validation("ensemble has no runs");
    }
    let hits = e.success_times.iter().flatten().filter(|&&t| t <= n).count();
    Ok(hits as f64 / e.runs() as f64)
}

/// `(n, P(n))` at every jump of the step function.
pub fn success_curve(e: &EnsembleStats) -> Vec<(u64, f64)> {
    let runs = e.runs() as f64;
    let mut times: Vec<u64> = e.success_times.iter().flatten().copied().collect();
    times.sort_unstable();
    let mut out: Vec<(u64, f64)> = Vec::new();
    for (k, &t) in times.iter().enumerate() {
        let p = (k + 1) as f64 / runs;
        match out.last_mut() {
            Some(last) if last.0 == t => last.1 = p,
            _ => out.push((t, p)),
        }
    }
    out
}

/// Independent runs needed to succeed with probability `z` when one run
/// succeeds with probability `p`; `None` when `p = 0`.
pub fn runs_required(p: f64, z: f64) -> Option<u64> {
    if p <= 0.0 {
        return None;
    }
    if p >= 1.0 {
        return Some(1);
    }
    let r = (1.0 - z).ln() / (1.0 - p).ln();
    // a ratio that is an integer up to rounding must not ceil to the next one
    Some(((r - 1e-9).ceil() as u64).max(1))
}

/// `I(n, z)`, or `None` when `P(n) = 0`.
pub fn effort_at(p: f64, n: u64, z: f64) -> Option<u64> {
    runs_required(p, z).map(|r| n * r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Effort {
    pub n_star: u64,
    pub effort: u64,
    /// `(n, I(n, z))` at every jump of `P`.
    pub curve: Vec<(u64, u64)>,
}

/// Minimum of `I(n, z)` over `n`; ties go to the smallest `n`.
pub fn computational_effort(e: &EnsembleStats, z: f64) -> Result<Effort> {
    if !(z > 0.0 && z < 1.0) {
        return validation("confidence z must lie in (0, 1)");
    }
    if e.successes() == 0 {
        return Err(Error::EffortUndefined);
    }
    let curve: Vec<(u64, u64)> =
        success_curve(e).into_iter().filter_map(|(n, p)| effort_at(p, n, z).map(|i| (n, i))).collect();
    let &(n_star, effort) =
        curve.iter().min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0))).ok_or(Error::EffortUndefined)?;
    Ok(Effort { n_star, effort, curve })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexityClass {
    /// `N^k`
    Poly(u32),
    /// `base^N`
    Exp(f64),
    /// `(N−1)!/2` distinct tours of `N` towns
    TspFactorial,
    /// `N!`
    Factorial,
}

impl ComplexityClass {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ComplexityClass::Poly(k) if k < 1 => validation("polynomial degree must be at least 1"),
            ComplexityClass::Exp(b) if !(b > 1.0) || !b.is_finite() => validation("exponential base must exceed 1"),
            _ => Ok(()),
        }
    }
}

fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Exact operation count for integer-valued classes.
pub fn operation_count(c: ComplexityClass, n: u64) -> Result<BigUint> {
    c.validate()?;
    if n == 0 {
        return validation("problem size must be at least 1");
    }
    Ok(match c {
        ComplexityClass::Poly(k) => BigUint::from(n).pow(k),
        ComplexityClass::Exp(b) if b.fract() == 0.0 => BigUint::from(b as u64).pow(n as u32),
        ComplexityClass::Exp(_) => return Err(Error::Unsupported("non-integer base has no exact count".into())),
        ComplexityClass::TspFactorial => factorial(n - 1) / 2u32,
        ComplexityClass::Factorial => factorial(n),
    })
}

/// Seconds needed to perform every operation of `c` at size `n` at `rate`
/// operations per second.
pub fn runtime_projection(c: ComplexityClass, n: u64, rate: f64) -> Result<f64> {
    if !(rate > 0.0) {
        return validation("operation rate must be positive");
    }
    let ops = match operation_count(c, n) {
        Ok(exact) => exact.to_f64().unwrap_or(f64::INFINITY),
        Err(Error::Unsupported(_)) => match c {
            ComplexityClass::Exp(b) => b.powf(n as f64),
            _ => unreachable!(),
        },
        Err(e) => return Err(e),
    };
    Ok(ops / rate)
}

pub const MINUTE: f64 = 60.0;
pub const HOUR: f64 = 3600.0;
pub const DAY: f64 = 86_400.0;
/// Julian year.
pub const YEAR: f64 = 365.25 * DAY;

/// Renders seconds in the largest unit that keeps the value at least 1.
pub fn humanize_seconds(s: f64) -> String {
    let units = [(YEAR, "years"), (DAY, "days"), (HOUR, "h"), (MINUTE, "min")];
    for (size, name) in units {
        if s >= size {
            return format!("{:.3} {name}", s / size);
        }
    }
    format!("{s:.3e} s")
}

/// One ensemble's column of a comparison report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub name: String,
    pub runs: usize,
    pub successes: usize,
    pub success_curve: Vec<(u64, f64)>,
    pub effort: Option<Effort>,
    pub median_best: Option<f64>,
    pub best_fitness: Vec<f64>,
}

pub fn summarize(name: &str, e: &EnsembleStats, z: f64) -> Result<EnsembleSummary> {
    let effort = match computational_effort(e, z) {
        Ok(eff) => Some(eff),
        Err(Error::EffortUndefined) => None,
        Err(err) => return Err(err),
    };
    let mut best = e.best_fitness.clone();
    best.sort_by(f64::total_cmp);
    Ok(EnsembleSummary {
        name: name.to_string(),
        runs: e.runs(),
        successes: e.successes(),
        success_curve: success_curve(e),
        effort,
        median_best: e.median_best(),
        best_fitness: best,
    })
}

/// Side-by-side summaries against a random-search baseline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub baseline: EnsembleSummary,
    pub algorithms: Vec<EnsembleSummary>,
    /// Two-sample test of each algorithm's censored success times against the baseline's.
    pub ks_vs_baseline: Vec<KsTest>,
}

pub fn nfl_comparison(
    algorithms: &[(&str, &EnsembleStats)],
    baseline: (&str, &EnsembleStats),
    z: f64,
) -> Result<ComparisonReport> {
    let (base_name, base) = baseline;
    for (name, e) in algorithms {
        if e.budget != base.budget {
            return validation(format!("ensemble {name} has budget {} but the baseline has {}", e.budget, base.budget));
        }
        if e.predicate != base.predicate {
            return validation(format!("ensemble {name} uses a different success predicate"));
        }
    }
    let censored = base.censored_times();
    Ok(ComparisonReport {
        baseline: summarize(base_name, base, z)?,
        algorithms: algorithms.iter().map(|(name, e)| summarize(name, e, z)).collect::<Result<_>>()?,
        ks_vs_baseline: algorithms
            .iter()
            .map(|(_, e)| ks_two_sample(&e.censored_times(), &censored))
            .collect::<Result<_>>()?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// `Q(λ) = 2 Σ (−1)^{k−1} exp(−2k²λ²)`, `λ = (√m + 0.12 + 0.11/√m)·D`,
/// `m = n₁n₂/(n₁+n₂)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsTest> {
    if a.is_empty() || b.is_empty() {
        return validation("both samples must be non-empty");
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n1, n2) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n1 - j as f64 / n2).abs());
    }
    let m = (n1 * n2 / (n1 + n2)).sqrt();
    let lambda = (m + 0.12 + 0.11 / m) * d;
    Ok(KsTest { statistic: d, p_value: kolmogorov_q(lambda) })
}

fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = sign * (-2.0 * kf * kf * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-14 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
