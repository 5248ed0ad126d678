//! Evaluation accounting and per-run records.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::problem::{Budget, Problem};
use crate::scalar::Real;

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    BudgetExhausted,
    TargetReached,
    /// Steepest descent found no improving neighbor.
    LocalOptimum,
    /// The cooling schedule froze before the budget was spent.
    Frozen,
    /// Every neighbor was tabu and none passed aspiration.
    NoAdmissibleMove,
    /// No valid solution was produced (Hopfield runs without a valid tour).
    Failed,
}

/// Trace of one optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord<F, S> {
    pub seed: u64,
    pub evaluations: u64,
    /// Evaluation index at which the target was first met.
    pub evaluations_to_success: Option<u64>,
    pub best_fitness: Option<F>,
    pub best_solution: Option<S>,
    /// `(evaluation index, best fitness so far)`, one point per improvement.
    pub best_curve: Vec<(u64, F)>,
    /// Fitness of the current solution after each step of the algorithm.
    pub trajectory: Vec<F>,
    pub status: RunStatus,
    /// Algorithm specific figures (acceptance rates, valid fractions, ...).
    pub metrics: BTreeMap<String, f64>,
}

impl<F: Real, S> RunRecord<F, S> {
    /// Best fitness reached within the first `n` evaluations.
    pub fn best_at(&self, n: u64) -> Option<F> {
        self.best_curve.iter().take_while(|(at, _)| *at <= n).last().map(|&(_, f)| f)
    }

    /// First evaluation index at which the best fitness is `<= threshold`.
    pub fn first_hit(&self, threshold: F) -> Option<u64> {
        self.best_curve.iter().find(|(_, f)| *f <= threshold).map(|&(at, _)| at)
    }

    /// Same record with the best solution re-encoded.
    pub fn map_solution<T>(self, f: impl FnOnce(S) -> T) -> RunRecord<F, T> {
        RunRecord {
            seed: self.seed,
            evaluations: self.evaluations,
            evaluations_to_success: self.evaluations_to_success,
            best_fitness: self.best_fitness,
            best_solution: self.best_solution.map(f),
            best_curve: self.best_curve,
            trajectory: self.trajectory,
            status: self.status,
            metrics: self.metrics,
        }
    }
}

/// Counts objective calls, enforces the budget and keeps the best-so-far.
pub struct Evaluator<'p, P: Problem> {
    problem: &'p P,
    budget: Budget<P::Scalar>,
    count: u64,
    best: Option<(P::Solution, P::Scalar)>,
    curve: Vec<(u64, P::Scalar)>,
    trajectory: Vec<P::Scalar>,
    hit_at: Option<u64>,
    metrics: BTreeMap<String, f64>,
}

impl<'p, P: Problem> Evaluator<'p, P> {
    pub fn new(problem: &'p P, budget: Budget<P::Scalar>) -> Self {
        Self {
            problem,
            budget,
            count: 0,
            best: None,
            curve: Vec::new(),
            trajectory: Vec::new(),
            hit_at: None,
            metrics: BTreeMap::new(),
        }
    }

    pub fn problem(&self) -> &'p P {
        self.problem
    }

    pub fn budget(&self) -> &Budget<P::Scalar> {
        &self.budget
    }

    /// Evaluates `s`, counting the call and updating the best-so-far.
    ///
    /// Callers check [`Evaluator::exhausted`] first; evaluating past the
    /// budget is a logic error.
    pub fn evaluate(&mut self, s: &P::Solution) -> Result<P::Scalar> {
        debug_assert!(!self.exhausted(), "evaluation past budget");
        let f = self.problem.objective(s)?;
        self.count += 1;
        self.offer(s, f);
        Ok(f)
    }

    /// Evaluates `s` and counts the call without offering it as a
    /// best-so-far candidate. Used when the best is defined over visited
    /// solutions only (tabu search); pair with [`Evaluator::visit`].
    pub fn evaluate_candidate(&mut self, s: &P::Solution) -> Result<P::Scalar> {
        debug_assert!(!self.exhausted(), "evaluation past budget");
        let f = self.problem.objective(s)?;
        self.count += 1;
        Ok(f)
    }

    /// Offers an already evaluated solution as best-so-far candidate.
    pub fn visit(&mut self, s: &P::Solution, f: P::Scalar) {
        self.offer(s, f);
    }

    /// Records an evaluation computed outside the problem (one objective call).
    pub fn count_external(&mut self, s: &P::Solution, f: P::Scalar) {
        self.count += 1;
        self.offer(s, f);
    }

    fn offer(&mut self, s: &P::Solution, f: P::Scalar) {
        let improved = match &self.best {
            None => true,
            Some((_, b)) => f < *b,
        };
        if improved {
            self.best = Some((s.clone(), f));
            self.curve.push((self.count, f));
            if self.hit_at.is_none() && self.budget.reached_target(f) {
                self.hit_at = Some(self.count);
            }
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn remaining(&self) -> u64 {
        self.budget.max_evaluations.saturating_sub(self.count)
    }

    pub fn exhausted(&self) -> bool {
        self.count >= self.budget.max_evaluations
    }

    pub fn target_reached(&self) -> bool {
        self.hit_at.is_some()
    }

    /// Budget spent or target met.
    pub fn should_stop(&self) -> bool {
        self.exhausted() || self.target_reached()
    }

    pub fn best(&self) -> Option<&(P::Solution, P::Scalar)> {
        self.best.as_ref()
    }

    pub fn best_fitness(&self) -> Option<P::Scalar> {
        self.best.as_ref().map(|(_, f)| *f)
    }

    /// Appends the fitness of the current solution to the trajectory.
    pub fn record_current(&mut self, f: P::Scalar) {
        self.trajectory.push(f);
    }

    pub fn set_metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    /// Status implied by the budget alone.
    pub fn default_status(&self) -> RunStatus {
        if self.target_reached() {
            RunStatus::TargetReached
        } else {
            RunStatus::BudgetExhausted
        }
    }

    pub fn finish(self, seed: u64, status: RunStatus) -> RunRecord<P::Scalar, P::Solution> {
        let (best_solution, best_fitness) = match self.best {
            Some((s, f)) => (Some(s), Some(f)),
            None => (None, None),
        };
        RunRecord {
            seed,
            evaluations: self.count,
            evaluations_to_success: self.hit_at,
            best_fitness,
            best_solution,
            best_curve: self.curve,
            trajectory: self.trajectory,
            status,
            metrics: self.metrics,
        }
    }
}
