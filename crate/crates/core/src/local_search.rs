//! Random search and the two hill-climbing variants.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::problem::{Budget, Problem};
use crate::rng::RngStream;
use crate::run::{Evaluator, RunRecord, RunStatus};

/// Acceptance rule of first-accept hill climbing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcceptRule {
    /// Move to the sampled neighbor iff it is no worse than the current one.
    #[default]
    BetterOrEqual,
    /// Move to every sampled neighbor, only tracking the best (a random walk).
    Always,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalSearchConfig<F> {
    pub budget: Budget<F>,
    /// Steepest descent only: restart from a random solution at a local
    /// optimum while budget remains.
    #[serde(default)]
    pub restart_on_optimum: bool,
    #[serde(default)]
    pub accept: AcceptRule,
}

impl<F> LocalSearchConfig<F> {
    pub fn new(budget: Budget<F>) -> Self {
        Self { budget, restart_on_optimum: false, accept: AcceptRule::BetterOrEqual }
    }
}

type Record<P> = RunRecord<<P as Problem>::Scalar, <P as Problem>::Solution>;

/// Best of `budget` independent uniform samples.
pub fn random_search<P: Problem>(problem: &P, budget: &Budget<P::Scalar>, rng: &mut RngStream) -> Result<Record<P>> {
    let mut ev = Evaluator::new(problem, *budget);
    while !ev.should_stop() {
        let s = problem.random_solution(rng);
        let f = ev.evaluate(&s)?;
        ev.record_current(f);
    }
    let status = ev.default_status();
    Ok(ev.finish(rng.seed(), status))
}

/// First-accept hill climbing with the default better-or-equal rule.
pub fn hill_climb_first_accept<P: Problem>(
    problem: &P,
    start: P::Solution,
    budget: &Budget<P::Scalar>,
    rng: &mut RngStream,
) -> Result<Record<P>> {
    hill_climb(problem, start, &LocalSearchConfig::new(*budget), rng)
}

/// Samples one neighbor per step and moves according to `cfg.accept`.
pub fn hill_climb<P: Problem>(
    problem: &P,
    start: P::Solution,
    cfg: &LocalSearchConfig<P::Scalar>,
    rng: &mut RngStream,
) -> Result<Record<P>> {
    let mut ev = Evaluator::new(problem, cfg.budget);
    let mut current = start;
    let mut current_f = ev.evaluate(&current)?;
    ev.record_current(current_f);

    if degenerate_neighborhood(problem, &current) {
        return Ok(ev.finish(rng.seed(), RunStatus::LocalOptimum));
    }

    let mut accepted = 0u64;
    let mut proposals = 0u64;
    while !ev.should_stop() {
        let (candidate, _) = problem.sample_neighbor(&current, rng)?;
        let f = ev.evaluate(&candidate)?;
        proposals += 1;
        let take = match cfg.accept {
            AcceptRule::BetterOrEqual => f <= current_f,
            AcceptRule::Always => true,
        };
        if take {
            current = candidate;
            current_f = f;
            accepted += 1;
        }
        ev.record_current(current_f);
    }
    if proposals > 0 {
        ev.set_metric("acceptance_rate", accepted as f64 / proposals as f64);
    }
    let status = ev.default_status();
    Ok(ev.finish(rng.seed(), status))
}

/// Whether every neighbor of `s` equals `s` (e.g. the 2-city tour).
fn degenerate_neighborhood<P: Problem>(problem: &P, s: &P::Solution) -> bool {
    matches!(problem.neighbors(s), Ok(ns) if ns.iter().all(|(n, _)| n == s))
}

/// Steepest descent without restarts.
pub fn hill_climb_steepest<P: Problem>(
    problem: &P,
    start: P::Solution,
    budget: &Budget<P::Scalar>,
) -> Result<Record<P>> {
    let mut ev = Evaluator::new(problem, *budget);
    let status = descend(&mut ev, start)?.1;
    Ok(ev.finish(0, status))
}

/// Steepest descent; with `restart_on_optimum` it restarts from a random
/// solution after each local optimum until the budget is spent.
pub fn steepest_descent<P: Problem>(
    problem: &P,
    start: P::Solution,
    cfg: &LocalSearchConfig<P::Scalar>,
    rng: &mut RngStream,
) -> Result<Record<P>> {
    let mut ev = Evaluator::new(problem, cfg.budget);
    let mut start = start;
    let mut optima = 0u64;
    let status = loop {
        let (_, status) = descend(&mut ev, start)?;
        if status != RunStatus::LocalOptimum {
            break status;
        }
        optima += 1;
        if !cfg.restart_on_optimum || ev.should_stop() {
            break status;
        }
        start = problem.random_solution(rng);
    };
    ev.set_metric("local_optima", optima as f64);
    Ok(ev.finish(rng.seed(), status))
}

/// One descent from `start`. Moves to the strictly best neighbor (lowest
/// index among ties) and halts when no neighbor is strictly better.
fn descend<P: Problem>(ev: &mut Evaluator<'_, P>, start: P::Solution) -> Result<(P::Solution, RunStatus)> {
    let problem = ev.problem();
    if ev.should_stop() {
        return Ok((start, ev.default_status()));
    }
    let mut current = start;
    let mut current_f = ev.evaluate(&current)?;
    ev.record_current(current_f);
    loop {
        if ev.target_reached() {
            return Ok((current, RunStatus::TargetReached));
        }
        let neighbors = problem.neighbors(&current)?;
        let mut best: Option<(usize, P::Scalar)> = None;
        for (k, (n, _)) in neighbors.iter().enumerate() {
            if ev.exhausted() {
                return Ok((current, RunStatus::BudgetExhausted));
            }
            let f = ev.evaluate(n)?;
            if best.map_or(true, |(_, b)| f < b) {
                best = Some((k, f));
            }
        }
        match best {
            Some((k, f)) if f < current_f => {
                current = neighbors.into_iter().nth(k).map(|(n, _)| n).expect("index in range");
                current_f = f;
                ev.record_current(current_f);
            }
            _ => return Ok((current, RunStatus::LocalOptimum)),
        }
    }
}
