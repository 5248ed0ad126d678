//! Simple tabu search: best admissible move from the full neighborhood,
//! attribute-based tabu list with fixed tenure, best-so-far aspiration and
//! optional long-term memory terms (`f̃ = f + intensification + diversification`).

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Budget, TabuProblem};
use crate::rng::RngStream;
use crate::run::{Evaluator, RunRecord, RunStatus};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aspiration {
    /// A tabu move is admissible when its fitness beats the best visited.
    #[default]
    BestSoFar,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "F: Real + Deserialize<'de>"))]
pub struct TabuConfig<F> {
    pub tenure: usize,
    pub aspiration: Aspiration,
    pub intensification_weight: F,
    pub diversification_weight: F,
    /// Keep the long-term attribute frequency table.
    pub frequency_memory: bool,
    /// Size of the elite pool used by the intensification term.
    pub elite_size: usize,
}

impl<F: Real> Default for TabuConfig<F> {
    fn default() -> Self {
        Self {
            tenure: 7,
            aspiration: Aspiration::BestSoFar,
            intensification_weight: F::zero(),
            diversification_weight: F::zero(),
            frequency_memory: true,
            elite_size: 5,
        }
    }
}

impl<F: Real> TabuConfig<F> {
    pub fn validate(&self) -> Result<()> {
        let ok = |w: F| w.is_finite() && w >= F::zero();
        if !ok(self.intensification_weight) || !ok(self.diversification_weight) {
            return Err(Error::Validation("tabu memory weights must be finite and non-negative".into()));
        }
        Ok(())
    }
}

/// Short-term memory. An attribute pushed at iteration `h` stays tabu for
/// iterations `h+1 ..= h+t`, so at most `t` pushes are live at any time.
#[derive(Debug, Clone)]
pub struct TabuList<A> {
    tenure: usize,
    entries: VecDeque<(A, u64, u64)>,
}

impl<A: PartialEq + Clone> TabuList<A> {
    pub fn new(tenure: usize) -> Self {
        Self { tenure, entries: VecDeque::new() }
    }

    pub fn tenure(&self) -> usize {
        self.tenure
    }

    /// Records attribute `a` produced at iteration `k`.
    pub fn push(&mut self, a: A, k: u64) {
        if self.tenure == 0 {
            return;
        }
        self.entries.push_back((a, k, k + self.tenure as u64));
    }

    /// Drops entries that are no longer tabu at iteration `k`.
    pub fn purge(&mut self, k: u64) {
        while matches!(self.entries.front(), Some((_, _, expiry)) if *expiry < k) {
            self.entries.pop_front();
        }
    }

    pub fn is_tabu(&self, a: &A, k: u64) -> bool {
        self.entries.iter().any(|(e, _, expiry)| *expiry >= k && e == a)
    }

    /// Live attributes at iteration `k`, oldest first.
    pub fn live(&self, k: u64) -> impl Iterator<Item = &A> {
        self.entries.iter().filter(move |(_, _, x)| *x >= k).map(|(a, _, _)| a)
    }

    /// Age in iterations of the oldest stored entry, as seen at iteration `k`.
    pub fn oldest_age(&self, k: u64) -> Option<u64> {
        self.entries.front().map(|(_, pushed, _)| k - pushed)
    }
}

/// Long-term memory: attribute frequencies and an elite pool.
#[derive(Debug, Clone)]
pub struct Memories<S, F, A> {
    pub frequency: BTreeMap<A, u64>,
    pub iterations: u64,
    pub elite: Vec<(S, F)>,
    elite_size: usize,
}

impl<S: Clone + PartialEq, F: Real, A: Ord + Clone> Memories<S, F, A> {
    pub fn new(elite_size: usize) -> Self {
        Self { frequency: BTreeMap::new(), iterations: 0, elite: Vec::new(), elite_size }
    }

    /// Diversification penalty: weight × mean normalized frequency of the
    /// candidate's attributes.
    pub fn diversification(&self, attributes: &[A], weight: F) -> F {
        if self.iterations == 0 || attributes.is_empty() || weight == F::zero() {
            return F::zero();
        }
        let mean = attributes
            .iter()
            .map(|a| *self.frequency.get(a).unwrap_or(&0) as f64 / self.iterations as f64)
            .sum::<f64>()
            / attributes.len() as f64;
        weight * F::lit(mean)
    }

    /// Intensification bonus (non-positive): −weight × elite overlap.
    pub fn intensification<P>(&self, problem: &P, candidate: &S, attributes: &[A], weight: F) -> F
    where
        P: TabuProblem<Solution = S, Attribute = A>,
    {
        if self.elite.is_empty() || weight == F::zero() {
            return F::zero();
        }
        let elite: Vec<S> = self.elite.iter().map(|(s, _)| s.clone()).collect();
        -weight * F::lit(problem.elite_overlap(candidate, attributes, &elite))
    }

    pub fn elite_solutions(&self) -> impl Iterator<Item = &S> {
        self.elite.iter().map(|(s, _)| s)
    }
}

/// Updates long-term memory after a move: counts the chosen move's
/// attributes and offers the new current solution to the elite pool,
/// which keeps the best `elite_size` distinct solutions seen.
pub fn update_memories<S, F, A>(
    mem: &mut Memories<S, F, A>,
    chosen: &[A],
    current: &S,
    fitness: F,
    count_frequency: bool,
) where
    S: Clone + PartialEq,
    F: Real,
    A: Ord + Clone,
{
    mem.iterations += 1;
    if count_frequency {
        for a in chosen {
            *mem.frequency.entry(a.clone()).or_insert(0) += 1;
        }
    }
    if mem.elite_size == 0 || mem.elite.iter().any(|(s, _)| s == current) {
        return;
    }
    if mem.elite.len() < mem.elite_size {
        mem.elite.push((current.clone(), fitness));
    } else if let Some(worst) = mem
        .elite
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap().then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
    {
        if fitness < mem.elite[worst].1 {
            mem.elite[worst] = (current.clone(), fitness);
        }
    }
    mem.elite.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
}

/// One evaluated neighbor.
#[derive(Debug, Clone)]
pub struct Candidate<S, M, F, A> {
    pub solution: S,
    pub mv: M,
    pub fitness: F,
    pub attributes: Vec<A>,
}

/// Index of the best admissible candidate under the penalized fitness, or
/// `None` when every candidate is tabu and none passes aspiration.
///
/// A tabu candidate is admissible only with best-so-far aspiration and a
/// raw fitness strictly below `best_so_far`. Ties go to the lowest index.
pub fn select_best_admissible<P>(
    problem: &P,
    candidates: &[Candidate<P::Solution, P::Move, P::Scalar, P::Attribute>],
    tabu: &TabuList<P::Attribute>,
    iteration: u64,
    best_so_far: P::Scalar,
    cfg: &TabuConfig<P::Scalar>,
    mem: &Memories<P::Solution, P::Scalar, P::Attribute>,
) -> Option<usize>
where
    P: TabuProblem,
{
    let mut best: Option<(usize, P::Scalar)> = None;
    for (k, c) in candidates.iter().enumerate() {
        let is_tabu = c.attributes.iter().any(|a| tabu.is_tabu(a, iteration));
        let aspires = cfg.aspiration == Aspiration::BestSoFar && c.fitness < best_so_far;
        if is_tabu && !aspires {
            continue;
        }
        let div = if cfg.frequency_memory {
            mem.diversification(&c.attributes, cfg.diversification_weight)
        } else {
            <P::Scalar as num_traits::Zero>::zero()
        };
        let int = mem.intensification(problem, &c.solution, &c.attributes, cfg.intensification_weight);
        let score = c.fitness + int + div;
        if best.map_or(true, |(_, b)| score < b) {
            best = Some((k, score));
        }
    }
    best.map(|(k, _)| k)
}

/// Tabu search from a uniform random start.
pub fn tabu_search<P: TabuProblem>(
    problem: &P,
    cfg: &TabuConfig<P::Scalar>,
    budget: &Budget<P::Scalar>,
    rng: &mut RngStream,
) -> Result<RunRecord<P::Scalar, P::Solution>> {
    let start = problem.random_solution(rng);
    tabu_search_from(problem, start, cfg, budget, rng.seed())
}

/// Tabu search from `start`. The run is deterministic given the start.
pub fn tabu_search_from<P: TabuProblem>(
    problem: &P,
    start: P::Solution,
    cfg: &TabuConfig<P::Scalar>,
    budget: &Budget<P::Scalar>,
    seed: u64,
) -> Result<RunRecord<P::Scalar, P::Solution>> {
    cfg.validate()?;
    let mut ev = Evaluator::new(problem, *budget);
    let mut tabu = TabuList::new(cfg.tenure);
    let mut mem = Memories::new(cfg.elite_size);

    let mut current = start;
    let mut current_f = ev.evaluate_candidate(&current)?;
    ev.visit(&current, current_f);
    ev.record_current(current_f);
    let mut best_f = current_f;
    let mut k = 0u64;
    let mut aspirations = 0u64;
    let mut max_live = 0usize;

    let status = loop {
        if ev.target_reached() {
            break RunStatus::TargetReached;
        }
        if ev.exhausted() {
            break RunStatus::BudgetExhausted;
        }
        let neighbors = problem.neighbors(&current)?;
        if neighbors.is_empty() {
            if k == 0 {
                return Err(Error::NoNeighbor(format!("{current:?}")));
            }
            break RunStatus::NoAdmissibleMove;
        }
        k += 1;
        tabu.purge(k);
        max_live = max_live.max(tabu.live(k).count());

        let mut candidates = Vec::with_capacity(neighbors.len());
        let mut cut_short = false;
        for (solution, mv) in neighbors {
            if ev.exhausted() {
                cut_short = true;
                break;
            }
            let fitness = ev.evaluate_candidate(&solution)?;
            let attributes = problem.move_attributes(&current, &mv);
            candidates.push(Candidate { solution, mv, fitness, attributes });
        }
        if cut_short {
            break RunStatus::BudgetExhausted;
        }

        let Some(pick) = select_best_admissible(problem, &candidates, &tabu, k, best_f, cfg, &mem) else {
            break RunStatus::NoAdmissibleMove;
        };
        let chosen = candidates.swap_remove(pick);
        if chosen.attributes.iter().any(|a| tabu.is_tabu(a, k)) {
            aspirations += 1;
        }
        for a in problem.reverse_attributes(&current, &chosen.mv) {
            tabu.push(a, k);
        }
        update_memories(&mut mem, &chosen.attributes, &chosen.solution, chosen.fitness, cfg.frequency_memory);

        current = chosen.solution;
        current_f = chosen.fitness;
        if current_f < best_f {
            best_f = current_f;
        }
        ev.visit(&current, current_f);
        ev.record_current(current_f);
    };
    ev.set_metric("iterations", k as f64);
    ev.set_metric("aspirations", aspirations as f64);
    ev.set_metric("max_live_tabu", max_live as f64);
    Ok(ev.finish(seed, status))
}
