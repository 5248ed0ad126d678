//! Ant system for the symmetric TSP.
//!
//! Ants pick the next city by roulette over a desirability score. The
//! primary score is the weighted sum `w_tau·τ + w_eta/d`; the classical
//! product `τ^α (1/d)^β` is available for comparison. Every traversed edge
//! receives a small local deposit, and after each iteration all trails
//! evaporate before the iteration-best tour deposits `Q / length`.

use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::problem::Budget;
use crate::problems::{Tour, TspInstance};
use crate::rng::{Draw, RngStream};
use crate::run::{Evaluator, RunRecord};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesirabilityRule<F> {
    Sum,
    Product { alpha: F, beta: F },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "F: Real + Deserialize<'de>"))]
pub struct AcoConfig<F> {
    /// Ants per iteration; `None` means one per city.
    pub ants: Option<usize>,
    pub w_tau: F,
    /// Weight of the inverse distance; `None` means twice the mean edge length.
    pub w_eta: Option<F>,
    pub rho: F,
    pub tau0: F,
    pub tau_min: F,
    pub tau_max: F,
    pub local_deposit: F,
    pub q: F,
    pub rule: DesirabilityRule<F>,
}

impl<F: Real> Default for AcoConfig<F> {
    fn default() -> Self {
        Self {
            ants: None,
            w_tau: F::one(),
            w_eta: None,
            rho: F::lit(0.1),
            tau0: F::one(),
            tau_min: F::lit(1e-4),
            tau_max: F::lit(1e6),
            local_deposit: F::lit(0.01),
            q: F::one(),
            rule: DesirabilityRule::Sum,
        }
    }
}

/// [`AcoConfig`] with the instance-dependent defaults filled in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcoParams<F> {
    pub ants: usize,
    pub w_tau: F,
    pub w_eta: F,
    pub rho: F,
    pub tau0: F,
    pub tau_min: F,
    pub tau_max: F,
    pub local_deposit: F,
    pub q: F,
    pub rule: DesirabilityRule<F>,
}

impl<F: Real> AcoConfig<F> {
    pub fn resolve(&self, inst: &TspInstance<F>) -> Result<AcoParams<F>> {
        let p = AcoParams {
            ants: self.ants.unwrap_or(inst.len()),
            w_tau: self.w_tau,
            w_eta: self.w_eta.unwrap_or_else(|| F::lit(2.0) * inst.mean_edge()),
            rho: self.rho,
            tau0: self.tau0,
            tau_min: self.tau_min,
            tau_max: self.tau_max,
            local_deposit: self.local_deposit,
            q: self.q,
            rule: self.rule,
        };
        if p.ants == 0 {
            return validation("colony needs at least one ant");
        }
        if !(p.rho > F::zero() && p.rho < F::one()) {
            return validation("evaporation rate must lie in (0, 1)");
        }
        if !(p.w_tau >= F::zero() && p.w_eta >= F::zero()) {
            return validation("desirability weights must be non-negative");
        }
        if p.rule == DesirabilityRule::Sum && p.w_tau == F::zero() && p.w_eta == F::zero() {
            return validation("desirability weights are both zero");
        }
        if !(p.tau_min > F::zero() && p.tau_min <= p.tau0 && p.tau0 <= p.tau_max) {
            return validation("need 0 < tau_min <= tau0 <= tau_max");
        }
        if !(p.local_deposit > F::zero() && p.q > F::zero()) {
            return validation("deposits must be positive");
        }
        Ok(p)
    }
}

/// Symmetric pheromone trails, kept within `[tau_min, tau_max]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PheromoneMatrix<F> {
    n: usize,
    tau: Vec<F>,
    tau_min: F,
    tau_max: F,
}

impl<F: Real> PheromoneMatrix<F> {
    pub fn new(n: usize, tau0: F, tau_min: F, tau_max: F) -> Self {
        Self { n, tau: vec![tau0.max(tau_min).min(tau_max); n * n], tau_min, tau_max }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> F {
        self.tau[x * self.n + y]
    }

    pub fn set(&mut self, x: usize, y: usize, v: F) {
        let v = v.max(self.tau_min).min(self.tau_max);
        self.tau[x * self.n + y] = v;
        self.tau[y * self.n + x] = v;
    }

    pub fn bounds(&self) -> (F, F) {
        (self.tau_min, self.tau_max)
    }

    /// Sum of trail strength along the closed tour.
    pub fn tour_mass(&self, tour: &[usize]) -> F {
        let n = tour.len();
        (0..n).map(|i| self.get(tour[i], tour[(i + 1) % n])).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|x| (0..x).all(|y| self.get(x, y) == self.get(y, x)))
    }

    pub fn entries(&self) -> &[F] {
        &self.tau
    }
}

pub fn edge_desirability<F: Real>(tau: F, d: F, p: &AcoParams<F>) -> Result<F> {
    if !(d > F::zero()) {
        return validation("distinct cities at zero distance");
    }
    Ok(match p.rule {
        DesirabilityRule::Sum => p.w_tau * tau + p.w_eta / d,
        DesirabilityRule::Product { alpha, beta } => tau.powf(alpha) * d.recip().powf(beta),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AntState<F> {
    pub current: usize,
    pub visited: Vec<bool>,
    pub tour: Vec<usize>,
    pub length: F,
}

impl<F: Real> AntState<F> {
    pub fn start(n: usize, city: usize) -> Self {
        let mut visited = vec![false; n];
        visited[city] = true;
        Self { current: city, visited, tour: vec![city], length: F::zero() }
    }

    pub fn is_complete(&self) -> bool {
        self.tour.len() == self.visited.len()
    }

    fn advance(&mut self, city: usize, d: F) {
        self.visited[city] = true;
        self.tour.push(city);
        self.current = city;
        self.length = self.length + d;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pick {
    pub city: usize,
    /// Every desirability was zero, so the city was drawn uniformly.
    pub uniform_fallback: bool,
}

/// Roulette over unvisited cities in index order. A lone candidate is taken
/// without consuming a draw.
pub fn choose_next_city<F: Real>(
    ant: &AntState<F>,
    tau: &PheromoneMatrix<F>,
    inst: &TspInstance<F>,
    p: &AcoParams<F>,
    rng: &mut impl Draw,
) -> Result<Pick> {
    let open: Vec<usize> = (0..ant.visited.len()).filter(|&y| !ant.visited[y]).collect();
    match open.len() {
        0 => return validation("ant has no unvisited city"),
        1 => return Ok(Pick { city: open[0], uniform_fallback: false }),
        _ => {}
    }
    let x = ant.current;
    let mut scores = Vec::with_capacity(open.len());
    for &y in &open {
        scores.push(edge_desirability(tau.get(x, y), inst.dist(x, y), p)?);
    }
    let total: F = scores.iter().copied().sum();
    if !(total > F::zero()) || !total.is_finite() {
        return Ok(Pick { city: open[rng.index(open.len())], uniform_fallback: true });
    }
    let r = F::lit(rng.unit()) * total;
    let mut acc = F::zero();
    for (&y, &s) in open.iter().zip(&scores) {
        acc = acc + s;
        if r < acc {
            return Ok(Pick { city: y, uniform_fallback: false });
        }
    }
    // rounding left r at the very top: take the last city with positive score
    let last = open.iter().zip(&scores).rev().find(|(_, &s)| s > F::zero()).map(|(&y, _)| y);
    Ok(Pick { city: last.unwrap_or(open[open.len() - 1]), uniform_fallback: false })
}

pub fn local_update<F: Real>(tau: &mut PheromoneMatrix<F>, x: usize, y: usize, deposit: F) {
    let v = tau.get(x, y) + deposit;
    tau.set(x, y, v);
}

/// Evaporates every trail by `rho`, then lays `q / length` on each edge of `best`.
pub fn global_update<F: Real>(tau: &mut PheromoneMatrix<F>, best: &[usize], length: F, rho: F, q: F) {
    let keep = F::one() - rho;
    let (lo, hi) = tau.bounds();
    for v in &mut tau.tau {
        *v = (*v * keep).max(lo).min(hi);
    }
    if best.is_empty() {
        return;
    }
    let gain = q / length;
    let n = best.len();
    for i in 0..n {
        let (x, y) = (best[i], best[(i + 1) % n]);
        local_update(tau, x, y, gain);
    }
}

/// Pheromone state plus the resolved parameters of one colony.
#[derive(Debug, Clone)]
pub struct Colony<'a, F> {
    inst: &'a TspInstance<F>,
    params: AcoParams<F>,
    tau: PheromoneMatrix<F>,
    fallbacks: u64,
    iterations: u64,
}

impl<'a, F: Real> Colony<'a, F> {
    pub fn new(inst: &'a TspInstance<F>, cfg: &AcoConfig<F>) -> Result<Self> {
        let params = cfg.resolve(inst)?;
        if inst.len() < 2 {
            return validation("colony needs at least two cities");
        }
        Ok(Self {
            inst,
            tau: PheromoneMatrix::new(inst.len(), params.tau0, params.tau_min, params.tau_max),
            params,
            fallbacks: 0,
            iterations: 0,
        })
    }

    pub fn params(&self) -> &AcoParams<F> {
        &self.params
    }

    pub fn pheromone(&self) -> &PheromoneMatrix<F> {
        &self.tau
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    /// Builds one tour from a random start, depositing along the way
    /// (including the closing edge).
    pub fn construct(&mut self, rng: &mut impl Draw) -> Result<AntState<F>> {
        let n = self.inst.len();
        let mut ant = AntState::start(n, rng.index(n));
        while !ant.is_complete() {
            let pick = choose_next_city(&ant, &self.tau, self.inst, &self.params, rng)?;
            self.fallbacks += u64::from(pick.uniform_fallback);
            let from = ant.current;
            ant.advance(pick.city, self.inst.dist(from, pick.city));
            local_update(&mut self.tau, from, pick.city, self.params.local_deposit);
        }
        let (last, first) = (ant.current, ant.tour[0]);
        ant.length = ant.length + self.inst.dist(last, first);
        local_update(&mut self.tau, last, first, self.params.local_deposit);
        Ok(ant)
    }

    /// Sends out up to `ants` ants (fewer if the budget runs out), then
    /// applies the global update with the iteration-best tour.
    pub fn iterate(
        &mut self,
        ev: &mut Evaluator<'_, TspInstance<F>>,
        rng: &mut impl Draw,
    ) -> Result<Option<(Tour, F)>> {
        let mut best: Option<(Tour, F)> = None;
        for _ in 0..self.params.ants {
            if ev.should_stop() {
                break;
            }
            let ant = self.construct(rng)?;
            let len = ev.evaluate(&ant.tour)?;
            if best.as_ref().map_or(true, |(_, b)| len < *b) {
                best = Some((ant.tour, len));
            }
        }
        if let Some((tour, len)) = &best {
            global_update(&mut self.tau, tour, *len, self.params.rho, self.params.q);
            self.iterations += 1;
        }
        Ok(best)
    }
}

/// Ant colony run; each completed tour costs one evaluation.
pub fn aco_run<F: Real>(
    inst: &TspInstance<F>,
    cfg: &AcoConfig<F>,
    budget: Budget<F>,
    rng: &mut RngStream,
) -> Result<RunRecord<F, Tour>> {
    let mut colony = Colony::new(inst, cfg)?;
    let mut ev = Evaluator::new(inst, budget);
    while !ev.should_stop() {
        match colony.iterate(&mut ev, rng)? {
            Some((_, len)) => ev.record_current(len),
            None => break,
        }
    }
    ev.set_metric("iterations", colony.iterations as f64);
    ev.set_metric("uniform_fallbacks", colony.fallbacks as f64);
    let status = ev.default_status();
    Ok(ev.finish(rng.seed(), status))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::FixedDraws;
    use approx::assert_relative_eq;

    fn params(w_tau: f64, w_eta: f64) -> AcoParams<f64> {
        AcoParams {
            ants: 1,
            w_tau,
            w_eta,
            rho: 0.1,
            tau0: 1.0,
            tau_min: 1e-4,
            tau_max: 1e6,
            local_deposit: 0.01,
            q: 1.0,
            rule: DesirabilityRule::Sum,
        }
    }

    fn square() -> TspInstance<f64> {
        let s = 3.0;
        TspInstance::from_matrix(vec![
            vec![0.0, 1.0, s, 1.0],
            vec![1.0, 0.0, 1.0, s],
            vec![s, 1.0, 0.0, 1.0],
            vec![1.0, s, 1.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn desirability_examples() {
        assert_eq!(edge_desirability(0.0, 2.0, &params(1.0, 1.0)).unwrap(), 0.5);
        assert_eq!(edge_desirability(3.0, 2.0, &params(1.0, 0.0)).unwrap(), 3.0);
        assert_eq!(edge_desirability(0.5, 2.0, &params(2.0, 4.0)).unwrap(), 3.0);
        assert!(edge_desirability(1.0, 0.0, &params(1.0, 1.0)).is_err());
    }

    #[test]
    fn roulette_with_three_to_one() {
        // from city 0: tau = 3 toward city 1, 1 toward city 2; pure pheromone
        let inst =
            TspInstance::from_matrix(vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]]).unwrap();
        let mut tau = PheromoneMatrix::new(3, 1.0, 1e-4, 1e6);
        tau.set(0, 1, 3.0);
        let p = params(1.0, 0.0);
        let ant = AntState::start(3, 0);
        let pick = |u| choose_next_city(&ant, &tau, &inst, &p, &mut FixedDraws::constant(u)).unwrap().city;
        assert_eq!(pick(0.7), 1);
        assert_eq!(pick(0.8), 2);
    }

    #[test]
    fn lone_city_is_certain() {
        let inst = square();
        let tau = PheromoneMatrix::new(4, 1.0, 1e-4, 1e6);
        let mut ant = AntState::start(4, 0);
        ant.advance(1, 1.0);
        ant.advance(2, 1.0);
        let pick = choose_next_city(&ant, &tau, &inst, &params(1.0, 1.0), &mut FixedDraws::constant(0.99)).unwrap();
        assert_eq!(pick.city, 3);
    }

    #[test]
    fn zero_scores_fall_back_to_uniform() {
        let inst = square();
        // (1e-4)^100 underflows to zero for every edge
        let tau = PheromoneMatrix::new(4, 1e-4, 1e-4, 1e6);
        let p = AcoParams { rule: DesirabilityRule::Product { alpha: 100.0, beta: 0.0 }, ..params(1.0, 1.0) };
        let ant = AntState::start(4, 0);
        let pick = choose_next_city(&ant, &tau, &inst, &p, &mut FixedDraws::constant(0.5)).unwrap();
        assert!(pick.uniform_fallback);
        assert_eq!(pick.city, 2); // open = [1, 2, 3], index(3) at 0.5
    }

    #[test]
    fn local_update_mirrors_and_clamps() {
        let mut tau = PheromoneMatrix::new(3, 1.0, 1e-4, 2.0);
        local_update(&mut tau, 0, 2, 0.1);
        assert_relative_eq!(tau.get(0, 2), 1.1);
        assert_eq!(tau.get(0, 2), tau.get(2, 0));
        assert_eq!(tau.get(0, 1), 1.0);
        tau.set(1, 2, 2.0);
        local_update(&mut tau, 1, 2, 0.5);
        assert_eq!(tau.get(2, 1), 2.0);
    }

    #[test]
    fn global_update_decay_and_deposit() {
        let mut tau = PheromoneMatrix::new(4, 2.0, 1e-4, 1e6);
        global_update(&mut tau, &[], 1.0, 0.5, 1.0);
        assert_eq!(tau.get(0, 3), 1.0);
        let mut tau = PheromoneMatrix::new(4, 1.0, 1e-4, 1e6);
        global_update(&mut tau, &[0, 1, 2, 3], 10.0, 0.1, 1.0);
        assert_relative_eq!(tau.get(1, 2), 0.9 + 0.1);
        assert_relative_eq!(tau.get(0, 2), 0.9);
    }

    #[test]
    fn evaporation_stops_at_the_floor() {
        let mut tau = PheromoneMatrix::new(3, 1.0, 1e-4, 1e6);
        for _ in 0..500 {
            global_update(&mut tau, &[], 1.0, 0.1, 1.0);
        }
        assert!(tau.entries().iter().all(|&v| v == 1e-4));
    }

    #[test]
    fn two_cities_first_iteration() {
        let inst = TspInstance::from_matrix(vec![vec![0.0, 2.5], vec![2.5, 0.0]]).unwrap();
        let rec = aco_run(&inst, &AcoConfig::default(), Budget::new(2).unwrap(), &mut RngStream::new(0)).unwrap();
        assert_eq!(rec.best_fitness, Some(5.0));
        assert_eq!(rec.best_curve[0].0, 1);
    }

    #[test]
    fn short_route_gathers_more_pheromone() {
        let inst = square();
        let mut colony = Colony::new(&inst, &AcoConfig::default()).unwrap();
        let mut ev = Evaluator::new(&inst, Budget::new(1_000).unwrap());
        let mut rng = RngStream::new(3);
        for _ in 0..50 {
            colony.iterate(&mut ev, &mut rng).unwrap();
        }
        let tau = colony.pheromone();
        let short = tau.tour_mass(&[0, 1, 2, 3]);
        let long = tau.tour_mass(&[0, 1, 3, 2]).max(tau.tour_mass(&[0, 2, 1, 3]));
        assert!(short > long);
        assert!(tau.is_symmetric());
    }

    #[test]
    fn pheromone_ignored_without_pheromone_weight() {
        let mut rng = RngStream::new(2);
        let inst = TspInstance::<f64>::random_uniform(7, 10.0, &mut rng).unwrap();
        let run = |tau0| {
            let cfg = AcoConfig { w_tau: 0.0, tau0, ..AcoConfig::default() };
            aco_run(&inst, &cfg, Budget::new(200).unwrap(), &mut RngStream::new(4)).unwrap()
        };
        let (a, b) = (run(1.0), run(50.0));
        assert_eq!(a.trajectory, b.trajectory);
        assert_eq!(a.best_solution, b.best_solution);
    }

    #[test]
    fn rejects_bad_config() {
        let inst = square();
        let bad = AcoConfig { rho: 1.0, ..AcoConfig::default() };
        assert!(bad.resolve(&inst).is_err());
        let bad = AcoConfig { w_tau: 0.0, w_eta: Some(0.0), ..AcoConfig::default() };
        assert!(bad.resolve(&inst).is_err());
    }
}
