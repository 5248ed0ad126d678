//! Metropolis acceptance, cooling schedules and the simulated annealing loop,
//! including the rescaled-energy variant.
//!
//! The Boltzmann constant is absorbed into the temperature (`k_B = 1`).

use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::problem::{Budget, Problem};
use crate::rng::{Draw, RngStream};
use crate::run::{Evaluator, RunRecord, RunStatus};
use crate::scalar::Real;
use num_traits::{Float, One, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    /// `T_i = T0 · λ^i`
    #[default]
    Geometric,
    /// `T_i = max(T0 − i · decrement, floor)`
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoolingSchedule<F> {
    pub kind: ScheduleKind,
    pub t0: F,
    /// Geometric factor in (0, 1), or the linear decrement.
    pub lambda: F,
    pub steps_per_temperature: u64,
    /// Lower clamp of the linear schedule.
    pub floor: F,
    /// The run reports `Frozen` once the temperature drops below this.
    pub frozen_below: Option<F>,
}

impl<F: Real> CoolingSchedule<F> {
    pub fn geometric(t0: F, lambda: F, steps_per_temperature: u64) -> Result<Self> {
        let s = Self {
            kind: ScheduleKind::Geometric,
            t0,
            lambda,
            steps_per_temperature,
            floor: F::min_positive_value(),
            frozen_below: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn linear(t0: F, decrement: F, floor: F, steps_per_temperature: u64) -> Result<Self> {
        let s = Self {
            kind: ScheduleKind::Linear,
            t0,
            lambda: decrement,
            steps_per_temperature,
            floor,
            frozen_below: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > F::zero()) || !self.t0.is_finite() {
            return validation("initial temperature must be positive and finite");
        }
        if self.steps_per_temperature == 0 {
            return validation("steps per temperature must be at least 1");
        }
        match self.kind {
            ScheduleKind::Geometric => {
                if !(self.lambda > F::zero() && self.lambda < F::one()) {
                    return validation("geometric factor must lie in (0, 1)");
                }
            }
            ScheduleKind::Linear => {
                if !(self.lambda > F::zero()) {
                    return validation("linear decrement must be positive");
                }
                if !(self.floor > F::zero()) {
                    return validation("linear temperature floor must be positive");
                }
            }
        }
        Ok(())
    }

    /// Temperature of the `i`-th temperature level.
    pub fn next_temperature(&self, i: u64) -> F {
        match self.kind {
            ScheduleKind::Geometric => {
                let t = self.t0 * self.lambda.powf(F::lit(i as f64));
                t.max(F::min_positive_value())
            }
            ScheduleKind::Linear => (self.t0 - F::lit(i as f64) * self.lambda).max(self.floor),
        }
    }

    fn is_frozen(&self, t: F) -> bool {
        matches!(self.frozen_below, Some(limit) if t < limit)
    }
}

/// Metropolis rule: always accept `delta <= 0`, otherwise accept with
/// probability `exp(-delta / t)`. Only uphill moves consume a draw.
pub fn metropolis_accept<F: Real, D: Draw + ?Sized>(delta: F, t: F, draw: &mut D) -> Result<bool> {
    if !(t > F::zero()) {
        return validation(format!("temperature must be positive, got {t}"));
    }
    if delta <= F::zero() {
        return Ok(true);
    }
    let p = (-(delta / t)).exp().as_f64();
    Ok(draw.unit() < p)
}

/// Which rescaled energy difference to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RescaleForm {
    /// `(√E_j − √E_i)² − (√E_i − √E_t)²`
    #[default]
    Printed,
    /// `(√E_j − √E_t)² − (√E_i − √E_t)²`
    TargetCentered,
}

/// Rescaled energy difference for a transition from `e_i` to `e_j` with
/// target energy `e_t`. All energies must be non-negative.
pub fn rescaled_delta<F: Real>(e_i: F, e_j: F, e_t: F) -> Result<F> {
    rescaled_delta_with(e_i, e_j, e_t, RescaleForm::Printed)
}

pub fn rescaled_delta_with<F: Real>(e_i: F, e_j: F, e_t: F, form: RescaleForm) -> Result<F> {
    if e_i < F::zero() || e_j < F::zero() || e_t < F::zero() {
        return validation(format!(
            "rescaled energies must be non-negative (E_i={e_i}, E_j={e_j}, E_t={e_t}); shift the objective first"
        ));
    }
    let (si, sj, st) = (e_i.sqrt(), e_j.sqrt(), e_t.sqrt());
    let sq = |x: F| x * x;
    Ok(match form {
        RescaleForm::Printed => sq(sj - si) - sq(si - st),
        RescaleForm::TargetCentered => sq(sj - st) - sq(si - st),
    })
}

/// Rescaled mode: target energy `E_t = α T²`, recomputed at every
/// temperature level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaleParams<F> {
    pub alpha: F,
    #[serde(default)]
    pub form: RescaleForm,
}

impl<F: Real> RescaleParams<F> {
    pub fn new(alpha: F) -> Result<Self> {
        if !(alpha > F::zero()) {
            return validation("rescale alpha must be positive");
        }
        Ok(Self { alpha, form: RescaleForm::Printed })
    }
}

/// Simulated annealing settings. With `t0 = None` the initial temperature
/// is `t0_factor` times the mean |Δf| over `probes` random neighbor probes
/// of the start solution (the probes are counted evaluations).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "F: Real + Deserialize<'de>"))]
pub struct SaConfig<F> {
    pub t0: Option<F>,
    pub kind: ScheduleKind,
    pub lambda: F,
    pub steps_per_temperature: u64,
    pub floor: F,
    pub frozen_below: Option<F>,
    pub probes: u64,
    pub t0_factor: F,
    pub rescaled: Option<RescaleParams<F>>,
}

impl<F: Real> Default for SaConfig<F> {
    fn default() -> Self {
        Self {
            t0: None,
            kind: ScheduleKind::Geometric,
            lambda: F::lit(0.95),
            steps_per_temperature: 100,
            floor: F::lit(1e-6),
            frozen_below: None,
            probes: 100,
            t0_factor: F::lit(10.0),
            rescaled: None,
        }
    }
}

impl<F: Real> SaConfig<F> {
    fn schedule(&self, t0: F) -> Result<CoolingSchedule<F>> {
        let mut s = match self.kind {
            ScheduleKind::Geometric => CoolingSchedule::geometric(t0, self.lambda, self.steps_per_temperature)?,
            ScheduleKind::Linear => CoolingSchedule::linear(t0, self.lambda, self.floor, self.steps_per_temperature)?,
        };
        s.frozen_below = self.frozen_below;
        Ok(s)
    }
}

/// Simulated annealing from a uniform random start.
pub fn simulated_annealing<P: Problem>(
    problem: &P,
    cfg: &SaConfig<P::Scalar>,
    budget: &Budget<P::Scalar>,
    rng: &mut RngStream,
) -> Result<RunRecord<P::Scalar, P::Solution>> {
    let start = problem.random_solution(rng);
    anneal_from(problem, start, cfg, budget, rng)
}

pub fn anneal_from<P: Problem>(
    problem: &P,
    start: P::Solution,
    cfg: &SaConfig<P::Scalar>,
    budget: &Budget<P::Scalar>,
    rng: &mut RngStream,
) -> Result<RunRecord<P::Scalar, P::Solution>> {
    type F<P> = <P as Problem>::Scalar;
    if let Some(t0) = cfg.t0 {
        cfg.schedule(t0)?;
    }
    let mut ev = Evaluator::new(problem, *budget);
    let mut current = start;
    let mut current_f = ev.evaluate(&current)?;
    ev.record_current(current_f);

    let t0 = match cfg.t0 {
        Some(t0) => t0,
        None => {
            let mut total = F::<P>::zero();
            let mut probes = 0usize;
            while probes < cfg.probes as usize && !ev.should_stop() {
                let (n, _) = problem.sample_neighbor(&current, rng)?;
                let f = ev.evaluate(&n)?;
                total = total + (f - current_f).abs();
                probes += 1;
            }
            let mean = if probes > 0 { total / F::<P>::from_count(probes) } else { F::<P>::zero() };
            if mean > F::<P>::zero() {
                cfg.t0_factor * mean
            } else {
                F::<P>::one()
            }
        }
    };
    let schedule = cfg.schedule(t0)?;
    ev.set_metric("t0", t0.as_f64());

    let mut level = 0u64;
    let mut steps_here = 0u64;
    let mut uphill = 0u64;
    let mut uphill_accepted = 0u64;
    let mut status = None;
    while !ev.should_stop() {
        let t = schedule.next_temperature(level);
        if schedule.is_frozen(t) {
            status = Some(RunStatus::Frozen);
            break;
        }
        let (candidate, _) = problem.sample_neighbor(&current, rng)?;
        let f = ev.evaluate(&candidate)?;
        let delta = match cfg.rescaled {
            None => f - current_f,
            Some(rp) => {
                // energies shifted by the running minimum stay non-negative
                let floor = ev.best_fitness().unwrap_or(f);
                let e_t = rp.alpha * t * t;
                rescaled_delta_with(current_f - floor, f - floor, e_t, rp.form)?
            }
        };
        let up = f > current_f;
        if up {
            uphill += 1;
        }
        if metropolis_accept(delta, t, rng)? {
            if up {
                uphill_accepted += 1;
            }
            current = candidate;
            current_f = f;
        }
        ev.record_current(current_f);
        steps_here += 1;
        if steps_here >= schedule.steps_per_temperature {
            steps_here = 0;
            level += 1;
        }
    }
    if uphill > 0 {
        ev.set_metric("uphill_acceptance_rate", uphill_accepted as f64 / uphill as f64);
    }
    ev.set_metric("final_temperature", schedule.next_temperature(level).as_f64());
    let status = status.unwrap_or_else(|| ev.default_status());
    Ok(ev.finish(rng.seed(), status))
}
