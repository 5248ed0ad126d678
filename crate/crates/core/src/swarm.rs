//! Particle swarm optimization (global-best topology) on continuous landscapes.

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::problem::{Budget, Problem};
use crate::problems::{ContinuousLandscape, ProblemInstance, Solution};
use crate::rng::{Draw, RngStream};
use crate::run::{Evaluator, RunRecord};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Particle<F> {
    pub pos: Vec<F>,
    pub veloc: Vec<F>,
    pub pbest_pos: Vec<F>,
    pub pbest_val: F,
}

impl<F: Real> Particle<F> {
    /// Particle at rest whose personal best is still the `+∞` sentinel.
    pub fn at_rest(pos: Vec<F>) -> Self {
        let d = pos.len();
        Self { pbest_pos: pos.clone(), pos, veloc: vec![F::zero(); d], pbest_val: F::infinity() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalBest<F> {
    pub pos: Vec<F>,
    pub val: F,
}

impl<F: Real> GlobalBest<F> {
    pub fn empty(dimension: usize) -> Self {
        Self { pos: vec![F::zero(); dimension], val: F::infinity() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VelocityClamp<F> {
    /// Half of each variable's range.
    HalfRange,
    Absolute(F),
    Off,
}

/// How the previous velocity enters the update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InertiaMode<F> {
    /// `v + φp r1 (p − x) + φg r2 (g − x)`
    Original,
    /// `w v + φp r1 (p − x) + φg r2 (g − x)`
    Weight(F),
    /// `χ (v + φp r1 (p − x) + φg r2 (g − x))`
    Constriction(F),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "F: Real + Deserialize<'de>"))]
pub struct SwarmConfig<F> {
    pub size: usize,
    pub p_increment: F,
    pub g_increment: F,
    pub vmax: VelocityClamp<F>,
    pub inertia: InertiaMode<F>,
}

impl<F: Real> Default for SwarmConfig<F> {
    fn default() -> Self {
        Self {
            size: 20,
            p_increment: F::lit(2.0),
            g_increment: F::lit(2.0),
            vmax: VelocityClamp::HalfRange,
            inertia: InertiaMode::Original,
        }
    }
}

impl<F: Real> SwarmConfig<F> {
    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return validation("swarm size must be at least 1");
        }
        if !(self.p_increment >= F::zero()) || !(self.g_increment >= F::zero()) {
            return validation("swarm increments must be non-negative");
        }
        if let VelocityClamp::Absolute(v) = self.vmax {
            if !(v > F::zero()) {
                return validation("vmax must be positive");
            }
        }
        Ok(())
    }

    /// Per-dimension velocity limits for `bounds` (infinite when unclamped).
    pub fn velocity_limits(&self, bounds: &[(F, F)]) -> Vec<F> {
        bounds
            .iter()
            .map(|&(lo, hi)| match self.vmax {
                VelocityClamp::HalfRange => (hi - lo) * F::lit(0.5),
                VelocityClamp::Absolute(v) => v,
                VelocityClamp::Off => F::infinity(),
            })
            .collect()
    }
}

/// New velocity of `p`. Draws `r1` then `r2` for each dimension in order.
pub fn update_velocity<F: Real>(
    p: &Particle<F>,
    g: &GlobalBest<F>,
    cfg: &SwarmConfig<F>,
    limits: &[F],
    rng: &mut impl Draw,
) -> Result<Vec<F>> {
    let d = p.pos.len();
    if p.veloc.len() != d || p.pbest_pos.len() != d || g.pos.len() != d || limits.len() != d {
        return Err(Error::ContractViolation("particle dimensions disagree".into()));
    }
    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        let r1 = F::lit(rng.unit());
        let r2 = F::lit(rng.unit());
        let pull = cfg.p_increment * r1 * (p.pbest_pos[i] - p.pos[i]) + cfg.g_increment * r2 * (g.pos[i] - p.pos[i]);
        let v = match cfg.inertia {
            InertiaMode::Original => p.veloc[i] + pull,
            InertiaMode::Weight(w) => w * p.veloc[i] + pull,
            InertiaMode::Constriction(chi) => chi * (p.veloc[i] + pull),
        };
        out.push(v.max(-limits[i]).min(limits[i]));
    }
    Ok(out)
}

/// Evaluates `p` at its position, updating its personal best on strict improvement.
fn assess<F: Real>(p: &mut Particle<F>, ev: &mut Evaluator<'_, ContinuousLandscape<F>>) -> Result<F> {
    let f = ev.evaluate(&p.pos)?;
    if f < p.pbest_val {
        p.pbest_val = f;
        p.pbest_pos.clone_from(&p.pos);
    }
    Ok(f)
}

fn refresh_global<F: Real>(particles: &[Particle<F>], g: &mut GlobalBest<F>) {
    for p in particles {
        if p.pbest_val < g.val {
            g.val = p.pbest_val;
            g.pos.clone_from(&p.pbest_pos);
        }
    }
}

/// One synchronous sweep: every particle (in index order) gets a new
/// velocity, moves, is clamped into bounds and evaluated; the global best
/// is refreshed from the personal bests afterwards. Stops early if the
/// budget runs out; returns the number of clamped positions.
pub fn step_swarm<F: Real>(
    particles: &mut [Particle<F>],
    g: &mut GlobalBest<F>,
    cfg: &SwarmConfig<F>,
    limits: &[F],
    ev: &mut Evaluator<'_, ContinuousLandscape<F>>,
    rng: &mut impl Draw,
) -> Result<usize> {
    let land = ev.problem();
    let mut clamped = 0;
    for p in particles.iter_mut() {
        if ev.should_stop() {
            break;
        }
        p.veloc = update_velocity(p, g, cfg, limits, rng)?;
        for (x, v) in p.pos.iter_mut().zip(&p.veloc) {
            *x = *x + *v;
        }
        if land.clamp(&mut p.pos) {
            clamped += 1;
        }
        assess(p, ev)?;
    }
    refresh_global(particles, g);
    Ok(clamped)
}

/// Runs a swarm on a continuous landscape until the budget or target.
pub fn pso_run<F: Real>(
    land: &ContinuousLandscape<F>,
    cfg: &SwarmConfig<F>,
    budget: Budget<F>,
    rng: &mut RngStream,
) -> Result<RunRecord<F, Vec<F>>> {
    cfg.validate()?;
    let bounds = land.bounds().to_vec();
    let limits = cfg.velocity_limits(&bounds);
    let mut ev = Evaluator::new(land, budget);
    let mut particles = Vec::with_capacity(cfg.size);
    for _ in 0..cfg.size {
        let pos: Vec<F> = bounds.iter().map(|&(lo, hi)| lo + (hi - lo) * F::lit(rng.unit())).collect();
        let mut p = Particle::at_rest(pos);
        for (v, &(lo, hi)) in p.veloc.iter_mut().zip(&bounds) {
            let span = (hi - lo) * F::lit(0.1);
            *v = span * F::lit(rng.uniform(-1.0, 1.0));
        }
        particles.push(p);
    }
    let mut g = GlobalBest::empty(land.dimension());
    for p in particles.iter_mut() {
        if ev.should_stop() {
            break;
        }
        assess(p, &mut ev)?;
    }
    refresh_global(&particles, &mut g);
    ev.record_current(g.val);
    let mut clamped = 0usize;
    let mut sweeps = 0u64;
    while !ev.should_stop() {
        clamped += step_swarm(&mut particles, &mut g, cfg, &limits, &mut ev, rng)?;
        ev.record_current(g.val);
        sweeps += 1;
    }
    ev.set_metric("sweeps", sweeps as f64);
    ev.set_metric("clamped_positions", clamped as f64);
    let status = ev.default_status();
    Ok(ev.finish(rng.seed(), status))
}

/// [`pso_run`] on a kind-tagged instance; only continuous instances qualify.
pub fn pso_run_instance<F: Real>(
    inst: &ProblemInstance<F>,
    cfg: &SwarmConfig<F>,
    budget: Budget<F>,
    rng: &mut RngStream,
) -> Result<RunRecord<F, Solution<F>>> {
    let ProblemInstance::Continuous(land) = inst else {
        return Err(Error::Unsupported(format!("particle swarm needs a continuous instance, got {}", inst.kind())));
    };
    let rec = pso_run(land, cfg, budget, rng)?;
    Ok(rec.map_solution(Solution::Vector))
}
