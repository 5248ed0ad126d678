//! Binary Hopfield networks and the Hopfield-Tank TSP mapping.
//!
//! Neuron `(x, i)` fires when city `x` occupies tour position `i`; its
//! index in the flat network is `x * n + i`. Positions wrap modulo `n`.
//!
//! Thresholds follow the update rule `s_i = 1 iff Σ_j w_ji s_j − θ_i ≥ 0`,
//! and the Lyapunov energy of that rule is
//! `E = −½ Σ_ij w_ij s_i s_j + Σ_i θ_i s_i`.
//!
//! Bias derivation for the TSP mapping. Expanding the constraint and cost
//! energies as a quadratic form over binary `s` (using `s² = s`):
//!
//! * the off-diagonal pair coefficients give the printed weights
//!   `w_{xi,yj} = −A δ_xy(1−δ_ij) − B δ_ij(1−δ_xy) − C − D d_xy(δ_{j,i+1} + δ_{j,i−1})`;
//! * the `C/2 (Σ s − n)²` term leaves a linear part `(C/2 − C n) Σ s`, so
//!   `θ = C/2 − C n` for every neuron, and a constant `C n² / 2`.
//!
//! Hence `constraint_energy + cost_energy = network_energy + C n² / 2`.

use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::problem::Budget;
use crate::problems::{Tour, TspInstance};
use crate::rng::{Draw, RngStream};
use crate::run::{Evaluator, RunRecord, RunStatus};
use crate::scalar::Real;

/// Constraint (A, B, C) and cost (D) coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "F: Real + Deserialize<'de>"))]
pub struct TankParams<F> {
    pub a: F,
    pub b: F,
    pub c: F,
    pub d: F,
}

impl<F: Real> Default for TankParams<F> {
    fn default() -> Self {
        Self { a: F::lit(500.0), b: F::lit(500.0), c: F::lit(200.0), d: F::lit(500.0) }
    }
}

impl<F: Real> TankParams<F> {
    pub fn validate(&self) -> Result<()> {
        if [self.a, self.b, self.c, self.d].iter().any(|&v| !(v >= F::zero()) || !v.is_finite()) {
            return validation("Hopfield-Tank coefficients must be finite and non-negative");
        }
        Ok(())
    }
}

/// `n × n` binary matrix; `get(x, i) == 1` means city `x` at position `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TourMatrix {
    n: usize,
    cells: Vec<u8>,
}

impl TourMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, cells: vec![0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return validation("tour matrix must be square");
        }
        if rows.iter().flatten().any(|&v| v > 1) {
            return validation("tour matrix entries must be 0 or 1");
        }
        Ok(Self { n, cells: rows.iter().flatten().copied().collect() })
    }

    /// Permutation matrix of `tour` (`tour[i]` is the city at position `i`).
    pub fn from_tour(tour: &[usize]) -> Self {
        let mut m = Self::zeros(tour.len());
        for (i, &x) in tour.iter().enumerate() {
            m.set(x, i, 1);
        }
        m
    }

    pub fn from_state(n: usize, state: &[u8]) -> Self {
        assert_eq!(state.len(), n * n);
        Self { n, cells: state.to_vec() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, x: usize, i: usize) -> u8 {
        self.cells[x * self.n + i % self.n]
    }

    pub fn set(&mut self, x: usize, i: usize, v: u8) {
        self.cells[x * self.n + i] = v;
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn ones(&self) -> usize {
        self.cells.iter().map(|&v| v as usize).sum()
    }
}

/// `A/2 ΣxΣiΣ_{j≠i} V_xi V_xj + B/2 ΣiΣxΣ_{y≠x} V_xi V_yi + C/2 (Σ V − n)²`
pub fn constraint_energy<F: Real>(v: &TourMatrix, p: &TankParams<F>) -> F {
    let n = v.n();
    let mut rows = 0usize;
    let mut cols = 0usize;
    for x in 0..n {
        let r: usize = (0..n).map(|i| v.get(x, i) as usize).sum();
        rows += r * r.saturating_sub(1);
    }
    for i in 0..n {
        let c: usize = (0..n).map(|x| v.get(x, i) as usize).sum();
        cols += c * c.saturating_sub(1);
    }
    let excess = F::from_count(v.ones()) - F::from_count(n);
    let half = F::lit(0.5);
    half * p.a * F::from_count(rows) + half * p.b * F::from_count(cols) + half * p.c * excess * excess
}

/// `D/2 ΣxΣ_{y≠x}Σi d_xy V_xi (V_{y,i+1} + V_{y,i−1})`
pub fn cost_energy<F: Real>(v: &TourMatrix, dist: &TspInstance<F>, d: F) -> F {
    let n = v.n();
    let mut total = F::zero();
    for x in 0..n {
        for i in 0..n {
            if v.get(x, i) == 0 {
                continue;
            }
            for y in (0..n).filter(|&y| y != x) {
                let adj = v.get(y, i + 1) as usize + v.get(y, i + n - 1) as usize;
                if adj > 0 {
                    total = total + dist.dist(x, y) * F::from_count(adj);
                }
            }
        }
    }
    F::lit(0.5) * d * total
}

/// City order by position, or `None` unless `v` is a permutation matrix.
pub fn decode_tour(v: &TourMatrix) -> Option<Tour> {
    let n = v.n();
    let mut tour = Vec::with_capacity(n);
    for i in 0..n {
        let mut firing = (0..n).filter(|&x| v.get(x, i) == 1);
        let city = firing.next()?;
        if firing.next().is_some() {
            return None;
        }
        tour.push(city);
    }
    let mut seen = vec![false; n];
    for &c in &tour {
        if std::mem::replace(&mut seen[c], true) {
            return None;
        }
    }
    Some(tour)
}

/// Fully connected binary network with symmetric, zero-diagonal weights.
#[derive(Debug, Clone, PartialEq)]
pub struct HopfieldNet<F> {
    size: usize,
    weights: Vec<F>,
    thresholds: Vec<F>,
    state: Vec<u8>,
    /// Constant added to the network energy to recover the problem energy.
    energy_offset: F,
}

impl<F: Real> HopfieldNet<F> {
    pub fn new(weights: Vec<Vec<F>>, thresholds: Vec<F>) -> Result<Self> {
        let size = weights.len();
        if thresholds.len() != size || weights.iter().any(|r| r.len() != size) {
            return validation("weights must be square and match the threshold count");
        }
        for i in 0..size {
            if weights[i][i] != F::zero() {
                return validation(format!("self-connection w[{i}][{i}] must be zero"));
            }
            for j in 0..i {
                if weights[i][j] != weights[j][i] {
                    return validation(format!("weights not symmetric at ({i}, {j})"));
                }
            }
        }
        Ok(Self {
            size,
            weights: weights.into_iter().flatten().collect(),
            thresholds,
            state: vec![0; size],
            energy_offset: F::zero(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> F {
        self.weights[i * self.size + j]
    }

    pub fn thresholds(&self) -> &[F] {
        &self.thresholds
    }

    pub fn state(&self) -> &[u8] {
        &self.state
    }

    pub fn set_state(&mut self, state: &[u8]) -> Result<()> {
        if state.len() != self.size || state.iter().any(|&s| s > 1) {
            return validation("state must be binary with one entry per neuron");
        }
        self.state.copy_from_slice(state);
        Ok(())
    }

    pub fn randomize(&mut self, rng: &mut impl Draw) {
        for s in &mut self.state {
            *s = u8::from(rng.unit() < 0.5);
        }
    }

    pub fn energy_offset(&self) -> F {
        self.energy_offset
    }

    /// `Σ_j w_ji s_j − θ_i`
    pub fn net_input(&self, i: usize) -> F {
        let field: F = (0..self.size).filter(|&j| self.state[j] == 1).map(|j| self.weight(j, i)).sum();
        field - self.thresholds[i]
    }

    /// Applies the sign rule to neuron `i`; returns whether it changed.
    pub fn update_neuron(&mut self, i: usize) -> bool {
        let next = u8::from(self.net_input(i) >= F::zero());
        let changed = next != self.state[i];
        self.state[i] = next;
        changed
    }

    /// No neuron would change under the update rule.
    pub fn is_fixed_point(&self) -> bool {
        (0..self.size).all(|i| u8::from(self.net_input(i) >= F::zero()) == self.state[i])
    }
}

/// Hopfield-Tank network for `inst`.
pub fn build_weights<F: Real>(inst: &TspInstance<F>, p: &TankParams<F>) -> Result<HopfieldNet<F>> {
    p.validate()?;
    let n = inst.len();
    let size = n * n;
    let delta = |a: usize, b: usize| if a == b { F::one() } else { F::zero() };
    let mut weights = vec![F::zero(); size * size];
    for x in 0..n {
        for i in 0..n {
            for y in 0..n {
                for j in 0..n {
                    let (a, b) = (x * n + i, y * n + j);
                    if a == b {
                        continue;
                    }
                    let adjacent = delta(j, (i + 1) % n) + delta(j, (i + n - 1) % n);
                    weights[a * size + b] = -p.a * delta(x, y) * (F::one() - delta(i, j))
                        - p.b * delta(i, j) * (F::one() - delta(x, y))
                        - p.c
                        - p.d * inst.dist(x, y) * adjacent;
                }
            }
        }
    }
    let half = F::lit(0.5);
    let nf = F::from_count(n);
    Ok(HopfieldNet {
        size,
        weights,
        thresholds: vec![p.c * half - p.c * nf; size],
        state: vec![0; size],
        energy_offset: half * p.c * nf * nf,
    })
}

/// Updates one uniformly chosen neuron; returns whether it changed.
pub fn async_step<F: Real>(net: &mut HopfieldNet<F>, rng: &mut impl Draw) -> bool {
    let i = rng.index(net.size);
    net.update_neuron(i)
}

/// `E = −½ Σ_ij w_ij s_i s_j + Σ_i θ_i s_i`
pub fn network_energy<F: Real>(net: &HopfieldNet<F>) -> F {
    let on: Vec<usize> = (0..net.size).filter(|&i| net.state[i] == 1).collect();
    let mut quad = F::zero();
    for &i in &on {
        for &j in &on {
            quad = quad + net.weight(i, j);
        }
    }
    let lin: F = on.iter().map(|&i| net.thresholds[i]).sum();
    -F::lit(0.5) * quad + lin
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "F: Real + Deserialize<'de>"))]
pub struct HopfieldConfig<F> {
    pub params: TankParams<F>,
    /// Single-neuron updates per restart.
    pub max_steps: u64,
    pub restarts: u64,
    /// Multiplier applied to distances when building the weights. Valid
    /// tours are fixed points only when adjacent-city distances are small
    /// against `C / (4 D)`, so instances in large units need a scale well
    /// below 1. Reported tour lengths stay in the instance's units.
    pub distance_scale: F,
}

impl<F: Real> Default for HopfieldConfig<F> {
    fn default() -> Self {
        Self { params: TankParams::default(), max_steps: 100_000, restarts: 100, distance_scale: F::one() }
    }
}

/// Runs the network from `restarts` random binary states (restart `r`
/// draws from sub-stream `r`) until a fixed point or `max_steps` updates,
/// and keeps the shortest decoded valid tour. Every valid decoded tour
/// costs one evaluation.
pub fn hopfield_solve<F: Real>(
    inst: &TspInstance<F>,
    cfg: &HopfieldConfig<F>,
    rng: &mut RngStream,
) -> Result<RunRecord<F, Tour>> {
    if cfg.restarts == 0 {
        return validation("hopfield needs at least one restart");
    }
    if !(cfg.distance_scale > F::zero() && cfg.distance_scale.is_finite()) {
        return validation("distance scale must be positive and finite");
    }
    let mut net = if cfg.distance_scale == F::one() {
        build_weights(inst, &cfg.params)?
    } else {
        let n = inst.len();
        let m = (0..n).map(|x| (0..n).map(|y| inst.dist(x, y) * cfg.distance_scale).collect()).collect();
        build_weights(&TspInstance::from_matrix(m)?, &cfg.params)?
    };
    let budget = Budget::new(cfg.restarts)?;
    let mut ev = Evaluator::new(inst, budget);
    let size = net.size();
    let mut valid = 0u64;
    let mut converged = 0u64;
    for r in 0..cfg.restarts {
        let mut sub = rng.substream(r);
        net.randomize(&mut sub);
        let mut steps = 0u64;
        let mut fixed = false;
        while steps < cfg.max_steps {
            async_step(&mut net, &mut sub);
            steps += 1;
            if steps % size as u64 == 0 && net.is_fixed_point() {
                fixed = true;
                break;
            }
        }
        fixed = fixed || net.is_fixed_point();
        converged += u64::from(fixed);
        let v = TourMatrix::from_state(inst.len(), net.state());
        if let Some(tour) = decode_tour(&v) {
            valid += 1;
            let len = ev.evaluate(&tour)?;
            ev.record_current(len);
        }
    }
    ev.set_metric("valid_fraction", valid as f64 / cfg.restarts as f64);
    ev.set_metric("converged_fraction", converged as f64 / cfg.restarts as f64);
    let status = if valid == 0 { RunStatus::Failed } else { ev.default_status() };
    Ok(ev.finish(rng.seed(), status))
}
