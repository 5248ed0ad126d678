//! Explicit finite state graphs ("tabletop" problems): every state has a
//! cost and a list of labelled neighbor edges.

use std::fmt;

use serde::Serialize;

use crate::error::{validation, Error, Result};
use crate::problem::{Problem, TabuProblem};
use crate::rng::{Draw, RngStream};
use crate::scalar::Real;

/// Label of a directed step between two states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepLabel {
    /// Move along a cube axis (0 = x, 1 = y, 2 = z) in the given direction.
    Axis { axis: u8, positive: bool },
    /// Plain graph edge.
    Edge { from: usize, to: usize },
}

impl StepLabel {
    pub fn reverse(self) -> Self {
        match self {
            StepLabel::Axis { axis, positive } => StepLabel::Axis { axis, positive: !positive },
            StepLabel::Edge { from, to } => StepLabel::Edge { from: to, to: from },
        }
    }
}

impl fmt::Display for StepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            StepLabel::Axis { axis, positive } => {
                let name = ["x", "y", "z"].get(axis as usize).copied().unwrap_or("?");
                write!(f, "{name}{}", if positive { '+' } else { '-' })
            }
            StepLabel::Edge { from, to } => write!(f, "{from}->{to}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabletopInstance<F> {
    costs: Vec<F>,
    adjacency: Vec<Vec<(usize, StepLabel)>>,
}

impl<F: Real> TabletopInstance<F> {
    /// Graph from per-state costs and undirected edges. Neighbor order
    /// follows the edge list.
    pub fn new(costs: Vec<F>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = costs.len();
        if n == 0 {
            return validation("tabletop needs at least one state");
        }
        if let Some(c) = costs.iter().find(|c| !c.is_finite()) {
            return validation(format!("state cost {c} is not finite"));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return validation(format!("edge ({a}, {b}) invalid for {n} states"));
            }
            adjacency[a].push((b, StepLabel::Edge { from: a, to: b }));
            adjacency[b].push((a, StepLabel::Edge { from: b, to: a }));
        }
        Ok(Self { costs, adjacency })
    }

    /// The eight-configuration cube used as the tabu search worked example.
    ///
    /// State id is `x + 2y + 4z`; vertex costs are
    /// (0,0,0)=15, (1,0,0)=10, (0,1,0)=5, (1,1,0)=12,
    /// (0,0,1)=11, (1,0,1)=8, (0,1,1)=9, (1,1,1)=13.
    /// Neighbors are listed in x, y, z order.
    pub fn cube() -> Self {
        let costs = [15.0, 10.0, 5.0, 12.0, 11.0, 8.0, 9.0, 13.0].into_iter().map(F::lit).collect();
        let adjacency = (0..8usize)
            .map(|s| {
                (0..3u8)
                    .map(|axis| {
                        let bit = 1usize << axis;
                        let positive = s & bit == 0;
                        (s ^ bit, StepLabel::Axis { axis, positive })
                    })
                    .collect()
            })
            .collect();
        Self { costs, adjacency }
    }

    /// Cube state id for corner `(x, y, z)`.
    pub fn cube_state(x: usize, y: usize, z: usize) -> usize {
        x | (y << 1) | (z << 2)
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn cost(&self, state: usize) -> F {
        self.costs[state]
    }

    pub fn costs(&self) -> &[F] {
        &self.costs
    }

    /// First state with the given cost.
    pub fn state_with_cost(&self, cost: F) -> Option<usize> {
        self.costs.iter().position(|&c| c == cost)
    }

    pub fn adjacent(&self, state: usize) -> &[(usize, StepLabel)] {
        &self.adjacency[state]
    }

    fn check(&self, state: usize) -> Result<()> {
        if state >= self.costs.len() {
            return validation(format!("state {state} out of range 0..{}", self.costs.len()));
        }
        Ok(())
    }
}

impl<F: Real> Problem for TabletopInstance<F> {
    type Scalar = F;
    type Solution = usize;
    type Move = StepLabel;

    fn kind(&self) -> &'static str {
        "tabletop"
    }

    fn validate(&self, s: &usize) -> Result<()> {
        self.check(*s)
    }

    fn objective(&self, s: &usize) -> Result<F> {
        self.check(*s)?;
        Ok(self.costs[*s])
    }

    fn random_solution(&self, rng: &mut RngStream) -> usize {
        rng.index(self.costs.len())
    }

    fn sample_neighbor(&self, s: &usize, rng: &mut RngStream) -> Result<(usize, StepLabel)> {
        self.check(*s)?;
        let adj = &self.adjacency[*s];
        if adj.is_empty() {
            return Err(Error::NoNeighbor(format!("tabletop state {s} is isolated")));
        }
        Ok(adj[rng.index(adj.len())])
    }

    fn neighbors(&self, s: &usize) -> Result<Vec<(usize, StepLabel)>> {
        self.check(*s)?;
        Ok(self.adjacency[*s].clone())
    }
}

impl<F: Real> TabuProblem for TabletopInstance<F> {
    type Attribute = StepLabel;

    fn move_attributes(&self, _from: &usize, mv: &StepLabel) -> Vec<StepLabel> {
        vec![*mv]
    }

    fn reverse_attributes(&self, _from: &usize, mv: &StepLabel) -> Vec<StepLabel> {
        vec![mv.reverse()]
    }

    /// States carry no components, so closeness is identity with an elite state.
    fn elite_overlap(&self, candidate: &usize, _attributes: &[StepLabel], elite: &[usize]) -> f64 {
        if elite.is_empty() {
            return 0.0;
        }
        elite.iter().filter(|&&e| e == *candidate).count() as f64 / elite.len() as f64
    }
}
