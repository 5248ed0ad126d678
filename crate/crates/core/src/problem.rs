//! Problem, neighborhood and run-control contracts shared by every optimizer.
//!
//! The toolkit minimizes everywhere. Problems whose natural statement is a
//! maximization negate their objective at this boundary.

use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::scalar::Real;

/// A minimization task: objective, encoding and neighborhood.
///
/// Implementations are immutable after construction and may be shared by
/// concurrent runs; all mutable run state lives in the optimizer.
pub trait Problem {
    type Scalar: Real;
    type Solution: Clone + Debug + PartialEq + Serialize;
    type Move: Clone + Debug;

    /// Short name of the problem kind (`tsp`, `binpacking`, ...).
    fn kind(&self) -> &'static str;

    /// Checks that `s` is a structurally valid solution for this instance.
    fn validate(&self, s: &Self::Solution) -> Result<()>;

    /// Objective value of `s` (lower is better). Validates `s` first.
    ///
    /// This is the raw function; optimizers call it through
    /// [`Evaluator`](crate::run::Evaluator) so evaluations are counted.
    fn objective(&self, s: &Self::Solution) -> Result<Self::Scalar>;

    /// Uniform random solution, used by random search and restarts.
    fn random_solution(&self, rng: &mut RngStream) -> Self::Solution;

    /// One random member of N(s) together with the move producing it.
    fn sample_neighbor(&self, s: &Self::Solution, rng: &mut RngStream) -> Result<(Self::Solution, Self::Move)>;

    /// Full enumeration of N(s) in a fixed order.
    fn neighbors(&self, s: &Self::Solution) -> Result<Vec<(Self::Solution, Self::Move)>> {
        let _ = s;
        Err(Error::Unsupported(format!("{} neighborhood is not enumerable", self.kind())))
    }
}

/// Move-attribute bookkeeping used by tabu search.
pub trait TabuProblem: Problem {
    type Attribute: Clone + Debug + Eq + Hash + Ord;

    /// Attributes a move introduces when applied to `from`. The move is tabu
    /// when any of them is on the tabu list.
    fn move_attributes(&self, from: &Self::Solution, mv: &Self::Move) -> Vec<Self::Attribute>;

    /// Attributes of the reverse move, pushed on the tabu list once `mv`
    /// has been applied to `from`.
    fn reverse_attributes(&self, from: &Self::Solution, mv: &Self::Move) -> Vec<Self::Attribute>;

    /// Fraction in `[0, 1]` of elite solutions sharing the attributes the
    /// candidate move introduces.
    fn elite_overlap(
        &self,
        candidate: &Self::Solution,
        attributes: &[Self::Attribute],
        elite: &[Self::Solution],
    ) -> f64;
}

/// Evaluation budget and optional success threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget<F> {
    pub max_evaluations: u64,
    pub target_fitness: Option<F>,
}

impl<F: Real> Budget<F> {
    pub fn new(max_evaluations: u64) -> Result<Self> {
        if max_evaluations == 0 {
            return Err(Error::Validation("budget must allow at least one evaluation".into()));
        }
        Ok(Self { max_evaluations, target_fitness: None })
    }

    pub fn with_target(mut self, target: F) -> Self {
        self.target_fitness = Some(target);
        self
    }

    pub fn reached_target(&self, fitness: F) -> bool {
        matches!(self.target_fitness, Some(t) if fitness <= t)
    }
}
