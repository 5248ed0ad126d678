//! Stochastic optimization toolkit.
//!
//! Every optimizer minimizes a [`Problem`] under an evaluation [`Budget`]
//! and returns a [`RunRecord`]. Randomness comes only from seeded
//! [`RngStream`]s, so a run is reproduced exactly by its seed.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar for everyday use.

pub mod aco;
pub mod annealing;
pub mod effort;
pub mod error;
pub mod hopfield;
pub mod local_search;
pub mod problem;
pub mod problems;
pub mod rng;
pub mod run;
pub mod scalar;
pub mod swarm;
pub mod tabu;

pub use error::{Error, Result};
pub use problem::{Budget, Problem, TabuProblem};
pub use rng::{Draw, FixedDraws, RngStream};
pub use run::{Evaluator, RunRecord, RunStatus};
pub use scalar::Real;

pub type Tsp = problems::TspInstance<f64>;
pub type Tsp32 = problems::TspInstance<f32>;
pub type BinPacking = problems::BinPackingInstance<f64>;
pub type BinPacking32 = problems::BinPackingInstance<f32>;
pub type Landscape = problems::ContinuousLandscape<f64>;
pub type Landscape32 = problems::ContinuousLandscape<f32>;
pub type Tabletop = problems::TabletopInstance<f64>;
pub type Instance = problems::ProblemInstance<f64>;
pub type Instance32 = problems::ProblemInstance<f32>;
pub type AnySolution = problems::Solution<f64>;
pub type Record<S> = run::RunRecord<f64, S>;
