//! Concrete problems realizing the [`Problem`](crate::problem::Problem) contract.

pub mod binpacking;
pub mod instance;
pub mod landscape;
pub mod tabletop;
pub mod tsp;

pub use binpacking::{Assignment, BinPackingInstance, PackingMove, Placement};
pub use instance::{evaluate, Attribute, Move, ProblemInstance, Solution};
pub use landscape::{ContinuousLandscape, LandscapeKind, LandscapeValue, Perturbation};
pub use tabletop::{StepLabel, TabletopInstance};
pub use tsp::{tour_has_edge, two_opt, two_opt_in_place, Edge, Rounding, Tour, TspInstance, TwoOptMove};
