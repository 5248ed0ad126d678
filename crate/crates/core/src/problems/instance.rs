//! Kind-tagged instance and solution wrappers, so a driver can run any
//! optimizer on an instance chosen at run time.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::{Problem, TabuProblem};
use crate::rng::RngStream;
use crate::scalar::Real;

use super::binpacking::{BinPackingInstance, PackingMove, Placement};
use super::landscape::{ContinuousLandscape, Perturbation};
use super::tabletop::{StepLabel, TabletopInstance};
use super::tsp::{Edge, TspInstance, TwoOptMove};

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemInstance<F> {
    Tsp(TspInstance<F>),
    BinPacking(BinPackingInstance<F>),
    Continuous(ContinuousLandscape<F>),
    Tabletop(TabletopInstance<F>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Solution<F> {
    Permutation(Vec<usize>),
    Assignment(Vec<usize>),
    Vector(Vec<F>),
    State(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Move {
    TwoOpt(TwoOptMove),
    Packing(PackingMove),
    Perturb(Perturbation),
    Step(StepLabel),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribute {
    Edge(Edge),
    Placement(Placement),
    Step(StepLabel),
}

fn mismatch<T>(kind: &str, s: &Solution<impl Real>) -> Result<T> {
    let enc = match s {
        Solution::Permutation(_) => "permutation",
        Solution::Assignment(_) => "assignment",
        Solution::Vector(_) => "vector",
        Solution::State(_) => "state-id",
    };
    Err(Error::ContractViolation(format!("{enc} solution given to a {kind} instance")))
}

fn wrap<S, M, F>(v: Vec<(S, M)>, s: impl Fn(S) -> Solution<F>, m: impl Fn(M) -> Move) -> Vec<(Solution<F>, Move)> {
    v.into_iter().map(|(a, b)| (s(a), m(b))).collect()
}

impl<F: Real> Problem for ProblemInstance<F> {
    type Scalar = F;
    type Solution = Solution<F>;
    type Move = Move;

    fn kind(&self) -> &'static str {
        match self {
            ProblemInstance::Tsp(p) => p.kind(),
            ProblemInstance::BinPacking(p) => p.kind(),
            ProblemInstance::Continuous(p) => p.kind(),
            ProblemInstance::Tabletop(p) => p.kind(),
        }
    }

    fn validate(&self, s: &Solution<F>) -> Result<()> {
        match (self, s) {
            (ProblemInstance::Tsp(p), Solution::Permutation(t)) => p.validate(t),
            (ProblemInstance::BinPacking(p), Solution::Assignment(a)) => p.validate(a),
            (ProblemInstance::Continuous(p), Solution::Vector(x)) => p.validate(x),
            (ProblemInstance::Tabletop(p), Solution::State(id)) => p.validate(id),
            _ => mismatch(self.kind(), s),
        }
    }

    fn objective(&self, s: &Solution<F>) -> Result<F> {
        match (self, s) {
            (ProblemInstance::Tsp(p), Solution::Permutation(t)) => p.objective(t),
            (ProblemInstance::BinPacking(p), Solution::Assignment(a)) => p.objective(a),
            (ProblemInstance::Continuous(p), Solution::Vector(x)) => p.objective(x),
            (ProblemInstance::Tabletop(p), Solution::State(id)) => p.objective(id),
            _ => mismatch(self.kind(), s),
        }
    }

    fn random_solution(&self, rng: &mut RngStream) -> Solution<F> {
        match self {
            ProblemInstance::Tsp(p) => Solution::Permutation(p.random_solution(rng)),
            ProblemInstance::BinPacking(p) => Solution::Assignment(p.random_solution(rng)),
            ProblemInstance::Continuous(p) => Solution::Vector(p.random_solution(rng)),
            ProblemInstance::Tabletop(p) => Solution::State(p.random_solution(rng)),
        }
    }

    fn sample_neighbor(&self, s: &Solution<F>, rng: &mut RngStream) -> Result<(Solution<F>, Move)> {
        Ok(match (self, s) {
            (ProblemInstance::Tsp(p), Solution::Permutation(t)) => {
                let (n, m) = p.sample_neighbor(t, rng)?;
                (Solution::Permutation(n), Move::TwoOpt(m))
            }
            (ProblemInstance::BinPacking(p), Solution::Assignment(a)) => {
                let (n, m) = p.sample_neighbor(a, rng)?;
                (Solution::Assignment(n), Move::Packing(m))
            }
            (ProblemInstance::Continuous(p), Solution::Vector(x)) => {
                let (n, m) = p.sample_neighbor(x, rng)?;
                (Solution::Vector(n), Move::Perturb(m))
            }
            (ProblemInstance::Tabletop(p), Solution::State(id)) => {
                let (n, m) = p.sample_neighbor(id, rng)?;
                (Solution::State(n), Move::Step(m))
            }
            _ => return mismatch(self.kind(), s),
        })
    }

    fn neighbors(&self, s: &Solution<F>) -> Result<Vec<(Solution<F>, Move)>> {
        Ok(match (self, s) {
            (ProblemInstance::Tsp(p), Solution::Permutation(t)) => {
                wrap(p.neighbors(t)?, Solution::Permutation, Move::TwoOpt)
            }
            (ProblemInstance::BinPacking(p), Solution::Assignment(a)) => {
                wrap(p.neighbors(a)?, Solution::Assignment, Move::Packing)
            }
            (ProblemInstance::Continuous(p), Solution::Vector(x)) => {
                wrap(p.neighbors(x)?, Solution::Vector, Move::Perturb)
            }
            (ProblemInstance::Tabletop(p), Solution::State(id)) => wrap(p.neighbors(id)?, Solution::State, Move::Step),
            _ => return mismatch(self.kind(), s),
        })
    }
}

impl<F: Real> TabuProblem for ProblemInstance<F> {
    type Attribute = Attribute;

    fn move_attributes(&self, from: &Solution<F>, mv: &Move) -> Vec<Attribute> {
        match (self, from, mv) {
            (ProblemInstance::Tsp(p), Solution::Permutation(t), Move::TwoOpt(m)) => {
                p.move_attributes(t, m).into_iter().map(Attribute::Edge).collect()
            }
            (ProblemInstance::BinPacking(p), Solution::Assignment(a), Move::Packing(m)) => {
                p.move_attributes(a, m).into_iter().map(Attribute::Placement).collect()
            }
            (ProblemInstance::Tabletop(p), Solution::State(s), Move::Step(m)) => {
                p.move_attributes(s, m).into_iter().map(Attribute::Step).collect()
            }
            _ => Vec::new(),
        }
    }

    fn reverse_attributes(&self, from: &Solution<F>, mv: &Move) -> Vec<Attribute> {
        match (self, from, mv) {
            (ProblemInstance::Tsp(p), Solution::Permutation(t), Move::TwoOpt(m)) => {
                p.reverse_attributes(t, m).into_iter().map(Attribute::Edge).collect()
            }
            (ProblemInstance::BinPacking(p), Solution::Assignment(a), Move::Packing(m)) => {
                p.reverse_attributes(a, m).into_iter().map(Attribute::Placement).collect()
            }
            (ProblemInstance::Tabletop(p), Solution::State(s), Move::Step(m)) => {
                p.reverse_attributes(s, m).into_iter().map(Attribute::Step).collect()
            }
            _ => Vec::new(),
        }
    }

    fn elite_overlap(&self, candidate: &Solution<F>, attributes: &[Attribute], elite: &[Solution<F>]) -> f64 {
        match (self, candidate) {
            (ProblemInstance::Tsp(p), Solution::Permutation(c)) => {
                let attrs: Vec<Edge> = attributes
                    .iter()
                    .filter_map(|a| match a {
                        Attribute::Edge(e) => Some(*e),
                        _ => None,
                    })
                    .collect();
                let elite: Vec<Vec<usize>> = elite
                    .iter()
                    .filter_map(|e| match e {
                        Solution::Permutation(t) => Some(t.clone()),
                        _ => None,
                    })
                    .collect();
                p.elite_overlap(c, &attrs, &elite)
            }
            (ProblemInstance::BinPacking(p), Solution::Assignment(c)) => {
                let attrs: Vec<Placement> = attributes
                    .iter()
                    .filter_map(|a| match a {
                        Attribute::Placement(pl) => Some(*pl),
                        _ => None,
                    })
                    .collect();
                let elite: Vec<Vec<usize>> = elite
                    .iter()
                    .filter_map(|e| match e {
                        Solution::Assignment(a) => Some(a.clone()),
                        _ => None,
                    })
                    .collect();
                p.elite_overlap(c, &attrs, &elite)
            }
            (ProblemInstance::Tabletop(p), Solution::State(c)) => {
                let elite: Vec<usize> = elite
                    .iter()
                    .filter_map(|e| match e {
                        Solution::State(s) => Some(*s),
                        _ => None,
                    })
                    .collect();
                p.elite_overlap(c, &[], &elite)
            }
            _ => 0.0,
        }
    }
}

/// Evaluates a kind-tagged solution against a kind-tagged instance.
pub fn evaluate<F: Real>(instance: &ProblemInstance<F>, s: &Solution<F>) -> Result<F> {
    instance.objective(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::LandscapeKind;

    #[test]
    fn evaluate_examples() {
        let tsp = ProblemInstance::Tsp(TspInstance::from_matrix(vec![vec![0.0, 5.0], vec![5.0, 0.0]]).unwrap());
        assert_eq!(evaluate(&tsp, &Solution::Permutation(vec![0, 1])).unwrap(), 10.0);

        let cube = ProblemInstance::Tabletop(TabletopInstance::<f64>::cube());
        assert_eq!(evaluate(&cube, &Solution::State(1)).unwrap(), 10.0);

        let land = ProblemInstance::Continuous(ContinuousLandscape::<f64>::new(LandscapeKind::AbsLinear, 1).unwrap());
        assert_eq!(evaluate(&land, &Solution::Vector(vec![-1.0])).unwrap(), 0.0);
    }

    #[test]
    fn encoding_mismatch_is_contract_violation() {
        let cube = ProblemInstance::Tabletop(TabletopInstance::<f64>::cube());
        assert!(matches!(evaluate(&cube, &Solution::Permutation(vec![0, 1])), Err(Error::ContractViolation(_))));
    }

    #[test]
    fn duplicate_city_is_validation_error() {
        let tsp = ProblemInstance::Tsp(
            TspInstance::from_matrix(vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]]).unwrap(),
        );
        assert!(matches!(evaluate(&tsp, &Solution::Permutation(vec![0, 0, 1])), Err(Error::Validation(_))));
    }
}
