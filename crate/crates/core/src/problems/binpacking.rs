//! One-dimensional bin packing with unit-capacity bins.
//!
//! Solutions are item→bin assignments over bin indices `0..n`. Overfull
//! bins are allowed during search and priced by a penalty on the overflow,
//! so every optimizer can move through infeasible packings.

use serde::Serialize;

use crate::error::{validation, Error, Result};
use crate::problem::{Problem, TabuProblem};
use crate::rng::{Draw, RngStream};
use crate::scalar::Real;

/// `assignment[item] = bin`.
pub type Assignment = Vec<usize>;

#[derive(Debug, Clone, PartialEq)]
pub struct BinPackingInstance<F> {
    sizes: Vec<F>,
    penalty: F,
}

impl<F: Real> BinPackingInstance<F> {
    /// Unit-capacity instance. The overflow penalty defaults to `10 n`.
    pub fn new(sizes: Vec<F>) -> Result<Self> {
        if sizes.is_empty() {
            return validation("bin packing needs at least one item");
        }
        for (i, &s) in sizes.iter().enumerate() {
            if !(s > F::zero() && s <= F::one()) {
                return validation(format!("item {i} has size {s}, expected 0 < size <= 1"));
            }
        }
        let penalty = F::lit(10.0) * F::from_count(sizes.len());
        Ok(Self { sizes, penalty })
    }

    pub fn with_penalty(mut self, penalty: F) -> Result<Self> {
        if !(penalty > F::zero()) || !penalty.is_finite() {
            return validation("overflow penalty must be positive and finite");
        }
        self.penalty = penalty;
        Ok(self)
    }

    pub fn sizes(&self) -> &[F] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn penalty(&self) -> F {
        self.penalty
    }

    pub fn validate_assignment(&self, a: &[usize]) -> Result<()> {
        let n = self.sizes.len();
        if a.len() != n {
            return validation(format!("assignment covers {} items, instance has {n}", a.len()));
        }
        if let Some((item, &bin)) = a.iter().enumerate().find(|(_, &b)| b >= n) {
            return validation(format!("item {item} assigned to bin {bin}, bins are 0..{n}"));
        }
        Ok(())
    }

    /// Load of every bin index `0..n`.
    pub fn loads(&self, a: &[usize]) -> Vec<F> {
        let mut loads = vec![F::zero(); self.sizes.len()];
        for (item, &bin) in a.iter().enumerate() {
            loads[bin] = loads[bin] + self.sizes[item];
        }
        loads
    }

    /// Non-empty bins plus `penalty * Σ max(0, load - 1)`.
    pub fn packing_cost(&self, a: &[usize]) -> Result<F> {
        self.validate_assignment(a)?;
        let mut count = vec![0usize; self.sizes.len()];
        for &bin in a {
            count[bin] += 1;
        }
        let used = count.iter().filter(|&&c| c > 0).count();
        let overflow: F = self.loads(a).into_iter().map(|l| (l - F::one()).max(F::zero())).sum();
        Ok(F::from_count(used) + self.penalty * overflow)
    }

    pub fn bins_used(&self, a: &[usize]) -> usize {
        let mut used = vec![false; self.sizes.len()];
        a.iter().for_each(|&b| used[b] = true);
        used.into_iter().filter(|&u| u).count()
    }

    pub fn is_feasible(&self, a: &[usize]) -> bool {
        self.loads(a).into_iter().all(|l| l <= F::one())
    }

    /// ⌈Σ sizes⌉, the volume lower bound on the bin count.
    pub fn volume_bound(&self) -> usize {
        let total: F = self.sizes.iter().copied().sum();
        total.ceil().to_usize().unwrap_or(0).max(1)
    }

    /// First fit decreasing: items by non-increasing size, each into the
    /// lowest-indexed bin with room. Ties keep the original item order.
    pub fn first_fit_decreasing(&self) -> Assignment {
        let mut order: Vec<usize> = (0..self.sizes.len()).collect();
        order.sort_by(|&a, &b| self.sizes[b].partial_cmp(&self.sizes[a]).unwrap_or(std::cmp::Ordering::Equal));
        let mut loads: Vec<F> = Vec::new();
        let mut assignment = vec![0; self.sizes.len()];
        for item in order {
            let size = self.sizes[item];
            let bin = match loads.iter().position(|&l| l + size <= F::one()) {
                Some(b) => b,
                None => {
                    loads.push(F::zero());
                    loads.len() - 1
                }
            };
            loads[bin] = loads[bin] + size;
            assignment[item] = bin;
        }
        assignment
    }

    /// Minimum feasible bin count by exhaustive branch and bound
    /// (items in decreasing order, each placed in an open bin or a new one).
    pub fn exhaustive_optimum(&self) -> Result<(usize, Assignment)> {
        if self.sizes.len() > 12 {
            return validation(format!("exhaustive enumeration limited to 12 items, got {}", self.sizes.len()));
        }
        let mut order: Vec<usize> = (0..self.sizes.len()).collect();
        order.sort_by(|&a, &b| self.sizes[b].partial_cmp(&self.sizes[a]).unwrap());
        let ffd = self.first_fit_decreasing();
        let mut best = (self.bins_used(&ffd), ffd);
        let mut current = vec![0; self.sizes.len()];
        let mut loads = Vec::new();
        self.branch(&order, 0, &mut loads, &mut current, &mut best);
        Ok(best)
    }

    fn branch(
        &self,
        order: &[usize],
        depth: usize,
        loads: &mut Vec<F>,
        current: &mut Assignment,
        best: &mut (usize, Assignment),
    ) {
        if loads.len() >= best.0 {
            return;
        }
        if depth == order.len() {
            *best = (loads.len(), current.clone());
            return;
        }
        let item = order[depth];
        let size = self.sizes[item];
        for bin in 0..loads.len() {
            if loads[bin] + size <= F::one() {
                loads[bin] = loads[bin] + size;
                current[item] = bin;
                self.branch(order, depth + 1, loads, current, best);
                loads[bin] = loads[bin] - size;
            }
        }
        loads.push(size);
        current[item] = loads.len() - 1;
        self.branch(order, depth + 1, loads, current, best);
        loads.pop();
    }

    /// First bin index with no item, if any.
    fn first_empty_bin(&self, a: &[usize]) -> Option<usize> {
        let mut used = vec![false; self.sizes.len()];
        a.iter().for_each(|&b| used[b] = true);
        used.iter().position(|&u| !u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PackingMove {
    Relocate { item: usize, from: usize, to: usize },
    Swap { a: usize, b: usize },
}

/// `(item, bin)` placement used as the tabu attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Placement {
    pub item: usize,
    pub bin: usize,
}

fn apply(a: &[usize], mv: &PackingMove) -> Assignment {
    let mut out = a.to_vec();
    match *mv {
        PackingMove::Relocate { item, to, .. } => out[item] = to,
        PackingMove::Swap { a: x, b: y } => out.swap(x, y),
    }
    out
}

impl<F: Real> Problem for BinPackingInstance<F> {
    type Scalar = F;
    type Solution = Assignment;
    type Move = PackingMove;

    fn kind(&self) -> &'static str {
        "binpacking"
    }

    fn validate(&self, s: &Assignment) -> Result<()> {
        self.validate_assignment(s)
    }

    fn objective(&self, s: &Assignment) -> Result<F> {
        self.packing_cost(s)
    }

    fn random_solution(&self, rng: &mut RngStream) -> Assignment {
        let n = self.sizes.len();
        (0..n).map(|_| rng.index(n)).collect()
    }

    fn sample_neighbor(&self, s: &Assignment, rng: &mut RngStream) -> Result<(Assignment, PackingMove)> {
        self.validate_assignment(s)?;
        let n = self.sizes.len();
        if n < 2 {
            return Err(Error::NoNeighbor("single-item packing has no other bin".into()));
        }
        let spread = s.iter().any(|&b| b != s[0]);
        if spread && rng.unit() < 0.5 {
            loop {
                let (x, y) = (rng.index(n), rng.index(n));
                if s[x] != s[y] {
                    let mv = PackingMove::Swap { a: x.min(y), b: x.max(y) };
                    return Ok((apply(s, &mv), mv));
                }
            }
        }
        let item = rng.index(n);
        let mut to = rng.index(n - 1);
        if to >= s[item] {
            to += 1;
        }
        let mv = PackingMove::Relocate { item, from: s[item], to };
        Ok((apply(s, &mv), mv))
    }

    /// Relocations into every other occupied bin and into the first empty
    /// bin, then swaps of items sitting in different bins.
    fn neighbors(&self, s: &Assignment) -> Result<Vec<(Assignment, PackingMove)>> {
        self.validate_assignment(s)?;
        let n = self.sizes.len();
        let mut occupied = vec![0usize; n];
        s.iter().for_each(|&b| occupied[b] += 1);
        let empty = self.first_empty_bin(s);
        let mut out = Vec::new();
        for item in 0..n {
            let from = s[item];
            for to in 0..n {
                if to == from {
                    continue;
                }
                let target_ok = occupied[to] > 0 || (Some(to) == empty && occupied[from] > 1);
                if target_ok {
                    let mv = PackingMove::Relocate { item, from, to };
                    out.push((apply(s, &mv), mv));
                }
            }
        }
        for a in 0..n {
            for b in (a + 1)..n {
                if s[a] != s[b] {
                    let mv = PackingMove::Swap { a, b };
                    out.push((apply(s, &mv), mv));
                }
            }
        }
        Ok(out)
    }
}

impl<F: Real> TabuProblem for BinPackingInstance<F> {
    type Attribute = Placement;

    fn move_attributes(&self, from: &Assignment, mv: &PackingMove) -> Vec<Placement> {
        match *mv {
            PackingMove::Relocate { item, to, .. } => vec![Placement { item, bin: to }],
            PackingMove::Swap { a, b } => {
                vec![Placement { item: a, bin: from[b] }, Placement { item: b, bin: from[a] }]
            }
        }
    }

    fn reverse_attributes(&self, from: &Assignment, mv: &PackingMove) -> Vec<Placement> {
        match *mv {
            PackingMove::Relocate { item, from: bin, .. } => vec![Placement { item, bin }],
            PackingMove::Swap { a, b } => {
                vec![Placement { item: a, bin: from[a] }, Placement { item: b, bin: from[b] }]
            }
        }
    }

    fn elite_overlap(&self, _candidate: &Assignment, attributes: &[Placement], elite: &[Assignment]) -> f64 {
        if attributes.is_empty() || elite.is_empty() {
            return 0.0;
        }
        let hits: usize = attributes.iter().map(|p| elite.iter().filter(|e| e[p.item] == p.bin).count()).sum();
        hits as f64 / (attributes.len() * elite.len()) as f64
    }
}
