//! Symmetric (or flagged asymmetric) travelling salesman instances and the
//! 2-opt neighborhood.

use serde::Serialize;

use crate::error::{validation, Error, Result};
use crate::problem::{Problem, TabuProblem};
use crate::rng::{Draw, RngStream};
use crate::scalar::Real;

/// City order; position `k` holds the city visited `k`-th.
pub type Tour = Vec<usize>;

/// Rounding applied to Euclidean distances built from coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rounding {
    /// Full floating point precision.
    #[default]
    Exact,
    /// TSPLIB `nint`: round half away from zero.
    Nearest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TspInstance<F> {
    n: usize,
    coords: Option<Vec<(F, F)>>,
    dist: Vec<F>,
    symmetric: bool,
}

impl<F: Real> TspInstance<F> {
    /// Builds an instance from an explicit distance matrix.
    pub fn from_matrix(matrix: Vec<Vec<F>>) -> Result<Self> {
        let n = matrix.len();
        if n < 2 {
            return validation("a TSP instance needs at least 2 cities");
        }
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return validation(format!("distance matrix row {i} has {} entries, expected {n}", row.len()));
            }
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < F::zero() {
                    return validation(format!("distance d[{i}][{j}] = {d} is not a non-negative number"));
                }
                if i == j && d != F::zero() {
                    return validation(format!("diagonal entry d[{i}][{i}] = {d} must be zero"));
                }
            }
            dist.extend_from_slice(row);
        }
        let symmetric = (0..n).all(|i| (0..i).all(|j| dist[i * n + j] == dist[j * n + i]));
        Ok(Self { n, coords: None, dist, symmetric })
    }

    /// Euclidean instance from 2-D points.
    pub fn from_coords(coords: Vec<(F, F)>, rounding: Rounding) -> Result<Self> {
        let n = coords.len();
        if n < 2 {
            return validation("a TSP instance needs at least 2 cities");
        }
        if coords.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return validation("coordinates must be finite");
        }
        let mut dist = vec![F::zero(); n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let (dx, dy) = (coords[i].0 - coords[j].0, coords[i].1 - coords[j].1);
                let mut d = (dx * dx + dy * dy).sqrt();
                if rounding == Rounding::Nearest {
                    d = d.round();
                }
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Ok(Self { n, coords: Some(coords), dist, symmetric: true })
    }

    /// Cities uniformly placed in the square `[0, side)²`.
    pub fn random_uniform(n: usize, side: F, rng: &mut RngStream) -> Result<Self> {
        let coords = (0..n)
            .map(|_| {
                let x = F::lit(rng.unit()) * side;
                let y = F::lit(rng.unit()) * side;
                (x, y)
            })
            .collect();
        Self::from_coords(coords, Rounding::Exact)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn coords(&self) -> Option<&[(F, F)]> {
        self.coords.as_deref()
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> F {
        self.dist[i * self.n + j]
    }

    /// Mean distance over ordered pairs of distinct cities.
    pub fn mean_edge(&self) -> F {
        let n = self.n;
        let total: F = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.dist(i, j))
            .sum();
        total / F::from_count(n * (n - 1))
    }

    pub fn validate_tour(&self, tour: &[usize]) -> Result<()> {
        if tour.len() != self.n {
            return validation(format!("tour has {} cities, instance has {}", tour.len(), self.n));
        }
        let mut seen = vec![false; self.n];
        for &c in tour {
            if c >= self.n {
                return validation(format!("city {c} out of range 0..{}", self.n));
            }
            if std::mem::replace(&mut seen[c], true) {
                return validation(format!("city {c} appears twice in tour"));
            }
        }
        Ok(())
    }

    /// Closed tour length: consecutive edges plus the edge back to the start.
    pub fn tour_length(&self, tour: &[usize]) -> Result<F> {
        self.validate_tour(tour)?;
        Ok(self.tour_length_unchecked(tour))
    }

    pub(crate) fn tour_length_unchecked(&self, tour: &[usize]) -> F {
        let n = tour.len();
        (0..n).map(|k| self.dist(tour[k], tour[(k + 1) % n])).sum()
    }

    /// Index pairs `(i, j)` making up the 2-opt neighborhood. Reversing the
    /// whole tour leaves the cycle unchanged, so `(0, n-1)` is omitted.
    /// Two cities admit a single tour; their only move is the identity `(0, 0)`.
    pub fn two_opt_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        if n == 2 {
            return vec![(0, 0)];
        }
        let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                if !(i == 0 && j == n - 1) {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    /// Edges removed and added by reversing positions `i..=j`, as
    /// `(removed, added)` unordered city pairs.
    fn two_opt_edges(&self, tour: &[usize], i: usize, j: usize) -> ([Edge; 2], [Edge; 2]) {
        let n = tour.len();
        let prev = tour[(i + n - 1) % n];
        let next = tour[(j + 1) % n];
        let removed = [Edge::new(prev, tour[i]), Edge::new(tour[j], next)];
        let added = [Edge::new(prev, tour[j]), Edge::new(tour[i], next)];
        (removed, added)
    }

    /// Exhaustive optimum over all (n-1)!/2 distinct tours.
    ///
    /// City 0 is fixed first and mirror images are skipped by requiring the
    /// second city to be smaller than the last.
    pub fn exhaustive_optimum(&self) -> Result<(F, Tour)> {
        if self.n > 12 {
            return validation(format!("exhaustive enumeration limited to 12 cities, got {}", self.n));
        }
        let n = self.n;
        let mut rest: Vec<usize> = (1..n).collect();
        let mut best: Option<(F, Tour)> = None;
        loop {
            let mirrored = self.symmetric && n > 2 && rest[0] > rest[n - 2];
            if !mirrored {
                let mut tour = Vec::with_capacity(n);
                tour.push(0);
                tour.extend_from_slice(&rest);
                let len = self.tour_length_unchecked(&tour);
                if best.as_ref().map_or(true, |(b, _)| len < *b) {
                    best = Some((len, tour));
                }
            }
            if !next_permutation(&mut rest) {
                break;
            }
        }
        best.ok_or_else(|| Error::Validation("empty instance".into()))
    }
}

/// Lexicographic successor; returns `false` after the last permutation.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Reverses the closed segment of positions `i..=j`.
pub fn two_opt(tour: &[usize], i: usize, j: usize) -> Result<Tour> {
    let mut out = tour.to_vec();
    two_opt_in_place(&mut out, i, j)?;
    Ok(out)
}

pub fn two_opt_in_place(tour: &mut [usize], i: usize, j: usize) -> Result<()> {
    if i > j || j >= tour.len() {
        return validation(format!("2-opt indices ({i}, {j}) invalid for tour of {} cities", tour.len()));
    }
    tour[i..=j].reverse();
    Ok(())
}

/// Unordered city pair, stored with the smaller index first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Edge(pub usize, pub usize);

impl Edge {
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }
}

/// Whether `tour` (as a cycle) uses the edge.
pub fn tour_has_edge(tour: &[usize], e: Edge) -> bool {
    let n = tour.len();
    (0..n).any(|k| Edge::new(tour[k], tour[(k + 1) % n]) == e)
}

/// Segment reversal of positions `i..=j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TwoOptMove {
    pub i: usize,
    pub j: usize,
}

impl<F: Real> Problem for TspInstance<F> {
    type Scalar = F;
    type Solution = Tour;
    type Move = TwoOptMove;

    fn kind(&self) -> &'static str {
        "tsp"
    }

    fn validate(&self, s: &Tour) -> Result<()> {
        self.validate_tour(s)
    }

    fn objective(&self, s: &Tour) -> Result<F> {
        self.tour_length(s)
    }

    fn random_solution(&self, rng: &mut RngStream) -> Tour {
        let mut tour: Tour = (0..self.n).collect();
        rng.shuffle(&mut tour);
        tour
    }

    fn sample_neighbor(&self, s: &Tour, rng: &mut RngStream) -> Result<(Tour, TwoOptMove)> {
        self.validate_tour(s)?;
        let pairs = self.two_opt_pairs();
        let (i, j) = pairs[rng.index(pairs.len())];
        Ok((two_opt(s, i, j)?, TwoOptMove { i, j }))
    }

    fn neighbors(&self, s: &Tour) -> Result<Vec<(Tour, TwoOptMove)>> {
        self.validate_tour(s)?;
        self.two_opt_pairs().into_iter().map(|(i, j)| Ok((two_opt(s, i, j)?, TwoOptMove { i, j }))).collect()
    }
}

impl<F: Real> TabuProblem for TspInstance<F> {
    type Attribute = Edge;

    fn move_attributes(&self, from: &Tour, mv: &TwoOptMove) -> Vec<Edge> {
        let (_, added) = self.two_opt_edges(from, mv.i, mv.j);
        dedup_edges(added)
    }

    fn reverse_attributes(&self, from: &Tour, mv: &TwoOptMove) -> Vec<Edge> {
        let (removed, _) = self.two_opt_edges(from, mv.i, mv.j);
        dedup_edges(removed)
    }

    fn elite_overlap(&self, _candidate: &Tour, attributes: &[Edge], elite: &[Tour]) -> f64 {
        if attributes.is_empty() || elite.is_empty() {
            return 0.0;
        }
        let hits: usize = attributes.iter().map(|&e| elite.iter().filter(|t| tour_has_edge(t, e)).count()).sum();
        hits as f64 / (attributes.len() * elite.len()) as f64
    }
}

fn dedup_edges(edges: [Edge; 2]) -> Vec<Edge> {
    if edges[0] == edges[1] {
        vec![edges[0]]
    } else {
        edges.to_vec()
    }
}
