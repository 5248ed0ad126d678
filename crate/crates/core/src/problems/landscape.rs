//! Continuous benchmark landscapes on a bounded box.
//!
//! * `AbsLinear`: `Σ |x_i + 1|`, the minimization form of the `x + 1 = 0`
//!   fitness peak; minimum 0 at `x = (-1, ..., -1)`. In one dimension this
//!   is `|x + 1|`.
//! * `Rastrigin`: `10 d + Σ (x_i² − 10 cos(2π x_i))`, the fixed multimodal
//!   test function; global minimum 0 at the origin, with a local minimum
//!   near every integer lattice point.

use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::problem::Problem;
use crate::rng::{Draw, RngStream};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LandscapeKind {
    AbsLinear,
    Rastrigin,
}

impl LandscapeKind {
    pub fn default_bounds(self) -> (f64, f64) {
        match self {
            LandscapeKind::AbsLinear => (-5.0, 5.0),
            LandscapeKind::Rastrigin => (-5.12, 5.12),
        }
    }

    /// Known global minimizer in `dimension` dimensions.
    pub fn minimizer(self, dimension: usize) -> Vec<f64> {
        match self {
            LandscapeKind::AbsLinear => vec![-1.0; dimension],
            LandscapeKind::Rastrigin => vec![0.0; dimension],
        }
    }
}

/// Objective value, and whether the point had to be clamped into bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandscapeValue<F> {
    pub value: F,
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousLandscape<F> {
    kind: LandscapeKind,
    bounds: Vec<(F, F)>,
    radius: Vec<F>,
}

impl<F: Real> ContinuousLandscape<F> {
    /// Landscape on the kind's default box. The neighbor radius defaults to
    /// 5% of each variable's range.
    pub fn new(kind: LandscapeKind, dimension: usize) -> Result<Self> {
        let (lo, hi) = kind.default_bounds();
        Self::with_bounds(kind, vec![(F::lit(lo), F::lit(hi)); dimension])
    }

    pub fn with_bounds(kind: LandscapeKind, bounds: Vec<(F, F)>) -> Result<Self> {
        if bounds.is_empty() {
            return validation("landscape dimension must be at least 1");
        }
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return validation(format!("bounds of variable {i} must satisfy lo < hi"));
            }
        }
        let radius = bounds.iter().map(|&(lo, hi)| (hi - lo) * F::lit(0.05)).collect();
        Ok(Self { kind, bounds, radius })
    }

    /// Sets the same neighbor radius δ on every dimension.
    pub fn with_radius(mut self, delta: F) -> Result<Self> {
        if !(delta > F::zero()) {
            return validation("neighbor radius must be positive");
        }
        self.radius = vec![delta; self.bounds.len()];
        Ok(self)
    }

    pub fn landscape_kind(&self) -> LandscapeKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(F, F)] {
        &self.bounds
    }

    pub fn radius(&self) -> &[F] {
        &self.radius
    }

    /// Clamps `x` into the box in place; returns whether anything moved.
    pub fn clamp(&self, x: &mut [F]) -> bool {
        let mut moved = false;
        for (xi, &(lo, hi)) in x.iter_mut().zip(&self.bounds) {
            let c = xi.max(lo).min(hi);
            if c != *xi {
                *xi = c;
                moved = true;
            }
        }
        moved
    }

    /// Objective at `x`; points outside the box are clamped and flagged.
    pub fn landscape_value(&self, x: &[F]) -> Result<LandscapeValue<F>> {
        if x.len() != self.dimension() {
            return validation(format!("point has {} coordinates, landscape has {}", x.len(), self.dimension()));
        }
        if x.iter().any(|v| v.is_nan()) {
            return validation("point has a NaN coordinate");
        }
        let mut p = x.to_vec();
        let clamped = self.clamp(&mut p);
        let value = match self.kind {
            LandscapeKind::AbsLinear => p.iter().map(|&v| (v + F::one()).abs()).sum(),
            LandscapeKind::Rastrigin => {
                let ten = F::lit(10.0);
                let two_pi = F::lit(2.0) * F::PI();
                ten * F::from_count(p.len()) + p.iter().map(|&v| v * v - ten * (two_pi * v).cos()).sum::<F>()
            }
        };
        Ok(LandscapeValue { value, clamped })
    }
}

/// Uniform perturbation within the radius on every dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Perturbation;

impl<F: Real> Problem for ContinuousLandscape<F> {
    type Scalar = F;
    type Solution = Vec<F>;
    type Move = Perturbation;

    fn kind(&self) -> &'static str {
        "continuous"
    }

    fn validate(&self, s: &Vec<F>) -> Result<()> {
        if s.len() != self.dimension() {
            return validation(format!("point has {} coordinates, landscape has {}", s.len(), self.dimension()));
        }
        Ok(())
    }

    fn objective(&self, s: &Vec<F>) -> Result<F> {
        self.landscape_value(s).map(|v| v.value)
    }

    fn random_solution(&self, rng: &mut RngStream) -> Vec<F> {
        self.bounds.iter().map(|&(lo, hi)| lo + (hi - lo) * F::lit(rng.unit())).collect()
    }

    fn sample_neighbor(&self, s: &Vec<F>, rng: &mut RngStream) -> Result<(Vec<F>, Perturbation)> {
        self.validate(s)?;
        let mut x: Vec<F> = s.iter().zip(&self.radius).map(|(&v, &r)| v + r * F::lit(rng.uniform(-1.0, 1.0))).collect();
        self.clamp(&mut x);
        Ok((x, Perturbation))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn abs_linear_values() {
        let l = ContinuousLandscape::<f64>::new(LandscapeKind::AbsLinear, 1).unwrap();
        assert_eq!(l.landscape_value(&[-1.0]).unwrap().value, 0.0);
        assert_eq!(l.landscape_value(&[0.0]).unwrap().value, 1.0);
    }

    #[test]
    fn rastrigin_minimum_at_origin() {
        let l = ContinuousLandscape::<f64>::new(LandscapeKind::Rastrigin, 3).unwrap();
        assert!(l.landscape_value(&[0.0; 3]).unwrap().value.abs() < 1e-12);
        // Local minimum near (1, 0, 0) is strictly worse.
        assert!(l.landscape_value(&[1.0, 0.0, 0.0]).unwrap().value > 0.9);
    }

    #[test]
    fn out_of_bounds_is_clamped_and_flagged() {
        let l = ContinuousLandscape::<f64>::new(LandscapeKind::AbsLinear, 1).unwrap();
        let v = l.landscape_value(&[9.0]).unwrap();
        assert!(v.clamped);
        assert_eq!(v.value, 6.0);
        assert!(!l.landscape_value(&[1.0]).unwrap().clamped);
    }

    #[test]
    fn neighbor_within_radius() {
        let l = ContinuousLandscape::<f64>::new(LandscapeKind::AbsLinear, 1).unwrap().with_radius(0.5).unwrap();
        let mut rng = RngStream::new(3);
        for _ in 0..1000 {
            let (x, _) = l.sample_neighbor(&vec![0.0], &mut rng).unwrap();
            assert!((-0.5..=0.5).contains(&x[0]));
        }
    }

    #[test]
    fn default_radius_is_five_percent_of_range() {
        let l = ContinuousLandscape::<f64>::new(LandscapeKind::AbsLinear, 2).unwrap();
        assert_eq!(l.radius(), &[0.5, 0.5]);
    }

    #[test]
    fn not_enumerable() {
        let l = ContinuousLandscape::<f64>::new(LandscapeKind::AbsLinear, 1).unwrap();
        assert!(matches!(l.neighbors(&vec![0.0]), Err(Error::Unsupported(_))));
    }
}
