//! Discrete measures, functions on the space, and weighted `L^p` norms.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{Ball, MetricSpace};

/// Nonnegative point masses on `0..len()`. Zero-weight points stay in the
/// space as geometry but are outside the support.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    weights: Vec<f64>,
    total: f64,
}

impl DiscreteMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::InvalidInput(format!(
                "weight {i} is {w}; weights must be finite and >= 0"
            )));
        }
        if !weights.iter().any(|&w| w > 0.0) {
            return Err(Error::EmptySupport);
        }
        let total = weights.iter().sum();
        Ok(DiscreteMeasure { weights, total })
    }

    /// Uniform probability measure on `n` points.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn in_support(&self, i: usize) -> bool {
        self.weights[i] > 0.0
    }

    /// Sorted ids of the positive-weight points.
    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&i| self.weights[i] > 0.0)
            .collect()
    }

    /// Mass of a sorted point set, summed in ascending id order.
    pub fn mass_of(&self, members: &[usize]) -> f64 {
        members.iter().map(|&i| self.weights[i]).sum()
    }

    pub(crate) fn check_space(&self, space: &MetricSpace) -> Result<()> {
        if self.weights.len() != space.len() {
            return Err(Error::InvalidInput(format!(
                "measure has {} weights but the space has {} points",
                self.weights.len(),
                space.len()
            )));
        }
        Ok(())
    }
}

/// Real values indexed by point id.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionOnSpace {
    values: Vec<f64>,
}

impl FunctionOnSpace {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("function value {i} is {v}")));
        }
        Ok(FunctionOnSpace { values })
    }

    pub(crate) fn from_finite(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        FunctionOnSpace { values }
    }

    pub fn zeros(n: usize) -> Self {
        FunctionOnSpace {
            values: vec![0.0; n],
        }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        FunctionOnSpace { values: vec![c; n] }
    }

    /// `scale` at point `i`, zero elsewhere.
    pub fn indicator(n: usize, i: usize, scale: f64) -> Self {
        let mut values = vec![0.0; n];
        values[i] = scale;
        FunctionOnSpace { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn abs(&self) -> Self {
        FunctionOnSpace {
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        FunctionOnSpace {
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn sub(&self, other: &FunctionOnSpace) -> Self {
        FunctionOnSpace {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// `mu(B)`: sum of the weights of the ball's members in ascending id order.
pub fn mu_ball(measure: &DiscreteMeasure, ball: &Ball) -> f64 {
    measure.mass_of(&ball.members)
}

/// Weighted `L^p` norm; `p = f64::INFINITY` gives the sup over the support.
pub fn lp_norm(measure: &DiscreteMeasure, f: &FunctionOnSpace, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidP(p));
    }
    if f.len() != measure.len() {
        return Err(Error::InvalidInput(format!(
            "function has {} values but the measure has {} points",
            f.len(),
            measure.len()
        )));
    }
    let pairs = f
        .values
        .iter()
        .zip(&measure.weights)
        .filter(|(_, &w)| w > 0.0);
    let norm = if p.is_infinite() {
        pairs.map(|(v, _)| v.abs()).fold(0.0, f64::max)
    } else if p == 1.0 {
        pairs.map(|(v, w)| v.abs() * w).sum()
    } else if p == 2.0 {
        pairs.map(|(v, w)| v * v * w).sum::<f64>().sqrt()
    } else {
        pairs
            .map(|(v, w)| v.abs().powf(p) * w)
            .sum::<f64>()
            .powf(p.recip())
    };
    Ok(norm)
}

/// Zeroes `f` off the support of `measure`.
pub fn restrict_to_support(measure: &DiscreteMeasure, f: &FunctionOnSpace) -> FunctionOnSpace {
    FunctionOnSpace {
        values: f
            .values
            .iter()
            .zip(&measure.weights)
            .map(|(&v, &w)| if w > 0.0 { v } else { 0.0 })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{build_space, BallKind, Geometry, Norm};
    use proptest::prelude::*;

    fn line3() -> MetricSpace {
        build_space(Geometry::Coordinates {
            points: vec![vec![0.0], vec![1.0], vec![2.0]],
            norm: Norm::L2,
        })
        .unwrap()
    }

    #[test]
    fn ball_masses_on_a_line() {
        let s = line3();
        let m = DiscreteMeasure::new(vec![1.0; 3]).unwrap();
        assert_eq!(mu_ball(&m, &s.ball(1, 1.0, BallKind::Closed)), 3.0);
        assert_eq!(mu_ball(&m, &s.ball(0, 1.0, BallKind::Closed)), 2.0);
    }

    #[test]
    fn rejects_invalid_weights() {
        assert!(matches!(
            DiscreteMeasure::new(vec![0.0, 0.0]),
            Err(Error::EmptySupport)
        ));
        assert!(DiscreteMeasure::new(vec![1.0, -0.5]).is_err());
        assert!(DiscreteMeasure::new(vec![f64::NAN]).is_err());
        assert!(FunctionOnSpace::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn norms() {
        let prob = DiscreteMeasure::uniform(4).unwrap();
        let one = FunctionOnSpace::constant(4, 1.0);
        for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            assert!((lp_norm(&prob, &one, p).unwrap() - 1.0).abs() < 1e-15);
        }
        let unit = DiscreteMeasure::new(vec![1.0, 1.0]).unwrap();
        let f = FunctionOnSpace::new(vec![3.0, 4.0]).unwrap();
        assert_eq!(lp_norm(&unit, &f, 2.0).unwrap(), 5.0);
        assert!(matches!(lp_norm(&unit, &f, 0.5), Err(Error::InvalidP(_))));
    }

    #[test]
    fn sup_norm_ignores_null_points() {
        let m = DiscreteMeasure::new(vec![1.0, 0.0]).unwrap();
        let f = FunctionOnSpace::new(vec![-2.0, 100.0]).unwrap();
        assert_eq!(lp_norm(&m, &f, f64::INFINITY).unwrap(), 2.0);
        assert_eq!(lp_norm(&m, &f, 1.0).unwrap(), 2.0);
    }

    #[test]
    fn restriction() {
        let m = DiscreteMeasure::new(vec![1.0, 0.0, 1.0]).unwrap();
        let f = FunctionOnSpace::new(vec![5.0, 7.0, 9.0]).unwrap();
        assert_eq!(restrict_to_support(&m, &f).values(), &[5.0, 0.0, 9.0]);
        let full = DiscreteMeasure::new(vec![1.0; 3]).unwrap();
        assert_eq!(restrict_to_support(&full, &f), f);
        let z = FunctionOnSpace::zeros(3);
        assert_eq!(restrict_to_support(&m, &z), z);
    }

    fn weights_and_values() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..30).prop_flat_map(|n| {
            (
                prop::collection::vec(0.01f64..10.0, n),
                prop::collection::vec(-100.0f64..100.0, n),
            )
        })
    }

    proptest! {
        #[test]
        fn norm_is_absolutely_homogeneous((w, v) in weights_and_values(), c in -50.0f64..50.0, p in 1.0f64..6.0) {
            let m = DiscreteMeasure::new(w).unwrap();
            let f = FunctionOnSpace::new(v).unwrap();
            let lhs = lp_norm(&m, &f.scaled(c), p).unwrap();
            let rhs = c.abs() * lp_norm(&m, &f, p).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn norm_is_monotone_in_p_for_probabilities((w, v) in weights_and_values(), p1 in 1.0f64..8.0, dp in 0.0f64..8.0) {
            let total: f64 = w.iter().sum();
            let m = DiscreteMeasure::new(w.iter().map(|x| x / total).collect()).unwrap();
            let f = FunctionOnSpace::new(v).unwrap();
            let a = lp_norm(&m, &f, p1).unwrap();
            let b = lp_norm(&m, &f, p1 + dp).unwrap();
            let sup = lp_norm(&m, &f, f64::INFINITY).unwrap();
            prop_assert!(a <= b * (1.0 + 1e-12));
            prop_assert!(b <= sup * (1.0 + 1e-12));
        }

        #[test]
        fn ball_mass_grows_with_radius(
            pts in prop::collection::btree_set(-20i32..20, 2..20),
            r in 0.1f64..5.0,
            dr in 0.0f64..3.0,
        ) {
            let pts: Vec<i32> = pts.into_iter().collect();
            let s = build_space(Geometry::Coordinates {
                points: pts.iter().map(|&x| vec![x as f64]).collect(),
                norm: Norm::L1,
            }).unwrap();
            let m = DiscreteMeasure::new((0..pts.len()).map(|i| 1.0 + i as f64).collect()).unwrap();
            for kind in BallKind::BOTH {
                let small = mu_ball(&m, &s.ball(0, r, kind));
                let big = mu_ball(&m, &s.ball(0, r + dr, kind));
                prop_assert!(small <= big);
            }
        }
    }
}
