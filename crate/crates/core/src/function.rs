//! Grid functions: elements of `C(Y)` sampled on a net.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt::Debug;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::map::NetMap;
use crate::space::{same_space, NetPoint, NetSpace, PointIndex};

/// Real or complex values; defects are measured with [`Scalar::modulus`].
pub trait Scalar:
    Copy + Debug + PartialEq + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn modulus(self) -> f64 {
        libm::fabs(self)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn modulus(self) -> f64 {
        libm::hypot(self.re, self.im)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<S = f64> {
    space: Arc<NetSpace>,
    values: Vec<S>,
    lipschitz_estimate: f64,
}

impl<S: Scalar> GridFunction<S> {
    /// Takes ownership of the values and computes the Lipschitz estimate over
    /// all point pairs.
    pub fn from_values(space: Arc<NetSpace>, values: Vec<S>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::FunctionLength { expected: space.len(), got: values.len() });
        }
        let lipschitz_estimate = lipschitz_of(&space, &values);
        Ok(Self { space, values, lipschitz_estimate })
    }

    /// For functions whose Lipschitz constant is known analytically.
    pub fn with_lipschitz(space: Arc<NetSpace>, values: Vec<S>, lipschitz: f64) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::FunctionLength { expected: space.len(), got: values.len() });
        }
        Ok(Self { space, values, lipschitz_estimate: lipschitz })
    }

    pub fn from_fn(space: Arc<NetSpace>, f: impl Fn(&NetPoint) -> S) -> Self {
        let values: Vec<S> = space.points().iter().map(f).collect();
        let lipschitz_estimate = lipschitz_of(&space, &values);
        Self { space, values, lipschitz_estimate }
    }

    pub fn constant(space: Arc<NetSpace>, value: S) -> Self {
        let values = alloc::vec![value; space.len()];
        Self { space, values, lipschitz_estimate: 0.0 }
    }

    /// Indicator of a single point.
    pub fn indicator(space: Arc<NetSpace>, at: PointIndex) -> Self {
        let values = (0..space.len()).map(|i| if i == at { S::one() } else { S::zero() }).collect::<Vec<_>>();
        Self::from_values(space, values).expect("length matches")
    }

    pub fn space(&self) -> &Arc<NetSpace> {
        &self.space
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn value(&self, i: PointIndex) -> S {
        self.values[i]
    }

    pub fn lipschitz_estimate(&self) -> f64 {
        self.lipschitz_estimate
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }

    /// Pointwise product.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| a * b).collect();
        Ok(Self {
            space: self.space.clone(),
            values,
            lipschitz_estimate: self.lipschitz_estimate * other.sup_norm() + other.lipschitz_estimate * self.sup_norm(),
        })
    }

    /// `f ∘ j` for `f` on the codomain of `j`.
    pub fn pull_back(&self, j: &NetMap) -> Result<Self> {
        if !same_space(&self.space, j.codomain()) {
            return Err(Error::SpaceMismatch);
        }
        let values = (0..j.domain().len()).map(|y| self.values[j.apply(y)]).collect();
        Ok(Self {
            space: j.domain().clone(),
            values,
            lipschitz_estimate: self.lipschitz_estimate * j.lipschitz_estimate(),
        })
    }
}

fn lipschitz_of<S: Scalar>(space: &NetSpace, values: &[S]) -> f64 {
    let mut best: f64 = 0.0;
    for a in 0..values.len() {
        for b in a + 1..values.len() {
            let num = (values[a] - values[b]).modulus();
            if num == 0.0 {
                continue;
            }
            let d = space.distance(a, b);
            best = best.max(if d > 0.0 { num / d } else { f64::INFINITY });
        }
    }
    best
}

/// 1-Lipschitz bumps `z ↦ max(0, r − d(z, c))`, one per net point `c`.
pub fn bump_family(space: &Arc<NetSpace>, radius: f64) -> Vec<GridFunction<f64>> {
    (0..space.len())
        .map(|c| {
            let values = (0..space.len()).map(|z| (radius - space.distance(z, c)).max(0.0)).collect();
            GridFunction::with_lipschitz(space.clone(), values, 1.0).expect("length matches")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lipschitz_of_coordinate() {
        let s = Arc::new(NetSpace::interval(0.0, 2.0, 0.5).unwrap());
        let g = GridFunction::from_fn(s.clone(), |p| 3.0 * p.coords.as_real().unwrap()[0]);
        assert!(libm::fabs(g.lipschitz_estimate() - 3.0) < 1e-12);
        assert_eq!(g.sup_norm(), 6.0);
    }

    #[test]
    fn complex_modulus() {
        assert_eq!(Complex64::new(3.0, 4.0).modulus(), 5.0);
    }

    #[test]
    fn bumps_separate_points() {
        let s = Arc::new(NetSpace::interval(0.0, 1.0, 0.25).unwrap());
        let family = bump_family(&s, 0.25);
        assert_eq!(family.len(), 5);
        assert_eq!(family[2].values(), &[0.0, 0.0, 0.25, 0.0, 0.0]);
    }
}
