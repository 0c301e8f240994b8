//! Kernels `x ↦ μ_x` with fiber support and the averaging operators
//! `E(g)(x) = ∫ g dμ_x` they induce.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::function::{GridFunction, Scalar};
use crate::map::{canonical_projection, NetMap};
use crate::measure::{DiscreteMeasure, NORMALIZATION_TOL};
use crate::space::{same_space, Coords, NetSpace, PointIndex, PointSet};
use crate::NET_EPS;

/// One measure on the total space `Y` per point of the base `X`, together
/// with a declared Lipschitz modulus of `x ↦ μ_x` in the bounded-Lipschitz
/// distance. The modulus is a claim; [`Kernel::validate`] checks it.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    map: NetMap,
    measures: Vec<DiscreteMeasure>,
    continuity_modulus: f64,
    normalized: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelCertificate {
    /// Largest distance in `Y` from a supporting atom of `μ_x` to the fiber
    /// over `x`.
    pub fiber_violation: f64,
    /// Largest `|μ_x(Y) − 1|`.
    pub normalization_drift: f64,
    /// Largest `bl(μ_x, μ_x') / d(x, x')` over adjacent base points.
    pub recomputed_modulus: f64,
    pub declared_modulus: f64,
    pub passes: bool,
}

impl Kernel {
    /// A probability kernel. Measures must live on the domain of `map`.
    pub fn new(map: NetMap, measures: Vec<DiscreteMeasure>, declared_modulus: f64) -> Result<Self> {
        Self::build(map, measures, declared_modulus, true)
    }

    /// A kernel of nonnegative measures with no normalization requirement.
    pub fn nonnegative(map: NetMap, measures: Vec<DiscreteMeasure>, declared_modulus: f64) -> Result<Self> {
        Self::build(map, measures, declared_modulus, false)
    }

    fn build(map: NetMap, measures: Vec<DiscreteMeasure>, declared_modulus: f64, normalized: bool) -> Result<Self> {
        if measures.len() != map.codomain().len() {
            return Err(Error::KernelLength { expected: map.codomain().len(), got: measures.len() });
        }
        if measures.iter().any(|m| !same_space(m.space(), map.domain())) {
            return Err(Error::SpaceMismatch);
        }
        if !(declared_modulus >= 0.0) {
            return Err(Error::Parameter {
                name: "declared modulus",
                requirement: "nonnegative",
                value: declared_modulus,
            });
        }
        Ok(Self { map, measures, continuity_modulus: declared_modulus, normalized })
    }

    /// Rebuilds a kernel from an operator by evaluating it on the indicator
    /// of every point of `Y`: `μ_x({y}) = E(1_y)(x)`.
    pub fn from_operator(
        map: NetMap,
        declared_modulus: f64,
        normalized: bool,
        operator: impl Fn(&GridFunction<f64>) -> Result<GridFunction<f64>>,
    ) -> Result<Self> {
        let total = map.domain().clone();
        let mut atoms: Vec<Vec<(PointIndex, f64)>> = alloc::vec![Vec::new(); map.codomain().len()];
        for y in 0..total.len() {
            let column = operator(&GridFunction::indicator(total.clone(), y))?;
            if !same_space(column.space(), map.codomain()) {
                return Err(Error::SpaceMismatch);
            }
            for (x, &w) in column.values().iter().enumerate() {
                if w != 0.0 {
                    atoms[x].push((y, w));
                }
            }
        }
        let measures = atoms.into_iter().map(|a| DiscreteMeasure::new(total.clone(), a)).collect::<Result<Vec<_>>>()?;
        Self::build(map, measures, declared_modulus, normalized)
    }

    pub fn map(&self) -> &NetMap {
        &self.map
    }

    /// The base space `X`.
    pub fn base(&self) -> &Arc<NetSpace> {
        self.map.codomain()
    }

    /// The total space `Y`.
    pub fn total(&self) -> &Arc<NetSpace> {
        self.map.domain()
    }

    pub fn measures(&self) -> &[DiscreteMeasure] {
        &self.measures
    }

    pub fn measure(&self, x: PointIndex) -> &DiscreteMeasure {
        &self.measures[x]
    }

    pub fn continuity_modulus(&self) -> f64 {
        self.continuity_modulus
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Total mass `x ↦ μ_x(Y)`, the image of the constant one.
    pub fn mass_function(&self) -> Vec<f64> {
        self.measures.iter().map(|m| m.total_mass()).collect()
    }

    pub fn apply_operator<S: Scalar>(&self, g: &GridFunction<S>) -> Result<GridFunction<S>> {
        if !same_space(g.space(), self.total()) {
            return Err(Error::SpaceMismatch);
        }
        let values = self
            .measures
            .iter()
            .map(|m| m.atoms().iter().fold(S::zero(), |acc, &(y, w)| acc + g.value(y) * w))
            .collect();
        GridFunction::from_values(self.base().clone(), values)
    }

    pub fn validate(&self, fiber_tol: f64, atom_tol: f64) -> Result<KernelCertificate> {
        let fiber_violation = self.fiber_violation(fiber_tol, atom_tol);
        let normalization_drift = self.measures.iter().map(|m| libm::fabs(m.total_mass() - 1.0)).fold(0.0, f64::max);
        let recomputed_modulus = self.recomputed_modulus()?;
        let declared_modulus = self.continuity_modulus;
        let passes = fiber_violation == 0.0
            && (!self.normalized || normalization_drift <= NORMALIZATION_TOL)
            && recomputed_modulus <= declared_modulus * (1.0 + 1e-9) + 1e-12;
        Ok(KernelCertificate { fiber_violation, normalization_drift, recomputed_modulus, declared_modulus, passes })
    }

    fn fiber_violation(&self, fiber_tol: f64, atom_tol: f64) -> f64 {
        let total = self.total();
        let mut worst: f64 = 0.0;
        for (x, m) in self.measures.iter().enumerate() {
            let mut fiber: Option<PointSet> = None;
            for y in m.support(atom_tol).iter() {
                let jy = self.map.apply(y);
                if jy == x || self.base().distance(jy, x) <= fiber_tol {
                    continue;
                }
                let fiber = fiber.get_or_insert_with(|| self.map.fiber(x, fiber_tol));
                let gap = fiber.iter().map(|f| total.distance(y, f)).fold(f64::INFINITY, f64::min);
                worst = worst.max(gap);
            }
        }
        worst
    }

    /// Largest bounded-Lipschitz difference quotient over adjacent base
    /// points. Pairs are visited by decreasing total-variation quotient,
    /// which bounds the bounded-Lipschitz one, so most linear programs are
    /// skipped.
    pub fn recomputed_modulus(&self) -> Result<f64> {
        let base = self.base();
        let mut pairs: Vec<(f64, PointIndex, PointIndex, f64)> = Vec::new();
        for (a, b) in base.adjacent_pairs() {
            let d = base.distance(a, b);
            let tv = self.measures[a].total_variation(&self.measures[b])?;
            if tv > 0.0 {
                pairs.push((tv / d, a, b, d));
            }
        }
        pairs.sort_by(|p, q| q.0.total_cmp(&p.0));
        let mut best: f64 = 0.0;
        for (bound, a, b, d) in pairs {
            if bound <= best {
                break;
            }
            best = best.max(self.measures[a].bl_distance(&self.measures[b])? / d);
        }
        Ok(best)
    }

    /// `max_x |E((f∘j)·g)(x) − f(x)·E(g)(x)|`.
    pub fn bimodularity_defect<S: Scalar>(&self, f: &GridFunction<S>, g: &GridFunction<S>) -> Result<f64> {
        let lifted = f.pull_back(&self.map)?.product(g)?;
        let lhs = self.apply_operator(&lifted)?;
        let rhs = self.apply_operator(g)?;
        Ok((0..self.base().len()).map(|x| (lhs.value(x) - f.value(x) * rhs.value(x)).modulus()).fold(0.0, f64::max))
    }

    /// `max_x |E(g·h)(x) − E(g)(x)·E(h)(x)|`.
    pub fn multiplicativity_defect<S: Scalar>(&self, g: &GridFunction<S>, h: &GridFunction<S>) -> Result<f64> {
        if !self.normalized {
            return Err(Error::NotNormalized);
        }
        let gh = self.apply_operator(&g.product(h)?)?;
        let eg = self.apply_operator(g)?;
        let eh = self.apply_operator(h)?;
        Ok((0..self.base().len()).map(|x| (gh.value(x) - eg.value(x) * eh.value(x)).modulus()).fold(0.0, f64::max))
    }

    /// Largest multiplicativity defect over all pairs from `family`.
    pub fn max_multiplicativity_defect(&self, family: &[GridFunction<f64>]) -> Result<f64> {
        if !self.normalized {
            return Err(Error::NotNormalized);
        }
        let images = family.iter().map(|g| self.apply_operator(g)).collect::<Result<Vec<_>>>()?;
        let mut worst: f64 = 0.0;
        for a in 0..family.len() {
            for b in a..family.len() {
                let gh = self.apply_operator(&family[a].product(&family[b])?)?;
                for x in 0..self.base().len() {
                    worst = worst.max(libm::fabs(gh.value(x) - images[a].value(x) * images[b].value(x)));
                }
            }
        }
        Ok(worst)
    }

    /// Every `μ_x` is carried by a single atom above `atom_tol`.
    pub fn is_extremal_candidate(&self, atom_tol: f64) -> bool {
        self.measures.iter().all(|m| m.support(atom_tol).len() == 1)
    }

    pub fn union_of_supports(&self, atom_tol: f64) -> PointSet {
        self.measures.iter().fold(PointSet::new(), |acc, m| acc.union(&m.support(atom_tol)))
    }

    /// `t·self + (1 − t)·other`; the declared modulus is the same
    /// combination of the two declared moduli.
    pub fn convex_combination(&self, other: &Self, t: f64) -> Result<Self> {
        if !same_space(self.base(), other.base()) || !same_space(self.total(), other.total()) {
            return Err(Error::SpaceMismatch);
        }
        let measures = self
            .measures
            .iter()
            .zip(&other.measures)
            .map(|(a, b)| a.convex_combination(b, t))
            .collect::<Result<Vec<_>>>()?;
        let modulus = t * self.continuity_modulus + (1.0 - t) * other.continuity_modulus;
        Self::build(self.map.clone(), measures, modulus, self.normalized && other.normalized)
    }

    /// Reweights every `μ_x` by `ψ(y) = 1 + s·d(y, reference)/diam(Y)` and
    /// renormalizes. Supports are unchanged, so fiber support survives;
    /// the declared modulus grows by the factor `2(H + η)` with `H = 1 + s`
    /// the sup of `ψ` and `η = s/diam(Y)` its Lipschitz constant.
    pub fn tilted(&self, strength: f64, reference: PointIndex) -> Result<Self> {
        if !(strength >= 0.0 && strength.is_finite()) {
            return Err(Error::Parameter { name: "tilt strength", requirement: "nonnegative", value: strength });
        }
        let total = self.total();
        if reference >= total.len() {
            return Err(Error::PointOutOfRange(reference));
        }
        let diam = total.diameter();
        let scale = if diam > 0.0 { strength / diam } else { 0.0 };
        let measures = self
            .measures
            .iter()
            .map(|m| {
                let weighted: Vec<(PointIndex, f64)> =
                    m.atoms().iter().map(|&(y, w)| (y, w * (1.0 + scale * total.distance(y, reference)))).collect();
                let z: f64 = weighted.iter().map(|a| a.1).sum();
                let target = m.total_mass();
                let factor = if z > 0.0 { target / z } else { 0.0 };
                DiscreteMeasure::new(total.clone(), weighted.into_iter().map(|(y, w)| (y, w * factor)))
            })
            .collect::<Result<Vec<_>>>()?;
        let factor = 2.0 * (1.0 + strength + scale);
        Self::build(self.map.clone(), measures, self.continuity_modulus * factor, self.normalized)
    }
}

/// The Dirac kernel `μ_x = δ_{α(x)}` of a section `α: X → Y` of `j`. The
/// declared modulus is the Lipschitz estimate of `α`, which dominates
/// `min(d(α(x), α(x')), 2) / d(x, x')`.
pub fn kernel_from_section(alpha: &NetMap, j: &NetMap, tol: f64) -> Result<Kernel> {
    if !same_space(alpha.domain(), j.codomain()) || !same_space(alpha.codomain(), j.domain()) {
        return Err(Error::SpaceMismatch);
    }
    for x in 0..j.codomain().len() {
        let deviation = j.codomain().distance(j.apply(alpha.apply(x)), x);
        if deviation > tol {
            return Err(Error::NotASection { base: x, deviation, tol });
        }
    }
    let measures = (0..j.codomain().len())
        .map(|x| DiscreteMeasure::dirac(j.domain().clone(), alpha.apply(x)))
        .collect::<Result<Vec<_>>>()?;
    Kernel::new(j.clone(), measures, alpha.lipschitz_estimate())
}

/// The two-row kernel on the canonical instance: `x·δ_(x,0) + (1 − x)·δ_(x,1)`
/// over `[0, 1]` and `δ_(x,0)` over `[1, 2]`. Adjacent columns are at
/// bounded-Lipschitz distance at most `h(1 − h) + h·√(1 + h²) ≤ 2h`.
pub fn canonical_kernel(mesh: f64) -> Result<Kernel> {
    let j = canonical_projection(mesh)?;
    let total = j.domain().clone();
    let measures = (0..j.codomain().len())
        .map(|x| {
            let xv = j.codomain().point(x).coords.as_real().expect("interval")[0];
            let lower = total.nearest(&Coords::Real(alloc::vec![xv, 0.0]));
            if xv < 1.0 - NET_EPS {
                let upper = total.nearest(&Coords::Real(alloc::vec![xv, 1.0]));
                DiscreteMeasure::new(total.clone(), [(lower, xv), (upper, 1.0 - xv)])
            } else {
                DiscreteMeasure::dirac(total.clone(), lower)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Kernel::new(j, measures, 2.0)
}
