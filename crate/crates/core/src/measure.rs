//! Finite nonnegative measures on net spaces and the bounded-Lipschitz
//! distance between them.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, SparseRow};
use crate::map::NetMap;
use crate::space::{same_space, NetSpace, PointIndex, PointSet};

/// Allowed drift of total mass from 1 for a measure to count as a
/// probability measure.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Atoms are sorted by point index, merged, and strictly positive. The
/// total mass is cached at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    space: Arc<NetSpace>,
    atoms: Vec<(PointIndex, f64)>,
    total_mass: f64,
}

impl DiscreteMeasure {
    pub fn new(space: Arc<NetSpace>, atoms: impl IntoIterator<Item = (PointIndex, f64)>) -> Result<Self> {
        let mut atoms: Vec<(PointIndex, f64)> = atoms.into_iter().collect();
        for &(i, w) in &atoms {
            if i >= space.len() {
                return Err(Error::PointOutOfRange(i));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidWeight { index: i, weight: w });
            }
        }
        atoms.sort_by_key(|a| a.0);
        let mut merged: Vec<(PointIndex, f64)> = Vec::with_capacity(atoms.len());
        for (i, w) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += w,
                _ => merged.push((i, w)),
            }
        }
        merged.retain(|a| a.1 > 0.0);
        let total_mass = merged.iter().map(|a| a.1).sum();
        Ok(Self { space, atoms: merged, total_mass })
    }

    pub fn dirac(space: Arc<NetSpace>, at: PointIndex) -> Result<Self> {
        Self::new(space, [(at, 1.0)])
    }

    pub fn zero(space: Arc<NetSpace>) -> Self {
        Self { space, atoms: Vec::new(), total_mass: 0.0 }
    }

    /// Uniform probability on `set`.
    pub fn uniform(space: Arc<NetSpace>, set: &PointSet) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        let w = 1.0 / set.len() as f64;
        Self::new(space, set.iter().map(|i| (i, w)))
    }

    pub fn space(&self) -> &Arc<NetSpace> {
        &self.space
    }

    pub fn atoms(&self) -> &[(PointIndex, f64)] {
        &self.atoms
    }

    pub fn weight(&self, i: PointIndex) -> f64 {
        self.atoms.binary_search_by_key(&i, |a| a.0).map_or(0.0, |k| self.atoms[k].1)
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn is_probability(&self) -> bool {
        libm::fabs(self.total_mass() - 1.0) <= NORMALIZATION_TOL
    }

    /// Points carrying weight above `atom_tol`.
    pub fn support(&self, atom_tol: f64) -> PointSet {
        self.atoms.iter().filter(|a| a.1 > atom_tol).map(|a| a.0).collect()
    }

    pub fn mass_on(&self, set: &PointSet) -> f64 {
        self.atoms.iter().filter(|a| set.contains(a.0)).map(|a| a.1).sum()
    }

    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.space.len() {
            return Err(Error::FunctionLength { expected: self.space.len(), got: values.len() });
        }
        Ok(self.atoms.iter().map(|&(i, w)| w * values[i]).sum())
    }

    /// Image measure under `j`; the cached total mass is carried over
    /// unchanged rather than re-summed.
    pub fn pushforward(&self, j: &NetMap) -> Result<Self> {
        if !same_space(&self.space, j.domain()) {
            return Err(Error::SpaceMismatch);
        }
        let mut image = Self::new(j.codomain().clone(), self.atoms.iter().map(|&(i, w)| (j.apply(i), w)))?;
        image.total_mass = self.total_mass;
        Ok(image)
    }

    /// `t·self + (1 − t)·other`.
    pub fn convex_combination(&self, other: &Self, t: f64) -> Result<Self> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::OutOfRange { value: t, lo: 0.0, hi: 1.0 });
        }
        let a = self.atoms.iter().map(|&(i, w)| (i, t * w));
        let b = other.atoms.iter().map(|&(i, w)| (i, (1.0 - t) * w));
        Self::new(self.space.clone(), a.chain(b))
    }

    /// Signed atoms of `self − other` over the union of supports.
    fn difference(&self, other: &Self) -> Vec<(PointIndex, f64)> {
        let mut out = Vec::with_capacity(self.atoms.len() + other.atoms.len());
        let (mut p, mut q) = (0, 0);
        while p < self.atoms.len() || q < other.atoms.len() {
            let a = self.atoms.get(p).copied();
            let b = other.atoms.get(q).copied();
            match (a, b) {
                (Some((i, w)), Some((k, v))) if i == k => {
                    out.push((i, w - v));
                    p += 1;
                    q += 1;
                }
                (Some((i, w)), Some((k, _))) if i < k => {
                    out.push((i, w));
                    p += 1;
                }
                (Some((i, w)), None) => {
                    out.push((i, w));
                    p += 1;
                }
                (_, Some((k, v))) => {
                    out.push((k, -v));
                    q += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        out
    }

    pub fn total_variation(&self, other: &Self) -> Result<f64> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(self.difference(other).iter().map(|a| libm::fabs(a.1)).sum())
    }

    /// `sup { ∫f dμ − ∫f dν : ‖f‖_∞ ≤ 1, Lip(f) ≤ 1 }`.
    ///
    /// Exact on the net: a function on the union of the two supports with
    /// both bounds extends to the whole space with the same bounds (McShane
    /// extension, then truncation), so it is enough to optimize over values
    /// at the atoms.
    pub fn bl_distance(&self, other: &Self) -> Result<f64> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        let diff = self.difference(other);
        let active: Vec<(PointIndex, f64)> = diff.into_iter().filter(|a| a.1 != 0.0).collect();
        match active.len() {
            0 => return Ok(0.0),
            1 => return Ok(libm::fabs(active[0].1)),
            _ => {}
        }
        // g = f + 1 ∈ [0, 2]; ∫f d(μ − ν) = Σ c·g − Σ c.
        let mut lp = LinearProgram::new(active.iter().map(|a| a.1).collect());
        for s in 0..active.len() {
            lp.push(SparseRow::new(alloc::vec![(s, 1.0)], 2.0));
        }
        for s in 0..active.len() {
            for t in 0..active.len() {
                if s == t {
                    continue;
                }
                let d = self.space.distance(active[s].0, active[t].0);
                if d < 2.0 {
                    lp.push(SparseRow::new(alloc::vec![(s, 1.0), (t, -1.0)], d));
                }
            }
        }
        let sol = lp.maximize()?;
        let shift: f64 = active.iter().map(|a| a.1).sum();
        Ok((sol.value - shift).max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> Arc<NetSpace> {
        Arc::new(NetSpace::interval(0.0, 4.0, 0.5).unwrap())
    }

    #[test]
    fn atoms_are_merged_and_sorted() {
        let m = DiscreteMeasure::new(line(), [(3, 0.25), (1, 0.5), (3, 0.25), (2, 0.0)]).unwrap();
        assert_eq!(m.atoms(), &[(1, 0.5), (3, 0.5)]);
        assert!(m.is_probability());
        assert!(DiscreteMeasure::new(line(), [(1, -0.1)]).is_err());
        assert!(DiscreteMeasure::new(line(), [(100, 0.1)]).is_err());
    }

    #[test]
    fn bl_two_diracs() {
        let s = line();
        for (a, b) in [(0, 1), (0, 3), (2, 7), (0, 8)] {
            let d = s.distance(a, b);
            let bl = DiscreteMeasure::dirac(s.clone(), a)
                .unwrap()
                .bl_distance(&DiscreteMeasure::dirac(s.clone(), b).unwrap())
                .unwrap();
            assert!(libm::fabs(bl - d.min(2.0)) < 1e-9, "{a} {b}: {bl}");
        }
    }

    #[test]
    fn bl_against_zero_is_mass() {
        let s = line();
        let m = DiscreteMeasure::new(s.clone(), [(0, 0.3), (5, 0.2)]).unwrap();
        let bl = m.bl_distance(&DiscreteMeasure::zero(s)).unwrap();
        assert!(libm::fabs(bl - 0.5) < 1e-9);
    }

    #[test]
    fn bl_two_point_transport() {
        // uniform on {0, 2} vs uniform on {0.5, 1.5}: pair 0↔0.5 and 2↔1.5
        let s = line();
        let mu = DiscreteMeasure::new(s.clone(), [(0, 0.5), (4, 0.5)]).unwrap();
        let nu = DiscreteMeasure::new(s.clone(), [(1, 0.5), (3, 0.5)]).unwrap();
        assert!(libm::fabs(mu.bl_distance(&nu).unwrap() - 0.5) < 1e-9);
        assert!(libm::fabs(mu.total_variation(&nu).unwrap() - 2.0) < 1e-12);
    }

    #[test]
    fn pushforward_keeps_mass() {
        let j = crate::map::canonical_projection(0.5).unwrap();
        let m = DiscreteMeasure::uniform(j.domain().clone(), &PointSet::full(j.domain().len())).unwrap();
        let p = m.pushforward(&j).unwrap();
        assert_eq!(p.total_mass(), m.total_mass());
        assert_eq!(p.support(0.0).len(), j.codomain().len());
    }

    #[test]
    fn convex_combination_and_integrate() {
        let s = line();
        let a = DiscreteMeasure::dirac(s.clone(), 0).unwrap();
        let b = DiscreteMeasure::dirac(s.clone(), 2).unwrap();
        let c = a.convex_combination(&b, 0.25).unwrap();
        assert_eq!(c.atoms(), &[(0, 0.25), (2, 0.75)]);
        let f: Vec<f64> = (0..s.len()).map(|i| i as f64).collect();
        assert_eq!(c.integrate(&f).unwrap(), 1.5);
        assert!(c.integrate(&[1.0]).is_err());
        assert!(a.convex_combination(&b, 1.5).is_err());
    }
}
