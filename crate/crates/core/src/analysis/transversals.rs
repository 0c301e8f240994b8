//! Minimal subsets of `Y` that still meet every fiber.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::map::NetMap;
use crate::space::{PointIndex, PointSet};

#[derive(Debug, Clone, PartialEq)]
pub struct TransversalSearch {
    /// Sorted lexicographically by point index.
    pub sets: Vec<PointSet>,
    pub exhaustive: bool,
}

/// Inclusion-minimal sets meeting every fiber `{y : d(j(y), x) ≤ tol}`.
/// With `tol = 0` the fibers are disjoint and these are exactly the
/// selections of one point per fiber.
pub fn minimal_surjective_transversals(j: &NetMap, tol: f64, max_count: usize) -> Result<TransversalSearch> {
    let fibers = j.fibers(tol);
    if let Some(x) = fibers.iter().position(|f| f.is_empty()) {
        return Err(Error::EmptyFiber(x));
    }
    let mut found = BTreeSet::new();
    let mut chosen = Vec::new();
    let exhaustive = branch(&fibers, &mut chosen, &mut found, max_count);
    Ok(TransversalSearch {
        sets: found.into_iter().map(|v: Vec<PointIndex>| v.into_iter().collect()).collect(),
        exhaustive,
    })
}

/// Returns false once the cap is exceeded.
fn branch(
    fibers: &[PointSet],
    chosen: &mut Vec<PointIndex>,
    found: &mut BTreeSet<Vec<PointIndex>>,
    max_count: usize,
) -> bool {
    let open = fibers.iter().position(|f| !chosen.iter().any(|&y| f.contains(y)));
    let Some(x) = open else {
        if is_minimal(fibers, chosen) {
            let mut set = chosen.clone();
            set.sort_unstable();
            found.insert(set);
            if found.len() > max_count {
                found.pop_last();
                return false;
            }
        }
        return true;
    };
    for y in fibers[x].iter() {
        chosen.push(y);
        let ok = branch(fibers, chosen, found, max_count);
        chosen.pop();
        if !ok {
            return false;
        }
    }
    true
}

/// Every chosen point is the only chosen point of some fiber.
fn is_minimal(fibers: &[PointSet], chosen: &[PointIndex]) -> bool {
    chosen
        .iter()
        .all(|&y| fibers.iter().any(|f| f.contains(y) && chosen.iter().filter(|&&z| f.contains(z)).count() == 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{build_gallery_map, canonical_projection, dyadic};
    use crate::space::Resolution;

    /// Every subset of `Y`, kept when it meets all fibers and no proper
    /// subset does.
    fn brute_force(j: &NetMap, tol: f64) -> Vec<PointSet> {
        let n = j.domain().len();
        let fibers = j.fibers(tol);
        let hits = |mask: u32| fibers.iter().all(|f| f.iter().any(|y| mask >> y & 1 == 1));
        let mut out: Vec<PointSet> = (0u32..1 << n)
            .filter(|&m| hits(m) && (0..n).all(|y| m >> y & 1 == 0 || !hits(m & !(1 << y))))
            .map(|m| (0..n).filter(|&y| m >> y & 1 == 1).collect())
            .collect();
        out.sort_by(|a: &PointSet, b| a.as_slice().cmp(b.as_slice()));
        out
    }

    #[test]
    fn identity_has_one() {
        let j = build_gallery_map("identity", Resolution::Mesh(0.1)).unwrap();
        let t = minimal_surjective_transversals(&j, 0.0, 64).unwrap();
        assert_eq!(t.sets.len(), 1);
    }

    #[test]
    fn canonical_half_mesh_product() {
        let j = canonical_projection(0.5).unwrap();
        let t = minimal_surjective_transversals(&j, 0.0, 64).unwrap();
        assert_eq!(t.sets.len(), 8);
        assert_eq!(t.sets, brute_force(&j, 0.0));
    }

    #[test]
    fn dyadic_with_tolerance_matches_brute_force() {
        let j = dyadic(2).unwrap();
        let t = minimal_surjective_transversals(&j, 0.25, 64).unwrap();
        assert_eq!(t.sets, brute_force(&j, 0.25));
        assert_eq!(t.sets.len(), 4);
        let j = dyadic(3).unwrap();
        let t = minimal_surjective_transversals(&j, 0.125, 1000).unwrap();
        assert_eq!(t.sets, brute_force(&j, 0.125));
    }

    #[test]
    fn cap() {
        let j = canonical_projection(0.5).unwrap();
        let t = minimal_surjective_transversals(&j, 0.0, 5).unwrap();
        assert_eq!(t.sets.len(), 5);
        assert!(!t.exhaustive);
    }
}
