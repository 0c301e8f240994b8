//! Lipschitz sections of a net map by depth-first constraint propagation.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::map::NetMap;
use crate::space::{PointIndex, PointSet};
use crate::NET_EPS;

/// Default cap on the number of search nodes visited.
pub const DEFAULT_NODE_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SectionCandidate {
    /// `α: X → Y`.
    pub alpha: NetMap,
    pub lipschitz_bound: f64,
    /// `max_x d(j(α(x)), x)`.
    pub section_defect: f64,
}

impl SectionCandidate {
    /// The image `α(X)` as a subset of `Y`.
    pub fn graph(&self) -> PointSet {
        self.alpha.assignment().iter().copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectionSearch {
    pub sections: Vec<SectionCandidate>,
    /// False when the section cap or the node budget cut the search short.
    pub exhaustive: bool,
}

/// All maps `α` with `d(j(α(x)), x) ≤ tol` and
/// `d(α(x), α(x')) ≤ bound · d(x, x')` on adjacent base points, up to
/// `max_sections`. Base points are assigned in breadth-first order over
/// the adjacency graph, candidates in point order, so the output order is
/// deterministic. Candidates whose Lipschitz estimate over all pairs
/// exceeds the bound are discarded.
pub fn find_sections(j: &NetMap, lipschitz_bound: f64, tol: f64, max_sections: usize) -> Result<SectionSearch> {
    find_sections_with_budget(j, lipschitz_bound, tol, max_sections, DEFAULT_NODE_BUDGET)
}

pub fn find_sections_with_budget(
    j: &NetMap,
    lipschitz_bound: f64,
    tol: f64,
    max_sections: usize,
    node_budget: usize,
) -> Result<SectionSearch> {
    if !(lipschitz_bound > 0.0) {
        return Err(Error::Parameter { name: "lipschitz bound", requirement: "positive", value: lipschitz_bound });
    }
    let base = j.codomain();
    let total = j.domain();
    let fibers = j.fibers(tol);
    if let Some(x) = fibers.iter().position(|f| f.is_empty()) {
        return Err(Error::EmptyFiber(x));
    }
    let neighbors = base.neighbors();
    let order = breadth_first_order(&neighbors);
    let mut position = alloc::vec![0; order.len()];
    for (k, &x) in order.iter().enumerate() {
        position[x] = k;
    }
    // Constraints against neighbours placed earlier in the order.
    let earlier: Vec<Vec<(PointIndex, f64)>> = order
        .iter()
        .map(|&x| {
            neighbors[x]
                .iter()
                .filter(|&&n| position[n] < position[x])
                .map(|&n| (n, lipschitz_bound * base.distance(x, n) + NET_EPS))
                .collect()
        })
        .collect();

    let mut assignment: Vec<PointIndex> = alloc::vec![usize::MAX; base.len()];
    let mut next_choice = alloc::vec![0usize; order.len()];
    let mut sections = Vec::new();
    let mut exhaustive = true;
    let mut nodes = 0usize;
    let mut depth = 0usize;
    'search: loop {
        if depth == order.len() {
            let alpha = NetMap::new(base.clone(), total.clone(), assignment.clone())?;
            if alpha.lipschitz_estimate() <= lipschitz_bound + NET_EPS {
                if sections.len() == max_sections {
                    exhaustive = false;
                    break;
                }
                let section_defect =
                    (0..base.len()).map(|x| base.distance(j.apply(alpha.apply(x)), x)).fold(0.0, f64::max);
                sections.push(SectionCandidate { alpha, lipschitz_bound, section_defect });
            }
            depth -= 1;
            continue;
        }
        let x = order[depth];
        let fiber = fibers[x].as_slice();
        let mut placed = false;
        while next_choice[depth] < fiber.len() {
            let y = fiber[next_choice[depth]];
            next_choice[depth] += 1;
            nodes += 1;
            if nodes > node_budget {
                exhaustive = false;
                break 'search;
            }
            if earlier[depth].iter().all(|&(n, reach)| total.distance(y, assignment[n]) <= reach) {
                assignment[x] = y;
                placed = true;
                break;
            }
        }
        if placed {
            depth += 1;
            if depth < order.len() {
                next_choice[depth] = 0;
            }
        } else {
            if depth == 0 {
                break;
            }
            depth -= 1;
        }
    }
    Ok(SectionSearch { sections, exhaustive })
}

fn breadth_first_order(neighbors: &[Vec<PointIndex>]) -> Vec<PointIndex> {
    let mut seen = alloc::vec![false; neighbors.len()];
    let mut order = Vec::with_capacity(neighbors.len());
    for start in 0..neighbors.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut head = order.len();
        order.push(start);
        while head < order.len() {
            let x = order[head];
            head += 1;
            for &n in &neighbors[x] {
                if !seen[n] {
                    seen[n] = true;
                    order.push(n);
                }
            }
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{build_gallery_map, canonical_projection, circle_doubling};
    use crate::space::Resolution;

    #[test]
    fn canonical_has_one_section() {
        for mesh in [0.5, 0.25, 0.1] {
            let j = canonical_projection(mesh).unwrap();
            let found = find_sections(&j, 2.0, 0.0, 64).unwrap();
            assert!(found.exhaustive);
            assert_eq!(found.sections.len(), 1);
            let s = &found.sections[0];
            assert_eq!(s.section_defect, 0.0);
            for x in 0..j.codomain().len() {
                assert_eq!(j.domain().point(s.alpha.apply(x)).coords.as_real().unwrap()[1], 0.0);
            }
        }
    }

    #[test]
    fn identity_has_one_section() {
        let j = build_gallery_map("identity", Resolution::Mesh(0.1)).unwrap();
        let found = find_sections(&j, 2.0, 0.0, 64).unwrap();
        assert_eq!(found.sections.len(), 1);
        assert!((0..j.codomain().len()).all(|x| found.sections[0].alpha.apply(x) == x));
    }

    #[test]
    fn circle_doubling_has_none() {
        let j = circle_doubling(0.1).unwrap();
        let found = find_sections(&j, 2.0, 0.0, 64).unwrap();
        assert!(found.exhaustive);
        assert!(found.sections.is_empty());
    }

    #[test]
    fn square_hits_the_cap() {
        let j = build_gallery_map("square-projection", Resolution::Mesh(0.25)).unwrap();
        let found = find_sections(&j, 2.0, 0.0, 10).unwrap();
        assert_eq!(found.sections.len(), 10);
        assert!(!found.exhaustive);
        for s in &found.sections {
            assert!(s.alpha.lipschitz_estimate() <= 2.0 + 1e-9);
        }
    }

    #[test]
    fn square_at_coarse_mesh_matches_brute_force() {
        // X has 3 points, each fiber a column of 3; brute force over 27 maps
        let j = build_gallery_map("square-projection", Resolution::Mesh(0.5)).unwrap();
        let found = find_sections(&j, 2.0, 0.0, 1000).unwrap();
        let fibers = j.fibers(0.0);
        let mut count = 0;
        for a in fibers[0].iter() {
            for b in fibers[1].iter() {
                for c in fibers[2].iter() {
                    let alpha = NetMap::new(j.codomain().clone(), j.domain().clone(), alloc::vec![a, b, c]).unwrap();
                    if alpha.lipschitz_estimate() <= 2.0 + 1e-9 {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(found.sections.len(), count);
    }

    #[test]
    fn node_budget_marks_non_exhaustive() {
        let j = build_gallery_map("square-projection", Resolution::Mesh(0.25)).unwrap();
        let found = find_sections_with_budget(&j, 2.0, 0.0, 1000, 5).unwrap();
        assert!(!found.exhaustive);
    }

    #[test]
    fn rejects_bad_bound() {
        let j = canonical_projection(0.5).unwrap();
        assert!(find_sections(&j, 0.0, 0.0, 1).is_err());
    }
}
