//! Subsets `A ⊆ Y` on which `j|_A` is an open surjection at net scale.

use alloc::vec::Vec;

use crate::analysis::sections::SectionCandidate;
use crate::error::{Error, Result};
use crate::map::NetMap;
use crate::space::{PointIndex, PointSet};
use crate::NET_EPS;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateOrigin {
    FullSpace,
    /// Graph of the section with this index in the section search.
    SectionGraph(usize),
    /// The full space with one point removed.
    Pruned {
        removed: PointIndex,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub points: PointSet,
    pub surjectivity_defect: f64,
    pub openness_defect: f64,
    /// No single point can be removed without losing surjectivity.
    pub minimal: bool,
    pub origin: CandidateOrigin,
}

impl CandidateSet {
    pub fn is_admissible(&self) -> bool {
        self.surjectivity_defect == 0.0 && self.openness_defect == 0.0
    }
}

/// Openness is tested on balls of radius `delta` against target balls of
/// radius `ratio · delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpennessScale {
    pub delta: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PruneRejection {
    NotMember,
    Surjectivity(f64),
    Openness(f64),
    Invalid(Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleSearch {
    pub sets: Vec<CandidateSet>,
    /// True when `max_sets` stopped the enumeration.
    pub capped: bool,
    /// Candidates dropped because they failed at the refined scale.
    pub failed_refinement: usize,
}

pub fn certify(j: &NetMap, points: PointSet, scale: OpennessScale, origin: CandidateOrigin) -> Result<CandidateSet> {
    let surjectivity_defect = j.surjectivity_defect_on(&points);
    let openness_defect = j.openness_defect(&points, scale.delta, scale.ratio)?;
    let minimal = is_minimal(j, &points);
    Ok(CandidateSet { points, surjectivity_defect, openness_defect, minimal, origin })
}

fn is_minimal(j: &NetMap, points: &PointSet) -> bool {
    let mut hits = alloc::vec![0usize; j.codomain().len()];
    for y in points.iter() {
        hits[j.apply(y)] += 1;
    }
    points.iter().all(|y| hits[j.apply(y)] == 1)
}

/// `A ∖ {y}` with recomputed defects, or the reason it is rejected. When
/// `A` is itself admissible only the centers whose `δ`-ball contained `y`
/// are re-examined.
pub fn prune_point(
    set: &CandidateSet,
    y: PointIndex,
    j: &NetMap,
    scale: OpennessScale,
) -> core::result::Result<CandidateSet, PruneRejection> {
    if !set.points.contains(y) {
        return Err(PruneRejection::NotMember);
    }
    let points = set.points.without(y);
    let surjectivity_defect = j.surjectivity_defect_on(&points);
    if surjectivity_defect > 0.0 {
        return Err(PruneRejection::Surjectivity(surjectivity_defect));
    }
    let openness_defect = if set.is_admissible() {
        if !(scale.delta > 0.0 && scale.ratio > 0.0 && scale.ratio <= 1.0) {
            return Err(PruneRejection::Invalid(Error::Parameter {
                name: "openness scale",
                requirement: "delta > 0 and ratio in (0, 1]",
                value: scale.delta,
            }));
        }
        points
            .iter()
            .filter(|&a| j.domain().distance(a, y) <= scale.delta + NET_EPS)
            .map(|a| j.openness_defect_at(&points, a, scale.delta, scale.ratio))
            .fold(0.0, f64::max)
    } else {
        j.openness_defect(&points, scale.delta, scale.ratio).map_err(PruneRejection::Invalid)?
    };
    if openness_defect > 0.0 {
        return Err(PruneRejection::Openness(openness_defect));
    }
    let minimal = is_minimal(j, &points);
    Ok(CandidateSet {
        points,
        surjectivity_defect,
        openness_defect,
        minimal,
        origin: CandidateOrigin::Pruned { removed: y },
    })
}

/// Candidates in order: the full space, the graphs of the given sections,
/// then single-point prunes of the full space at points whose exact fiber
/// has at least two points. Inadmissible and repeated sets are skipped.
///
/// With a refinement (the same problem on a finer net), every admissible
/// set is lifted to the fine net (a fine point belongs to the lift when its
/// nearest coarse point belongs to the set) and certified again at the
/// same `δ` in units of the codomain covering radius; sets that fail there
/// are dropped.
pub fn enumerate_admissible_sets(
    j: &NetMap,
    sections: &[SectionCandidate],
    scale: OpennessScale,
    max_sets: usize,
    refinement: Option<&NetMap>,
) -> Result<AdmissibleSearch> {
    let full = certify(j, PointSet::full(j.domain().len()), scale, CandidateOrigin::FullSpace)?;
    let mut search = AdmissibleSearch { sets: Vec::new(), capped: false, failed_refinement: 0 };
    let consider = |candidate: CandidateSet, search: &mut AdmissibleSearch| -> Result<bool> {
        if !candidate.is_admissible() || search.sets.iter().any(|s| s.points == candidate.points) {
            return Ok(true);
        }
        if let Some(fine) = refinement {
            if !survives_refinement(j, fine, &candidate.points, scale)? {
                search.failed_refinement += 1;
                return Ok(true);
            }
        }
        if search.sets.len() == max_sets {
            search.capped = true;
            return Ok(false);
        }
        search.sets.push(candidate);
        Ok(true)
    };
    if !consider(full.clone(), &mut search)? {
        return Ok(search);
    }
    for (i, s) in sections.iter().enumerate() {
        let candidate = certify(j, s.graph(), scale, CandidateOrigin::SectionGraph(i))?;
        if !consider(candidate, &mut search)? {
            return Ok(search);
        }
    }
    let fiber_sizes = {
        let mut sizes = alloc::vec![0usize; j.codomain().len()];
        for &x in j.assignment() {
            sizes[x] += 1;
        }
        sizes
    };
    let mut by_id: Vec<PointIndex> = (0..j.domain().len()).collect();
    by_id.sort_by_key(|&y| j.domain().point(y).id);
    for y in by_id {
        if fiber_sizes[j.apply(y)] < 2 {
            continue;
        }
        if let Ok(candidate) = prune_point(&full, y, j, scale) {
            if !consider(candidate, &mut search)? {
                return Ok(search);
            }
        }
    }
    Ok(search)
}

/// Lifts `points` to the finer problem and certifies it there.
pub fn survives_refinement(coarse: &NetMap, fine: &NetMap, points: &PointSet, scale: OpennessScale) -> Result<bool> {
    let lifted = lift_to_refinement(coarse, fine, points);
    if lifted.is_empty() {
        return Ok(false);
    }
    let factor = fine.codomain().covering_radius() / coarse.codomain().covering_radius();
    let fine_scale = OpennessScale { delta: scale.delta * factor, ratio: scale.ratio };
    Ok(fine.surjectivity_defect_on(&lifted) == 0.0
        && fine.openness_defect(&lifted, fine_scale.delta, fine_scale.ratio)? == 0.0)
}

pub fn lift_to_refinement(coarse: &NetMap, fine: &NetMap, points: &PointSet) -> PointSet {
    fine.domain()
        .points()
        .iter()
        .enumerate()
        .filter(|(_, p)| points.contains(coarse.domain().nearest(&p.coords)))
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::sections::find_sections;
    use crate::map::{build_gallery_map, canonical_projection};
    use crate::space::{Coords, Resolution};

    fn scale(mesh: f64) -> OpennessScale {
        OpennessScale { delta: 2.0 * mesh, ratio: 0.5 }
    }

    #[test]
    fn canonical_sets_include_graph_and_prune_at_corner() {
        let j = canonical_projection(0.25).unwrap();
        let fine = canonical_projection(0.125).unwrap();
        let sections = find_sections(&j, 2.0, 0.0, 64).unwrap().sections;
        let found = enumerate_admissible_sets(&j, &sections, scale(0.25), 64, Some(&fine)).unwrap();
        assert!(found.sets.len() >= 2);
        let corner = j.domain().nearest(&Coords::Real(alloc::vec![1.0, 1.0]));
        assert!(found.sets.iter().any(|s| s.origin == CandidateOrigin::SectionGraph(0) && s.minimal));
        assert!(found.sets.iter().any(|s| s.origin == CandidateOrigin::Pruned { removed: corner }));
        for s in &found.sets {
            assert!(s.is_admissible());
        }
    }

    #[test]
    fn identity_has_only_the_full_space() {
        let j = build_gallery_map("identity", Resolution::Mesh(0.1)).unwrap();
        let sections = find_sections(&j, 2.0, 0.0, 64).unwrap().sections;
        let found = enumerate_admissible_sets(&j, &sections, scale(0.1), 64, None).unwrap();
        assert_eq!(found.sets.len(), 1);
        assert_eq!(found.sets[0].points, PointSet::full(j.domain().len()));
    }

    #[test]
    fn prune_corner_accepted_and_section_graph_rejected() {
        let j = canonical_projection(0.25).unwrap();
        let full = certify(&j, PointSet::full(j.domain().len()), scale(0.25), CandidateOrigin::FullSpace).unwrap();
        let corner = j.domain().nearest(&Coords::Real(alloc::vec![1.0, 1.0]));
        let pruned = prune_point(&full, corner, &j, scale(0.25)).unwrap();
        assert_eq!(pruned.surjectivity_defect, 0.0);
        assert_eq!(pruned.openness_defect, 0.0);
        let graph: PointSet = (0..9).collect();
        let graph = certify(&j, graph, scale(0.25), CandidateOrigin::SectionGraph(0)).unwrap();
        for y in graph.points.iter() {
            assert!(matches!(prune_point(&graph, y, &j, scale(0.25)), Err(PruneRejection::Surjectivity(_))));
        }
        assert_eq!(prune_point(&graph, 12, &j, scale(0.25)), Err(PruneRejection::NotMember));
    }

    #[test]
    fn incremental_prune_matches_full_recheck() {
        let j = build_gallery_map("square-projection", Resolution::Mesh(0.25)).unwrap();
        let full = certify(&j, PointSet::full(j.domain().len()), scale(0.25), CandidateOrigin::FullSpace).unwrap();
        assert!(full.is_admissible());
        for y in 0..j.domain().len() {
            let fast = prune_point(&full, y, &j, scale(0.25));
            let slow =
                certify(&j, full.points.without(y), scale(0.25), CandidateOrigin::Pruned { removed: y }).unwrap();
            assert_eq!(fast.is_ok(), slow.is_admissible(), "point {y}");
        }
    }

    #[test]
    fn square_interior_prune_accepted() {
        let j = build_gallery_map("square-projection", Resolution::Mesh(0.25)).unwrap();
        let full = certify(&j, PointSet::full(j.domain().len()), scale(0.25), CandidateOrigin::FullSpace).unwrap();
        let interior = j.domain().nearest(&Coords::Real(alloc::vec![0.5, 0.5]));
        assert!(prune_point(&full, interior, &j, scale(0.25)).is_ok());
    }

    #[test]
    fn square_has_several_sets() {
        let j = build_gallery_map("square-projection", Resolution::Mesh(0.25)).unwrap();
        let sections = find_sections(&j, 2.0, 0.0, 8).unwrap().sections;
        let found = enumerate_admissible_sets(&j, &sections, scale(0.25), 64, None).unwrap();
        assert!(found.sets.iter().any(|s| s.origin == CandidateOrigin::FullSpace));
        assert!(found.sets.iter().any(|s| matches!(s.origin, CandidateOrigin::SectionGraph(_))));
    }

    #[test]
    fn cap_is_reported() {
        let j = build_gallery_map("square-projection", Resolution::Mesh(0.25)).unwrap();
        let found = enumerate_admissible_sets(&j, &[], scale(0.25), 2, None).unwrap();
        assert_eq!(found.sets.len(), 2);
        assert!(found.capped);
    }
}
