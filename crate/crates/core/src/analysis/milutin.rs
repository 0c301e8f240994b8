//! Averaged fiber measures over an admissible set.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::map::NetMap;
use crate::measure::DiscreteMeasure;
use crate::space::{PointIndex, PointSet};
use crate::NET_EPS;

/// `μ_x ∝ Σ_{x'} h(x, x') · U(A ∩ j⁻¹(x'))` where `U` is the uniform
/// probability on a set and `h(x, x') = 1 − d(x, x')/s` for
/// `d(x, x') < s` (and `h(x, x) = 1`). Base points with an empty `A`-fiber
/// contribute nothing.
///
/// The declared modulus is the largest total-variation quotient over
/// adjacent base points; total variation dominates the bounded-Lipschitz
/// distance, so it is a valid certificate. With `s` at most the base
/// spacing the kernel is uniform on exact `A`-fibers and the modulus is
/// `2/spacing`.
pub fn milutin_kernel(j: &NetMap, set: &PointSet, smoothing: f64) -> Result<Kernel> {
    if !(smoothing > 0.0 && smoothing.is_finite()) {
        return Err(Error::Parameter { name: "smoothing", requirement: "positive", value: smoothing });
    }
    let base = j.codomain();
    let total = j.domain();
    let mut a_fibers: Vec<Vec<PointIndex>> = alloc::vec![Vec::new(); base.len()];
    for y in set.iter() {
        if y >= total.len() {
            return Err(Error::PointOutOfRange(y));
        }
        a_fibers[j.apply(y)].push(y);
    }
    let mut measures = Vec::with_capacity(base.len());
    for x in 0..base.len() {
        let mut atoms = Vec::new();
        let mut weight = 0.0;
        for (x2, fiber) in a_fibers.iter().enumerate() {
            if fiber.is_empty() {
                continue;
            }
            let h = if x2 == x {
                1.0
            } else {
                let d = base.distance(x, x2);
                if d >= smoothing - NET_EPS {
                    continue;
                }
                1.0 - d / smoothing
            };
            let w = h / fiber.len() as f64;
            atoms.extend(fiber.iter().map(|&y| (y, w)));
            weight += h;
        }
        if weight == 0.0 {
            return Err(Error::EmptyNeighborhood(x));
        }
        measures.push(DiscreteMeasure::new(total.clone(), atoms.into_iter().map(|(y, w)| (y, w / weight)))?);
    }
    let mut modulus: f64 = 0.0;
    for (a, b) in base.adjacent_pairs() {
        modulus = modulus.max(measures[a].total_variation(&measures[b])? / base.distance(a, b));
    }
    Kernel::new(j.clone(), measures, modulus)
}

/// One-sided Hausdorff distance in `Y` from `from` to `to`.
pub fn hausdorff_one_sided(j: &NetMap, from: &PointSet, to: &PointSet) -> f64 {
    let total = j.domain();
    from.iter().map(|a| to.iter().map(|b| total.distance(a, b)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
}

pub fn hausdorff(j: &NetMap, a: &PointSet, b: &PointSet) -> f64 {
    hausdorff_one_sided(j, a, b).max(hausdorff_one_sided(j, b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{build_gallery_map, canonical_projection, circle_doubling};
    use crate::space::Resolution;

    #[test]
    fn square_full_set_is_uniform_on_columns() {
        let j = build_gallery_map("square-projection", Resolution::Mesh(0.25)).unwrap();
        let full = PointSet::full(j.domain().len());
        let k = milutin_kernel(&j, &full, j.codomain().covering_radius()).unwrap();
        for x in 0..k.base().len() {
            let fiber = j.fiber(x, 0.0);
            assert_eq!(k.measure(x).support(0.0), fiber);
            for &(_, w) in k.measure(x).atoms() {
                assert!(libm::fabs(w - 0.2) < 1e-12);
            }
        }
        let cert = k.validate(0.0, 0.0).unwrap();
        assert!(cert.passes, "{cert:?}");
        assert!(cert.declared_modulus <= 2.0 / 0.25 + 1e-9);
        assert_eq!(k.union_of_supports(0.0), full);
    }

    #[test]
    fn wider_smoothing_spreads_within_tolerance() {
        let j = build_gallery_map("square-projection", Resolution::Mesh(0.25)).unwrap();
        let full = PointSet::full(j.domain().len());
        let k = milutin_kernel(&j, &full, 0.5).unwrap();
        assert!(k.validate(0.5, 0.0).unwrap().passes);
        assert!(!k.validate(0.0, 0.0).unwrap().passes);
        for x in 0..k.base().len() {
            assert!(hausdorff(&j, &k.measure(x).support(0.0), &j.fiber(x, 0.0)) <= 2.0 * 0.5);
        }
    }

    #[test]
    fn canonical_graph_gives_diracs() {
        let j = canonical_projection(0.25).unwrap();
        let graph: PointSet = (0..9).collect();
        let k = milutin_kernel(&j, &graph, 0.25).unwrap();
        assert!(k.is_extremal_candidate(0.0));
        for x in 0..9 {
            assert_eq!(k.measure(x).atoms(), &[(x, 1.0)]);
        }
    }

    #[test]
    fn circle_halves() {
        let j = circle_doubling(0.1).unwrap();
        let k = milutin_kernel(&j, &PointSet::full(j.domain().len()), j.codomain().covering_radius()).unwrap();
        for x in 0..k.base().len() {
            let atoms = k.measure(x).atoms();
            assert_eq!(atoms.len(), 2);
            assert!(atoms.iter().all(|a| libm::fabs(a.1 - 0.5) < 1e-15));
        }
        assert!(k.validate(0.0, 0.0).unwrap().passes);
    }

    #[test]
    fn empty_neighbourhood() {
        let j = canonical_projection(0.25).unwrap();
        let top: PointSet = (9..14).collect();
        assert_eq!(milutin_kernel(&j, &top, 0.25), Err(Error::EmptyNeighborhood(5)));
    }
}
