use std::sync::Arc;

use averaging_core::analysis::{
    certify, enumerate_extreme_points_discrete, fiber_instance, prune_point, CandidateOrigin, OpennessScale,
};
use averaging_core::kernel::canonical_kernel;
use averaging_core::map::{build_gallery_map, canonical_projection, dyadic, dyadic_branches};
use averaging_core::space::build_gallery_space;
use averaging_core::{Coords, DiscreteMeasure, GridFunction, Kernel, NetSpace, PointSet, Resolution};
use proptest::prelude::*;

fn line() -> Arc<NetSpace> {
    Arc::new(NetSpace::interval(0.0, 3.0, 0.25).unwrap())
}

fn measure_on(space: &Arc<NetSpace>, weights: &[f64]) -> DiscreteMeasure {
    DiscreteMeasure::new(space.clone(), weights.iter().copied().enumerate()).unwrap()
}

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0..1.0f64], n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bl_is_a_metric(a in weights(13), b in weights(13), c in weights(13)) {
        let s = line();
        let (a, b, c) = (measure_on(&s, &a), measure_on(&s, &b), measure_on(&s, &c));
        let ab = a.bl_distance(&b).unwrap();
        let ba = b.bl_distance(&a).unwrap();
        let bc = b.bl_distance(&c).unwrap();
        let ac = a.bl_distance(&c).unwrap();
        prop_assert!((ab - ba).abs() < 1e-9);
        prop_assert!(ac <= ab + bc + 1e-9);
        prop_assert!(a.bl_distance(&a).unwrap() < 1e-12);
        prop_assert!(ab <= a.total_variation(&b).unwrap() + 1e-9);
    }

    #[test]
    fn bl_is_linear_along_segments(a in weights(13), b in weights(13), t in 0.0..=1.0f64) {
        let s = line();
        let (a, b) = (measure_on(&s, &a), measure_on(&s, &b));
        let mix = a.convex_combination(&b, t).unwrap();
        let lhs = mix.bl_distance(&b).unwrap();
        let rhs = t * a.bl_distance(&b).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-8, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn pushforward_preserves_mass_exactly(w in weights(14)) {
        let j = canonical_projection(0.25).unwrap();
        let m = measure_on(j.domain(), &w);
        prop_assert_eq!(m.pushforward(&j).unwrap().total_mass(), m.total_mass());
    }

    #[test]
    fn combination_support_is_union(a in weights(13), b in weights(13), t in 0.01..0.99f64) {
        let s = line();
        let (a, b) = (measure_on(&s, &a), measure_on(&s, &b));
        let mix = a.convex_combination(&b, t).unwrap();
        prop_assert_eq!(mix.support(0.0), a.support(0.0).union(&b.support(0.0)));
    }

    #[test]
    fn operator_is_linear_and_positive(g in prop::collection::vec(-2.0..2.0f64, 14), h in prop::collection::vec(0.0..2.0f64, 14), s in -3.0..3.0f64) {
        let k = canonical_kernel(0.25).unwrap();
        let total = k.total().clone();
        let gf = GridFunction::from_values(total.clone(), g.clone()).unwrap();
        let hf = GridFunction::from_values(total.clone(), h.clone()).unwrap();
        let sum: Vec<f64> = g.iter().zip(&h).map(|(a, b)| a + s * b).collect();
        let sum = GridFunction::from_values(total, sum).unwrap();
        let eg = k.apply_operator(&gf).unwrap();
        let eh = k.apply_operator(&hf).unwrap();
        let es = k.apply_operator(&sum).unwrap();
        for x in 0..k.base().len() {
            prop_assert!((es.value(x) - eg.value(x) - s * eh.value(x)).abs() < 1e-12);
            prop_assert!(eh.value(x) >= 0.0);
        }
    }

    #[test]
    fn kernel_round_trip_is_exact(w in prop::collection::vec(weights(14), 9)) {
        let j = canonical_projection(0.25).unwrap();
        let measures: Vec<DiscreteMeasure> = w.iter().map(|w| measure_on(j.domain(), w)).collect();
        let k = Kernel::nonnegative(j, measures, 1.0).unwrap();
        let back = Kernel::from_operator(k.map().clone(), 1.0, false, |g| k.apply_operator(g)).unwrap();
        prop_assert_eq!(back, k);
    }

    #[test]
    fn openness_monotone_in_ratio(mask in prop::collection::vec(any::<bool>(), 25), c1 in 0.05..1.0f64, c2 in 0.05..1.0f64) {
        let j = build_gallery_map("square-projection", Resolution::Mesh(0.25)).unwrap();
        let set: PointSet = mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
        prop_assume!(!set.is_empty());
        let (lo, hi) = if c1 <= c2 { (c1, c2) } else { (c2, c1) };
        let d_lo = j.openness_defect(&set, 0.5, lo).unwrap();
        let d_hi = j.openness_defect(&set, 0.5, hi).unwrap();
        prop_assert!(d_lo <= d_hi + 1e-12);
    }

    #[test]
    fn openness_grows_when_the_set_shrinks(mask in prop::collection::vec(any::<bool>(), 25), drop in prop::collection::vec(any::<bool>(), 25)) {
        // per center: a smaller set has a smaller image of each ball
        let j = build_gallery_map("square-projection", Resolution::Mesh(0.25)).unwrap();
        let big: PointSet = mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
        let small: PointSet = big.iter().filter(|&i| !drop[i]).collect();
        for a in small.iter() {
            let d_big = j.openness_defect_at(&big, a, 0.5, 1.0);
            let d_small = j.openness_defect_at(&small, a, 0.5, 1.0);
            prop_assert!(d_small + 1e-12 >= d_big);
        }
    }

    #[test]
    fn dyadic_branches_land_near_x(k in 0u64..4096, depth in 1u32..12) {
        let x = k as f64 / 4096.0;
        let (a, b) = dyadic_branches(x, depth).unwrap();
        let j = dyadic(depth).unwrap();
        let grid = 1.0 / (1u64 << depth) as f64;
        for p in [a, b] {
            let y = j.domain().index_of(p.id).unwrap();
            prop_assert_eq!(&j.domain().point(y).coords, &p.coords);
            let image = j.codomain().point(j.apply(y)).coords.as_real().unwrap()[0];
            prop_assert!((image - x).abs() <= grid + 1e-15, "x {} image {}", x, image);
        }
    }

    #[test]
    fn extreme_point_count_is_product(sizes in prop::collection::vec(1usize..=4, 1..=5)) {
        let j = fiber_instance(&sizes).unwrap();
        let e = enumerate_extreme_points_discrete(&j).unwrap();
        prop_assert_eq!(e.count(), sizes.iter().product::<usize>());
    }

    #[test]
    fn gallery_nets_cover_their_models(u in 0.0..1.0f64, v in 0.0..1.0f64, mesh in 0.05..0.5f64) {
        let square = build_gallery_space("square", Resolution::Mesh(mesh)).unwrap();
        let p = Coords::Real(vec![u, v]);
        prop_assert!(square.distance_to(square.nearest(&p), &p) <= square.covering_radius());
        let interval = build_gallery_space("interval", Resolution::Mesh(mesh)).unwrap();
        let p = Coords::Real(vec![u]);
        prop_assert!(interval.distance_to(interval.nearest(&p), &p) <= interval.covering_radius());
        let canonical = build_gallery_space("canonical-Y", Resolution::Mesh(mesh)).unwrap();
        for p in [Coords::Real(vec![2.0 * u, 0.0]), Coords::Real(vec![u, 1.0])] {
            prop_assert!(canonical.distance_to(canonical.nearest(&p), &p) <= canonical.covering_radius());
        }
        let circle = build_gallery_space("circle", Resolution::Mesh(mesh)).unwrap();
        let p = Coords::Real(vec![2.0 * std::f64::consts::PI * u]);
        prop_assert!(circle.distance_to(circle.nearest(&p), &p) <= circle.covering_radius());
    }

    #[test]
    fn cantor_net_covers_long_strings(bits in prop::collection::vec(any::<bool>(), 12), depth in 1u32..10) {
        let cantor = build_gallery_space("cantor", Resolution::Depth(depth)).unwrap();
        let p = Coords::Bits(bits);
        prop_assert!(cantor.distance_to(cantor.nearest(&p), &p) <= cantor.covering_radius());
    }

    #[test]
    fn accepted_prunes_stay_certified(y in 0usize..25) {
        let j = build_gallery_map("square-projection", Resolution::Mesh(0.25)).unwrap();
        let scale = OpennessScale { delta: 0.5, ratio: 0.5 };
        let full = certify(&j, PointSet::full(j.domain().len()), scale, CandidateOrigin::FullSpace).unwrap();
        if let Ok(pruned) = prune_point(&full, y, &j, scale) {
            prop_assert!(pruned.points.is_subset(&full.points));
            prop_assert_eq!(pruned.points.len() + 1, full.points.len());
            let again = certify(&j, pruned.points.clone(), scale, pruned.origin).unwrap();
            prop_assert!(again.is_admissible());
        }
    }
}

#[test]
fn exact_fibers_partition_the_domain() {
    for name in ["canonical-projection", "square-projection", "circle-doubling", "identity"] {
        let j = build_gallery_map(name, Resolution::Mesh(0.25)).unwrap();
        let mut seen = vec![0; j.domain().len()];
        for f in j.fibers(0.0) {
            for y in f.iter() {
                seen[y] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1), "{name}");
    }
}

#[test]
fn identity_is_isometric_and_onto() {
    let j = build_gallery_map("identity", Resolution::Mesh(0.1)).unwrap();
    assert_eq!(j.lipschitz_estimate(), 1.0);
    assert_eq!(j.surjectivity_defect(), 0.0);
}

#[test]
fn ball_mass_is_controlled_by_bl_distance() {
    // a tent function equal to 1 on the ball and vanishing r outside it has
    // Lipschitz constant 1/r, so μ(V) ≤ ν(V_r) + bl(μ, ν)/r
    let s = line();
    let target = 6;
    let r = 0.25;
    let ball: PointSet = (0..s.len()).filter(|&i| s.distance(i, target) < 0.3).collect();
    let limit = DiscreteMeasure::dirac(s.clone(), target).unwrap();
    for n in 0..6 {
        let t = 1.0 / (n + 2) as f64;
        let m = DiscreteMeasure::new(s.clone(), [(target, 1.0 - t), (target + 4, t)]).unwrap();
        let slack = m.bl_distance(&limit).unwrap();
        assert!((slack - t).abs() < 1e-9);
        assert!(limit.mass_on(&ball) <= m.mass_on(&ball) + slack / r + 1e-12);
    }
}
