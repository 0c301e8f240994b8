use std::sync::Arc;

use averaging_core::analysis::{enumerate_extreme_points_discrete, fiber_instance, mass_bound_program, vertex_kernel};
use averaging_core::function::bump_family;
use averaging_core::kernel::{canonical_kernel, kernel_from_section};
use averaging_core::lp::LP_TOL;
use averaging_core::map::{canonical_projection, dyadic};
use averaging_core::{Coords, DiscreteMeasure, GridFunction, NetMap, NetSpace, PointIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn bl_matches_assignment_transport() {
    // equal-mass uniform measures: the bounded-Lipschitz distance is the
    // optimal transport cost for the metric min(d, 2), attained at a
    // permutation
    let space = Arc::new(NetSpace::interval(0.0, 5.0, 0.25).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let ids: Vec<usize> = (0..space.len()).collect();
    for _ in 0..40 {
        let k = rng.gen_range(1..=4);
        let picked: Vec<usize> = ids.choose_multiple(&mut rng, 2 * k).copied().collect();
        let (a, b) = picked.split_at(k);
        let w = 1.0 / k as f64;
        let mu = DiscreteMeasure::new(space.clone(), a.iter().map(|&i| (i, w))).unwrap();
        let nu = DiscreteMeasure::new(space.clone(), b.iter().map(|&i| (i, w))).unwrap();
        let oracle = permutations(k)
            .iter()
            .map(|p| (0..k).map(|i| w * space.distance(a[i], b[p[i]]).min(2.0)).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        let bl = mu.bl_distance(&nu).unwrap();
        assert!((bl - oracle).abs() < 1e-9, "{a:?} {b:?}: {bl} vs {oracle}");
    }
}

#[test]
fn canonical_integral_at_quarter() {
    let k = canonical_kernel(0.25).unwrap();
    let g = GridFunction::from_fn(k.total().clone(), |p| p.coords.as_real().unwrap()[1]);
    let x = k.base().nearest(&Coords::Real(vec![0.25]));
    assert!((k.measure(x).integrate(g.values()).unwrap() - 0.75).abs() < 1e-15);
}

#[test]
fn dyadic_pushforward() {
    let j = dyadic(3).unwrap();
    let a = j.domain().index_of(0b100).unwrap();
    let b = j.domain().index_of(0b011).unwrap();
    let m = DiscreteMeasure::new(j.domain().clone(), [(a, 0.5), (b, 0.5)]).unwrap();
    let p = m.pushforward(&j).unwrap();
    let half = j.codomain().nearest(&Coords::Real(vec![0.5]));
    let three_eighths = j.codomain().nearest(&Coords::Real(vec![0.375]));
    assert_eq!(p.weight(half), 0.5);
    assert_eq!(p.weight(three_eighths), 0.5);
    assert_eq!(p.atoms().len(), 2);
}

#[test]
fn fiber_supported_kernels_push_forward_to_diracs() {
    let k = canonical_kernel(0.1).unwrap();
    for x in 0..k.base().len() {
        assert_eq!(k.measure(x).pushforward(k.map()).unwrap().atoms(), &[(x, 1.0)]);
    }
}

#[test]
fn vertices_are_exactly_the_selections() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let sizes: Vec<usize> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(1..=3)).collect();
        let j = fiber_instance(&sizes).unwrap();
        let fibers = j.fibers(0.0);
        let mut selections: Vec<Vec<PointIndex>> = vec![vec![]];
        for f in &fibers {
            selections =
                selections.into_iter().flat_map(|s| f.iter().map(move |y| [s.clone(), vec![y]].concat())).collect();
        }
        selections.sort();
        assert_eq!(enumerate_extreme_points_discrete(&j).unwrap().vertices, selections);
    }
}

#[test]
fn extremality_chain_on_exact_instances() {
    // Dirac kernels are multiplicative on the bump family; any strict
    // mixture of two different Dirac kernels is not
    let j = fiber_instance(&[2, 3, 1, 2]).unwrap();
    let family = bump_family(j.domain(), 1.0);
    let vertices = enumerate_extreme_points_discrete(&j).unwrap().vertices;
    for v in &vertices {
        let k = vertex_kernel(&j, v).unwrap();
        assert!(k.is_extremal_candidate(0.0));
        assert_eq!(k.max_multiplicativity_defect(&family).unwrap(), 0.0);
        let alpha = NetMap::new(j.codomain().clone(), j.domain().clone(), v.clone()).unwrap();
        assert_eq!(kernel_from_section(&alpha, &j, 0.0).unwrap().measures(), k.measures());
    }
    let a = vertex_kernel(&j, &vertices[0]).unwrap();
    let b = vertex_kernel(&j, &vertices[vertices.len() - 1]).unwrap();
    let mix = a.convex_combination(&b, 0.3).unwrap();
    assert!(!mix.is_extremal_candidate(0.0));
    assert!(mix.max_multiplicativity_defect(&family).unwrap() > 0.0);
}

#[test]
fn bimodularity_bound_with_fiber_tolerance() {
    // kernel spread one column to the right: supports sit within one mesh
    // of the fiber, so the defect is at most Lip(f)·mesh·‖g‖∞
    let mesh = 0.25;
    let j = canonical_projection(mesh).unwrap();
    let total = j.domain().clone();
    let measures: Vec<DiscreteMeasure> = (0..j.codomain().len())
        .map(|x| {
            let xv = j.codomain().point(x).coords.as_real().unwrap()[0];
            let here = total.nearest(&Coords::Real(vec![xv, 0.0]));
            let next = total.nearest(&Coords::Real(vec![(xv + mesh).min(2.0), 0.0]));
            DiscreteMeasure::new(total.clone(), [(here, 0.5), (next, 0.5)]).unwrap()
        })
        .collect();
    let k = averaging_core::Kernel::new(j.clone(), measures, 4.0).unwrap();
    assert!(k.validate(mesh, 0.0).unwrap().fiber_violation == 0.0);
    let f = GridFunction::from_fn(j.codomain().clone(), |p| 3.0 * p.coords.as_real().unwrap()[0]);
    let g = GridFunction::from_fn(total, |p| 1.0 + p.coords.as_real().unwrap()[0]);
    let defect = k.bimodularity_defect(&f, &g).unwrap();
    assert!(defect > 0.0);
    assert!(defect <= f.lipschitz_estimate() * mesh * g.sup_norm() + 1e-12);
}

#[test]
fn cantor_constraint_generation_matches_eager_solve() {
    for depth in 3..=6 {
        let j = dyadic(depth).unwrap();
        let target = j.codomain().index_of(1 << (depth - 1)).unwrap();
        let tol = 1.0 / (1u64 << depth) as f64;
        let (lp, lazy) = mass_bound_program(&j, tol, 1.0, target).unwrap();
        let mut eager = lp.clone();
        for row in &lazy {
            eager.push(row.clone());
        }
        let full = eager.maximize().unwrap();
        let mut generated = lp;
        let lazy_solution = generated.maximize_with_lazy_rows(&lazy, LP_TOL).unwrap();
        assert!((full.value - lazy_solution.value).abs() < 1e-8, "depth {depth}");
        for row in eager.rows.iter() {
            assert!(row.violation(&lazy_solution.x) <= 1e-8);
        }
        assert!(lazy_solution.x.iter().all(|&v| v >= 0.0));
    }
}
