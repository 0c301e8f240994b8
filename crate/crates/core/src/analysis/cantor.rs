//! How much mass a Lipschitz family of fiber-supported measures can put
//! over a single base point. For the binary-expansion map of the Cantor
//! set onto `[0, 1]` the answer shrinks with the depth of the net: the two
//! branches over a dyadic rational are far apart in `Y` while their images
//! meet, so mass must fade out before it can cross.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, SparseRow, LP_TOL};
use crate::map::{dyadic, NetMap};
use crate::space::{check_depth, NetSpace, PointIndex};

/// `max μ_target(Y)` over nonnegative kernels with
///
/// * `μ_x` supported on `{y : d(j(y), x) ≤ fiber_tol}` and `μ_x(Y) ≤ 1`,
/// * `|∫f dμ_x − ∫f dμ_x'| ≤ L·d(x, x')` for adjacent `x, x'` and every
///   bump `f = max(0, r − d(·, c))` centered at a fiber point of `x` or
///   `x'`, with radii `r = ε·2ᵏ ≤ 1` (`ε` the covering radius of `Y`).
///
/// The bumps are 1-Lipschitz and bounded by 1, so the constraint is a
/// relaxation of the bounded-Lipschitz one and the optimum is an upper
/// bound for genuine kernels. Rows for the largest radius are imposed up
/// front, the rest by constraint generation.
pub fn kernel_mass_bound(j: &NetMap, fiber_tol: f64, lipschitz: f64, target: PointIndex) -> Result<f64> {
    let (mut lp, lazy) = mass_bound_program(j, fiber_tol, lipschitz, target)?;
    let solution = lp.maximize_with_lazy_rows(&lazy, LP_TOL)?;
    Ok(solution.value.max(0.0))
}

/// The program behind [`kernel_mass_bound`]: the rows imposed up front and
/// the rows left to constraint generation. Variables are the weights
/// `w_{x,y}` for `y` in the fiber of `x`, base point by base point, fiber
/// points in index order.
pub fn mass_bound_program(
    j: &NetMap,
    fiber_tol: f64,
    lipschitz: f64,
    target: PointIndex,
) -> Result<(LinearProgram, Vec<SparseRow>)> {
    if !(lipschitz >= 0.0 && lipschitz.is_finite()) {
        return Err(Error::Parameter { name: "lipschitz", requirement: "nonnegative and finite", value: lipschitz });
    }
    let base = j.codomain();
    let total = j.domain();
    if target >= base.len() {
        return Err(Error::PointOutOfRange(target));
    }
    let fibers = j.fibers(fiber_tol);
    let mut offset = Vec::with_capacity(base.len() + 1);
    offset.push(0);
    for f in &fibers {
        offset.push(offset.last().unwrap() + f.len());
    }
    let n = *offset.last().unwrap();
    let mut objective = alloc::vec![0.0; n];
    for v in &mut objective[offset[target]..offset[target + 1]] {
        *v = 1.0;
    }
    let mut lp = LinearProgram::new(objective);
    for x in 0..base.len() {
        if !fibers[x].is_empty() {
            lp.push(SparseRow::new((offset[x]..offset[x + 1]).map(|v| (v, 1.0)).collect(), 1.0));
        }
    }
    let radii = bump_radii(total);
    let mut lazy = Vec::new();
    for (a, b) in base.adjacent_pairs() {
        let allowed = lipschitz * base.distance(a, b);
        let centers = fibers[a].union(&fibers[b]);
        for c in centers.iter() {
            for (k, &r) in radii.iter().enumerate() {
                let row = |sign: f64| {
                    let mut coeffs = Vec::new();
                    for (i, y) in fibers[a].iter().enumerate() {
                        let f = (r - total.distance(y, c)).max(0.0);
                        if f > 0.0 {
                            coeffs.push((offset[a] + i, sign * f));
                        }
                    }
                    for (i, y) in fibers[b].iter().enumerate() {
                        let f = (r - total.distance(y, c)).max(0.0);
                        if f > 0.0 {
                            coeffs.push((offset[b] + i, -sign * f));
                        }
                    }
                    SparseRow::new(coeffs, allowed)
                };
                for sign in [1.0, -1.0] {
                    let r = row(sign);
                    if r.coeffs.is_empty() {
                        continue;
                    }
                    if k + 1 == radii.len() {
                        lp.push(r);
                    } else {
                        lazy.push(r);
                    }
                }
            }
        }
    }
    Ok((lp, lazy))
}

fn bump_radii(total: &NetSpace) -> Vec<f64> {
    let mut radii = Vec::new();
    let mut r = total.covering_radius();
    while r < 1.0 {
        radii.push(r);
        r *= 2.0;
    }
    radii.push(1.0);
    radii
}

/// The bound for the binary-expansion map at the given depth, fiber
/// tolerance `2^(−depth)`, over a dyadic target in `(0, 1)`.
pub fn cantor_mass_bound(depth: u32, lipschitz: f64, target: f64) -> Result<f64> {
    check_depth(depth, 2)?;
    let j = dyadic(depth)?;
    let target = dyadic_index(j.codomain(), depth, target)?;
    kernel_mass_bound(&j, libm::ldexp(1.0, -(depth as i32)), lipschitz, target)
}

/// The same program for the identity of the dyadic grid: every fiber is a
/// single point, the constant Dirac kernel is feasible and the bound is 1.
pub fn identity_mass_bound(depth: u32, lipschitz: f64, target: f64) -> Result<f64> {
    check_depth(depth, 2)?;
    let grid = Arc::new(NetSpace::dyadic_grid(depth)?);
    let j = NetMap::identity(grid);
    let target = dyadic_index(j.codomain(), depth, target)?;
    kernel_mass_bound(&j, 0.0, lipschitz, target)
}

fn dyadic_index(grid: &NetSpace, depth: u32, target: f64) -> Result<PointIndex> {
    let scaled = libm::ldexp(target, depth as i32);
    if !(target > 0.0 && target < 1.0) || libm::floor(scaled) != scaled {
        return Err(Error::TargetOffGrid { target, depth });
    }
    let k = scaled as u64;
    grid.index_of(k).ok_or(Error::TargetOffGrid { target, depth })
}
