//! Vertices of the kernel polytope when continuity is dropped: the product
//! over base points of the probability simplices on their fibers.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::map::NetMap;
use crate::measure::DiscreteMeasure;
use crate::space::{Coords, Metric, NetPoint, NetSpace, PointIndex};

/// Largest number of candidate bases examined by brute force.
pub const MAX_BASES: u128 = 5_000_000;
const VERTEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteExtremePoints {
    /// Each vertex as the selected fiber point per base point.
    pub vertices: Vec<Vec<PointIndex>>,
}

impl DiscreteExtremePoints {
    pub fn count(&self) -> usize {
        self.vertices.len()
    }
}

/// Brute-force vertex enumeration of `{w ≥ 0 : Σ_{y ∈ j⁻¹(x)} w_{x,y} = 1}`:
/// every choice of as many columns as there are base points is solved by
/// Gaussian elimination, and nonnegative basic solutions are kept. Each
/// vertex is checked to be a 0/1 selection.
pub fn enumerate_extreme_points_discrete(j: &NetMap) -> Result<DiscreteExtremePoints> {
    let fibers = j.fibers(0.0);
    if let Some(x) = fibers.iter().position(|f| f.is_empty()) {
        return Err(Error::EmptyFiber(x));
    }
    let columns: Vec<(usize, PointIndex)> =
        fibers.iter().enumerate().flat_map(|(x, f)| f.iter().map(move |y| (x, y))).collect();
    let rows = fibers.len();
    let bases = binomial(columns.len() as u128, rows as u128);
    if bases > MAX_BASES {
        return Err(Error::TooLarge(bases));
    }
    let mut vertices: Vec<Vec<PointIndex>> = Vec::new();
    let mut pick: Vec<usize> = (0..rows).collect();
    loop {
        if let Some(solution) = basic_solution(rows, &columns, &pick) {
            if solution.iter().all(|&v| v >= -VERTEX_TOL) {
                let mut selection = alloc::vec![usize::MAX; rows];
                for (k, &c) in pick.iter().enumerate() {
                    let (x, y) = columns[c];
                    let v = solution[k];
                    if libm::fabs(v - 1.0) <= VERTEX_TOL {
                        selection[x] = y;
                    } else if libm::fabs(v) > VERTEX_TOL {
                        return Err(Error::NonIntegralVertex(vertices.len()));
                    }
                }
                if let Some(x) = selection.iter().position(|&y| y == usize::MAX) {
                    return Err(Error::NonIntegralVertex(x));
                }
                if !vertices.contains(&selection) {
                    vertices.push(selection);
                }
            }
        }
        if !next_combination(&mut pick, columns.len()) {
            break;
        }
    }
    vertices.sort();
    Ok(DiscreteExtremePoints { vertices })
}

/// Solves `B w = 1` where column `c` of the constraint matrix has a single
/// one in row `columns[c].0`; `None` when the chosen columns are singular.
fn basic_solution(rows: usize, columns: &[(usize, PointIndex)], pick: &[usize]) -> Option<Vec<f64>> {
    let n = pick.len();
    let mut m = alloc::vec![0.0; rows * (n + 1)];
    for (k, &c) in pick.iter().enumerate() {
        m[columns[c].0 * (n + 1) + k] = 1.0;
    }
    for r in 0..rows {
        m[r * (n + 1) + n] = 1.0;
    }
    for col in 0..n {
        let pivot = (col..rows)
            .max_by(|&a, &b| libm::fabs(m[a * (n + 1) + col]).total_cmp(&libm::fabs(m[b * (n + 1) + col])))?;
        if libm::fabs(m[pivot * (n + 1) + col]) < 1e-12 {
            return None;
        }
        for k in 0..=n {
            m.swap(col * (n + 1) + k, pivot * (n + 1) + k);
        }
        let p = m[col * (n + 1) + col];
        for k in 0..=n {
            m[col * (n + 1) + k] /= p;
        }
        for r in 0..rows {
            if r != col {
                let f = m[r * (n + 1) + col];
                if f != 0.0 {
                    for k in 0..=n {
                        m[r * (n + 1) + k] -= f * m[col * (n + 1) + k];
                    }
                }
            }
        }
    }
    Some((0..n).map(|k| m[k * (n + 1) + n]).collect())
}

fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if pick[i] < n - k + i {
            pick[i] += 1;
            for t in i + 1..k {
                pick[t] = pick[t - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// The Dirac kernel of a selection; the declared modulus is recomputed
/// from the selection since the discrete regime carries no continuity
/// constraint.
pub fn vertex_kernel(j: &NetMap, selection: &[PointIndex]) -> Result<Kernel> {
    let measures =
        selection.iter().map(|&y| DiscreteMeasure::dirac(j.domain().clone(), y)).collect::<Result<Vec<_>>>()?;
    let provisional = Kernel::new(j.clone(), measures.clone(), 0.0)?;
    let modulus = provisional.recomputed_modulus()?;
    Kernel::new(j.clone(), measures, modulus)
}

/// A map with the given fiber sizes: base point `k` sits at `(k)` on the
/// line and its fiber is the column `(k, 0), (k, 1), …`.
pub fn fiber_instance(sizes: &[usize]) -> Result<NetMap> {
    if sizes.is_empty() {
        return Err(Error::EmptySpace);
    }
    if let Some(x) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::EmptyFiber(x));
    }
    let base_points = (0..sizes.len()).map(|k| NetPoint::new(k as u64, Coords::Real(alloc::vec![k as f64]))).collect();
    let base = Arc::new(NetSpace::new(base_points, Metric::Euclidean, 1.0, "fiber-instance-base")?);
    let mut total_points = Vec::new();
    let mut assignment = Vec::new();
    for (k, &s) in sizes.iter().enumerate() {
        for level in 0..s {
            total_points
                .push(NetPoint::new(total_points.len() as u64, Coords::Real(alloc::vec![k as f64, level as f64])));
            assignment.push(k);
        }
    }
    let total = Arc::new(NetSpace::new(total_points, Metric::Euclidean, 1.0, "fiber-instance")?);
    NetMap::new(total, base, assignment)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_two_three_two() {
        let j = fiber_instance(&[2, 3, 2]).unwrap();
        let e = enumerate_extreme_points_discrete(&j).unwrap();
        assert_eq!(e.count(), 12);
        for v in &e.vertices {
            assert!(vertex_kernel(&j, v).unwrap().is_extremal_candidate(0.0));
        }
    }

    #[test]
    fn singletons_and_an_edge() {
        assert_eq!(enumerate_extreme_points_discrete(&fiber_instance(&[1, 1, 1]).unwrap()).unwrap().count(), 1);
        assert_eq!(enumerate_extreme_points_discrete(&fiber_instance(&[1, 2, 1]).unwrap()).unwrap().count(), 2);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(20, 5), 15504);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut pick = alloc::vec![0, 1];
        let mut all = alloc::vec![pick.clone()];
        while next_combination(&mut pick, 4) {
            all.push(pick.clone());
        }
        assert_eq!(all.len(), 6);
        assert_eq!(all.last().unwrap(), &alloc::vec![2, 3]);
    }

    #[test]
    fn too_large_is_refused() {
        let j = fiber_instance(&[8; 12]).unwrap();
        assert!(matches!(enumerate_extreme_points_discrete(&j), Err(Error::TooLarge(_))));
    }
}
