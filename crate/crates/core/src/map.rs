//! Discretized continuous maps between net spaces.

use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::space::{check_depth, Coords, NetPoint, NetSpace, PointIndex, PointSet, Resolution};
use crate::NET_EPS;

/// A total assignment from domain points to codomain points.
#[derive(Debug, Clone, PartialEq)]
pub struct NetMap {
    domain: Arc<NetSpace>,
    codomain: Arc<NetSpace>,
    assignment: Vec<PointIndex>,
    lipschitz_estimate: f64,
}

impl NetMap {
    /// The Lipschitz estimate is the largest difference quotient over all
    /// domain pairs.
    pub fn new(domain: Arc<NetSpace>, codomain: Arc<NetSpace>, assignment: Vec<PointIndex>) -> Result<Self> {
        if assignment.len() != domain.len() {
            return Err(Error::AssignmentLength { expected: domain.len(), got: assignment.len() });
        }
        if let Some(&bad) = assignment.iter().find(|&&x| x >= codomain.len()) {
            return Err(Error::AssignmentTarget(bad));
        }
        let mut lipschitz_estimate: f64 = 0.0;
        for a in 0..assignment.len() {
            for b in a + 1..assignment.len() {
                let num = codomain.distance(assignment[a], assignment[b]);
                if num == 0.0 {
                    continue;
                }
                let den = domain.distance(a, b);
                lipschitz_estimate = lipschitz_estimate.max(if den > 0.0 { num / den } else { f64::INFINITY });
            }
        }
        Ok(Self { domain, codomain, assignment, lipschitz_estimate })
    }

    /// Sends each domain point to the codomain point nearest its analytic
    /// image.
    pub fn from_fn(domain: Arc<NetSpace>, codomain: Arc<NetSpace>, f: impl Fn(&NetPoint) -> Coords) -> Self {
        let assignment = domain.points().iter().map(|p| codomain.nearest(&f(p))).collect();
        Self::new(domain, codomain, assignment).expect("nearest points are in range")
    }

    pub fn identity(space: Arc<NetSpace>) -> Self {
        let assignment = (0..space.len()).collect();
        Self::new(space.clone(), space, assignment).expect("identity is total")
    }

    pub fn domain(&self) -> &Arc<NetSpace> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<NetSpace> {
        &self.codomain
    }

    pub fn assignment(&self) -> &[PointIndex] {
        &self.assignment
    }

    pub fn lipschitz_estimate(&self) -> f64 {
        self.lipschitz_estimate
    }

    pub fn apply(&self, y: PointIndex) -> PointIndex {
        self.assignment[y]
    }

    /// `{y : d(j(y), x) ≤ tol}`.
    pub fn fiber(&self, x: PointIndex, tol: f64) -> PointSet {
        (0..self.domain.len())
            .filter(|&y| {
                let jy = self.assignment[y];
                jy == x || self.codomain.distance(jy, x) <= tol
            })
            .collect()
    }

    /// All fibers at tolerance `tol`, indexed by base point.
    pub fn fibers(&self, tol: f64) -> Vec<PointSet> {
        if tol == 0.0 {
            let mut out = alloc::vec![Vec::new(); self.codomain.len()];
            for (y, &x) in self.assignment.iter().enumerate() {
                out[x].push(y);
            }
            return out.into_iter().map(|v| v.into_iter().collect()).collect();
        }
        (0..self.codomain.len()).map(|x| self.fiber(x, tol)).collect()
    }

    pub fn image(&self, set: &PointSet) -> PointSet {
        set.iter().map(|y| self.assignment[y]).collect()
    }

    /// `max_x d(x, j(Y))`; zero iff the map is onto the codomain net.
    pub fn surjectivity_defect(&self) -> f64 {
        self.surjectivity_defect_on(&PointSet::full(self.domain.len()))
    }

    /// Surjectivity defect of the restriction `j|_A`.
    pub fn surjectivity_defect_on(&self, set: &PointSet) -> f64 {
        let image = self.image(set);
        (0..self.codomain.len())
            .map(|x| {
                if image.contains(x) {
                    0.0
                } else {
                    image.iter().map(|p| self.codomain.distance(x, p)).fold(f64::INFINITY, f64::min)
                }
            })
            .fold(0.0, f64::max)
    }

    /// Shortfall of `j(B_A(a, δ))` covering `B_X(j(a), c·δ)` at the center
    /// `a`: the one-sided Hausdorff distance from the codomain ball to the
    /// image of the domain ball, less one codomain covering radius (a gap of
    /// one net step is below the resolution of the net).
    pub fn openness_defect_at(&self, set: &PointSet, center: PointIndex, delta: f64, ratio: f64) -> f64 {
        let image: PointSet = set
            .iter()
            .filter(|&a| self.domain.distance(center, a) <= delta + NET_EPS)
            .map(|a| self.assignment[a])
            .chain(core::iter::once(self.assignment[center]))
            .collect();
        let target = self.assignment[center];
        let radius = ratio * delta;
        let mut shortfall: f64 = 0.0;
        for x in 0..self.codomain.len() {
            if image.contains(x) || self.codomain.distance(target, x) > radius + NET_EPS {
                continue;
            }
            let gap = image.iter().map(|p| self.codomain.distance(x, p)).fold(f64::INFINITY, f64::min);
            shortfall = shortfall.max(gap);
        }
        let slack = self.codomain.covering_radius();
        if shortfall <= slack + NET_EPS {
            0.0
        } else {
            shortfall - slack
        }
    }

    /// Worst center and its openness defect over `A`.
    pub fn openness_defect_worst(&self, set: &PointSet, delta: f64, ratio: f64) -> Result<(f64, PointIndex)> {
        check_openness_params(delta, ratio)?;
        let mut worst = None;
        for a in set.iter() {
            let d = self.openness_defect_at(set, a, delta, ratio);
            match worst {
                Some((w, _)) if d <= w => {}
                _ => worst = Some((d, a)),
            }
        }
        worst.ok_or(Error::EmptySet)
    }

    pub fn openness_defect(&self, set: &PointSet, delta: f64, ratio: f64) -> Result<f64> {
        self.openness_defect_worst(set, delta, ratio).map(|(d, _)| d)
    }
}

fn check_openness_params(delta: f64, ratio: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Parameter { name: "delta", requirement: "positive", value: delta });
    }
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::Parameter { name: "openness ratio", requirement: "in (0, 1]", value: ratio });
    }
    Ok(())
}

/// Value of a finite binary string, `Σ aᵢ 2^(−i)`.
pub fn binary_value(bits: &[bool]) -> f64 {
    let mut scale = 1.0;
    let mut v = 0.0;
    for &b in bits {
        scale *= 0.5;
        if b {
            v += scale;
        }
    }
    v
}

/// Gallery maps: `canonical-projection`, `dyadic`, `identity`,
/// `square-projection`, `circle-doubling`.
pub fn build_gallery_map(name: &str, resolution: Resolution) -> Result<NetMap> {
    match (name, resolution) {
        ("canonical-projection", Resolution::Mesh(m)) => canonical_projection(m),
        ("identity", Resolution::Mesh(m)) => Ok(NetMap::identity(Arc::new(NetSpace::interval(0.0, 1.0, m)?))),
        ("square-projection", Resolution::Mesh(m)) => square_projection(m),
        ("circle-doubling", Resolution::Mesh(m)) => circle_doubling(m),
        ("dyadic", Resolution::Depth(d)) => dyadic(d),
        ("canonical-projection" | "identity" | "square-projection" | "circle-doubling", Resolution::Depth(_)) => {
            Err(Error::ResolutionKind { name: name.to_string(), expected: "mesh" })
        }
        ("dyadic", Resolution::Mesh(_)) => Err(Error::ResolutionKind { name: name.to_string(), expected: "depth" }),
        _ => Err(Error::UnknownGallery(name.to_string())),
    }
}

/// `(x, y) ↦ x` from the canonical `Y` onto `[0, 2]`.
pub fn canonical_projection(mesh: f64) -> Result<NetMap> {
    let y = Arc::new(NetSpace::canonical_y(mesh)?);
    let steps = libm::round(2.0 / y.covering_radius()) as usize;
    let x = Arc::new(NetSpace::interval_steps(0.0, 2.0, steps)?);
    Ok(NetMap::from_fn(y, x, |p| Coords::Real(alloc::vec![p.coords.as_real().expect("planar")[0]])))
}

/// `(x, y) ↦ x` from the unit square onto `[0, 1]`.
pub fn square_projection(mesh: f64) -> Result<NetMap> {
    let y = Arc::new(NetSpace::square(mesh)?);
    let steps = libm::round(1.0 / y.covering_radius()) as usize;
    let x = Arc::new(NetSpace::interval_steps(0.0, 1.0, steps)?);
    Ok(NetMap::from_fn(y, x, |p| Coords::Real(alloc::vec![p.coords.as_real().expect("planar")[0]])))
}

/// `θ ↦ 2θ` on the circle; `mesh` is the codomain spacing and the domain
/// net is twice as fine so that every codomain point has two preimages.
pub fn circle_doubling(mesh: f64) -> Result<NetMap> {
    let x = Arc::new(NetSpace::circle(mesh)?);
    let m = x.len();
    let y = Arc::new(NetSpace::circle_points(2 * m)?);
    let assignment = (0..2 * m).map(|i| i % m).collect();
    NetMap::new(y, x, assignment)
}

/// Binary expansion `(aₙ) ↦ Σ aₙ 2^(−n)` from the depth-`n` Cantor net onto
/// the dyadic grid.
pub fn dyadic(depth: u32) -> Result<NetMap> {
    let y = Arc::new(NetSpace::cantor(depth)?);
    let x = Arc::new(NetSpace::dyadic_grid(depth)?);
    Ok(NetMap::from_fn(y, x, |p| Coords::Real(alloc::vec![binary_value(p.coords.as_bits().expect("bits"))])))
}

/// Truncations to `depth` bits of the two preimages of `x` under the binary
/// expansion map: the expansion ending in zeros and the one ending in ones.
/// They coincide unless `x` is a dyadic rational in `(0, 1)` whose
/// expansion terminates within `depth` bits.
pub fn dyadic_branches(x: f64, depth: u32) -> Result<(NetPoint, NetPoint)> {
    check_depth(depth, 1)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange { value: x, lo: 0.0, hi: 1.0 });
    }
    let depth_usize = depth as usize;
    if x == 1.0 {
        let ones = alloc::vec![true; depth_usize];
        let p = NetPoint::new((1u64 << depth) - 1, Coords::Bits(ones));
        return Ok((p.clone(), p));
    }
    // Exact: doubling an f64 in [0, 1) never rounds.
    let mut digits = Vec::new();
    let mut r = x;
    while r != 0.0 {
        r *= 2.0;
        if r >= 1.0 {
            digits.push(true);
            r -= 1.0;
        } else {
            digits.push(false);
        }
    }
    let mut zero_tail = digits.clone();
    zero_tail.resize(depth_usize.max(digits.len()), false);
    let one_tail = if let Some(last) = digits.iter().rposition(|&b| b) {
        let mut v = digits.clone();
        v[last] = false;
        v.truncate(last + 1);
        v.resize(depth_usize.max(last + 1), true);
        v
    } else {
        zero_tail.clone()
    };
    Ok((truncated(&zero_tail, depth_usize), truncated(&one_tail, depth_usize)))
}

fn truncated(bits: &[bool], depth: usize) -> NetPoint {
    let bits = bits[..depth].to_vec();
    let id = bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
    NetPoint::new(id, Coords::Bits(bits))
}
