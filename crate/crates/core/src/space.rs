//! ε-net models of compact metric spaces.
//!
//! A [`NetSpace`] is a finite set of points together with the metric of the
//! continuum it samples and a covering radius: every point of the ambient
//! model lies within `covering_radius` of some net point. Gallery builders
//! use the grid spacing as the covering radius, which is an upper bound on
//! the true covering radius.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Position of a point inside its [`NetSpace`].
pub type PointIndex = usize;

#[derive(Debug, Clone, PartialEq)]
pub enum Coords {
    /// Ambient coordinates in `ℝⁿ` (or an angle for circles).
    Real(Vec<f64>),
    /// A finite binary string, read as a cylinder of the Cantor set.
    Bits(Vec<bool>),
}

impl Coords {
    pub fn real(values: &[f64]) -> Self {
        Coords::Real(values.to_vec())
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match self {
            Coords::Real(v) => Some(v),
            Coords::Bits(_) => None,
        }
    }

    pub fn as_bits(&self) -> Option<&[bool]> {
        match self {
            Coords::Bits(b) => Some(b),
            Coords::Real(_) => None,
        }
    }

    fn dimension(&self) -> usize {
        match self {
            Coords::Real(v) => v.len(),
            Coords::Bits(b) => b.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetPoint {
    pub id: u64,
    pub coords: Coords,
}

impl NetPoint {
    pub fn new(id: u64, coords: Coords) -> Self {
        Self { id, coords }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Euclidean,
    /// `d(a, b) = Σᵢ |aᵢ − bᵢ| · 2^(−i)`, bits indexed from 1; missing bits
    /// count as zeros.
    Cantor,
    /// Arc length on a circle of the given circumference; coordinates are
    /// one-dimensional arc positions.
    Arc {
        circumference: f64,
    },
}

impl Metric {
    pub fn distance(&self, a: &Coords, b: &Coords) -> f64 {
        match (self, a, b) {
            (Metric::Euclidean, Coords::Real(a), Coords::Real(b)) => {
                let n = a.len().max(b.len());
                let sq: f64 = (0..n)
                    .map(|i| {
                        let d = a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0);
                        d * d
                    })
                    .sum();
                libm::sqrt(sq)
            }
            (Metric::Cantor, Coords::Bits(a), Coords::Bits(b)) => {
                let n = a.len().max(b.len());
                let mut scale = 1.0;
                let mut d = 0.0;
                for i in 0..n {
                    scale *= 0.5;
                    let ai = a.get(i).copied().unwrap_or(false);
                    let bi = b.get(i).copied().unwrap_or(false);
                    if ai != bi {
                        d += scale;
                    }
                }
                d
            }
            (Metric::Arc { circumference }, Coords::Real(a), Coords::Real(b)) => {
                let c = *circumference;
                let raw = libm::fabs(a.first().copied().unwrap_or(0.0) - b.first().copied().unwrap_or(0.0));
                let wrapped = raw - c * libm::floor(raw / c);
                wrapped.min(c - wrapped)
            }
            _ => f64::INFINITY,
        }
    }

    fn accepts(&self, coords: &Coords) -> bool {
        match (self, coords) {
            (Metric::Cantor, Coords::Bits(_)) => true,
            (Metric::Euclidean, Coords::Real(_)) => true,
            (Metric::Arc { .. }, Coords::Real(v)) => v.len() == 1,
            _ => false,
        }
    }
}

/// A sorted set of point indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointSet(Vec<PointIndex>);

impl PointSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    /// All indices `0..n`.
    pub fn full(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: PointIndex) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = PointIndex> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[PointIndex] {
        &self.0
    }

    pub fn without(&self, index: PointIndex) -> Self {
        Self(self.0.iter().copied().filter(|&i| i != index).collect())
    }

    pub fn union(&self, other: &PointSet) -> Self {
        self.iter().chain(other.iter()).collect()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.iter().all(|i| other.contains(i))
    }
}

impl FromIterator<PointIndex> for PointSet {
    fn from_iter<I: IntoIterator<Item = PointIndex>>(iter: I) -> Self {
        let mut v: Vec<PointIndex> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }
}

/// Resolution of a gallery instance: a mesh width for continua, a bit depth
/// for the Cantor set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resolution {
    Mesh(f64),
    Depth(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetSpace {
    points: Vec<NetPoint>,
    metric: Metric,
    covering_radius: f64,
    ambient: String,
    index: BTreeMap<u64, PointIndex>,
}

impl NetSpace {
    /// Validates ids, coordinate kinds and the covering radius.
    pub fn new(
        points: Vec<NetPoint>,
        metric: Metric,
        covering_radius: f64,
        ambient: impl Into<String>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySpace);
        }
        if !(covering_radius > 0.0 && covering_radius.is_finite()) {
            return Err(Error::InvalidCoveringRadius(covering_radius));
        }
        let dimension = points[0].coords.dimension();
        let mut index = BTreeMap::new();
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.id, i).is_some() {
                return Err(Error::DuplicatePointId(p.id));
            }
            if !metric.accepts(&p.coords) {
                return Err(Error::InvalidPoint { id: p.id, reason: "coordinates do not fit the metric" });
            }
            if p.coords.dimension() != dimension {
                return Err(Error::InvalidPoint {
                    id: p.id,
                    reason: "coordinate dimension differs from the first point",
                });
            }
            if let Coords::Real(v) = &p.coords {
                if v.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidPoint { id: p.id, reason: "non-finite coordinate" });
                }
            }
        }
        if let Metric::Arc { circumference } = metric {
            if !(circumference > 0.0 && circumference.is_finite()) {
                return Err(Error::Parameter {
                    name: "circumference",
                    requirement: "positive and finite",
                    value: circumference,
                });
            }
        }
        Ok(Self { points, metric, covering_radius, ambient: ambient.into(), index })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[NetPoint] {
        &self.points
    }

    pub fn point(&self, i: PointIndex) -> &NetPoint {
        &self.points[i]
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn covering_radius(&self) -> f64 {
        self.covering_radius
    }

    pub fn ambient(&self) -> &str {
        &self.ambient
    }

    pub fn index_of(&self, id: u64) -> Option<PointIndex> {
        self.index.get(&id).copied()
    }

    pub fn distance(&self, a: PointIndex, b: PointIndex) -> f64 {
        if a == b {
            return 0.0;
        }
        self.metric.distance(&self.points[a].coords, &self.points[b].coords)
    }

    pub fn distance_to(&self, a: PointIndex, coords: &Coords) -> f64 {
        self.metric.distance(&self.points[a].coords, coords)
    }

    /// Nearest net point; ties go to the lowest point id.
    pub fn nearest(&self, coords: &Coords) -> PointIndex {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = self.metric.distance(&p.coords, coords);
            if d < best_d || (d == best_d && p.id < self.points[best].id) {
                best = i;
                best_d = d;
            }
        }
        best
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                d = d.max(self.distance(a, b));
            }
        }
        d
    }

    /// Unordered pairs of grid neighbours: points within `1.5 ·
    /// covering_radius` of each other.
    pub fn adjacent_pairs(&self) -> Vec<(PointIndex, PointIndex)> {
        let reach = 1.5 * self.covering_radius;
        let mut pairs = Vec::new();
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                if self.distance(a, b) <= reach {
                    pairs.push((a, b));
                }
            }
        }
        pairs
    }

    pub fn neighbors(&self) -> Vec<Vec<PointIndex>> {
        let mut adj = alloc::vec![Vec::new(); self.len()];
        for (a, b) in self.adjacent_pairs() {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Largest violation of the metric axioms over a deterministic sample of
    /// at most `max_triples` triples; zero (up to rounding) for a metric.
    pub fn metric_axiom_violation(&self, max_triples: usize) -> f64 {
        let n = self.len();
        let total = (n as u128) * (n as u128) * (n as u128);
        let stride = core::cmp::max(1, (total / max_triples.max(1) as u128) as u64) as u128;
        let mut worst: f64 = 0.0;
        let mut t: u128 = 0;
        while t < total {
            let a = (t % n as u128) as usize;
            let b = ((t / n as u128) % n as u128) as usize;
            let c = (t / (n as u128 * n as u128)) as usize;
            let dab = self.distance(a, b);
            worst = worst.max(libm::fabs(dab - self.distance(b, a)));
            worst = worst.max(self.distance(a, a));
            worst = worst.max(-dab);
            worst = worst.max(dab - self.distance(a, c) - self.distance(c, b));
            t += stride;
        }
        worst
    }

    // ----- gallery -----

    /// Uniform grid on `[a, b]` with spacing at most `mesh`.
    pub fn interval(a: f64, b: f64, mesh: f64) -> Result<Self> {
        check_mesh(mesh)?;
        if !(b > a) {
            return Err(Error::OutOfRange { value: b, lo: a, hi: f64::INFINITY });
        }
        Self::interval_steps(a, b, steps_for(b - a, mesh))
    }

    /// Grid `a + k(b − a)/steps`, `k = 0..=steps`.
    pub fn interval_steps(a: f64, b: f64, steps: usize) -> Result<Self> {
        let steps = steps.max(1);
        let points =
            (0..=steps).map(|k| NetPoint::new(k as u64, Coords::Real(alloc::vec![grid(a, b, k, steps)]))).collect();
        Self::new(points, Metric::Euclidean, (b - a) / steps as f64, "interval")
    }

    /// The dyadic grid `{k / 2ⁿ : 0 ≤ k < 2ⁿ}` on `[0, 1]`, exactly the image
    /// of the depth-`n` Cantor net under the binary-expansion map.
    pub fn dyadic_grid(depth: u32) -> Result<Self> {
        check_depth(depth, 1)?;
        let n = 1usize << depth;
        let points = (0..n).map(|k| NetPoint::new(k as u64, Coords::Real(alloc::vec![k as f64 / n as f64]))).collect();
        Self::new(points, Metric::Euclidean, 1.0 / n as f64, "dyadic-grid")
    }

    /// `([0,2] × {0}) ∪ ([0,1] × {1})` in the plane. Bottom row first, then
    /// the top row, each by increasing abscissa.
    pub fn canonical_y(mesh: f64) -> Result<Self> {
        check_mesh(mesh)?;
        let n = steps_for(1.0, mesh);
        let mut points = Vec::with_capacity(3 * n + 2);
        for k in 0..=2 * n {
            points.push(NetPoint::new(points.len() as u64, Coords::Real(alloc::vec![k as f64 / n as f64, 0.0])));
        }
        for k in 0..=n {
            points.push(NetPoint::new(points.len() as u64, Coords::Real(alloc::vec![k as f64 / n as f64, 1.0])));
        }
        Self::new(points, Metric::Euclidean, 1.0 / n as f64, "canonical-Y")
    }

    /// All binary strings of length `depth`; the id of a string is its value
    /// as a binary numeral, first bit most significant.
    pub fn cantor(depth: u32) -> Result<Self> {
        check_depth(depth, 1)?;
        let n = 1usize << depth;
        let points = (0..n).map(|k| NetPoint::new(k as u64, Coords::Bits(bits_of(k, depth)))).collect();
        Self::new(points, Metric::Cantor, 1.0 / n as f64, "cantor")
    }

    /// Circle of circumference 2π with at least `2π / mesh` equally spaced
    /// points, arc-length metric.
    pub fn circle(mesh: f64) -> Result<Self> {
        check_mesh(mesh)?;
        Self::circle_points(steps_for(2.0 * PI, mesh))
    }

    pub fn circle_points(n: usize) -> Result<Self> {
        let n = n.max(1);
        let points = (0..n)
            .map(|k| NetPoint::new(k as u64, Coords::Real(alloc::vec![2.0 * PI * k as f64 / n as f64])))
            .collect();
        Self::new(points, Metric::Arc { circumference: 2.0 * PI }, 2.0 * PI / n as f64, "circle")
    }

    /// `[0,1]²` grid, column-major: the point `(i/n, k/n)` has id `i(n+1) + k`.
    pub fn square(mesh: f64) -> Result<Self> {
        check_mesh(mesh)?;
        let n = steps_for(1.0, mesh);
        let mut points = Vec::with_capacity((n + 1) * (n + 1));
        for i in 0..=n {
            for k in 0..=n {
                points.push(NetPoint::new(
                    points.len() as u64,
                    Coords::Real(alloc::vec![i as f64 / n as f64, k as f64 / n as f64]),
                ));
            }
        }
        Self::new(points, Metric::Euclidean, 1.0 / n as f64, "square")
    }
}

/// Structural equality with a pointer fast path.
pub fn same_space(a: &Arc<NetSpace>, b: &Arc<NetSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Builds one of the gallery spaces: `interval` (`[0,1]`), `canonical-Y`,
/// `cantor`, `circle`, `square`.
pub fn build_gallery_space(name: &str, resolution: Resolution) -> Result<NetSpace> {
    match (name, resolution) {
        ("interval", Resolution::Mesh(m)) => NetSpace::interval(0.0, 1.0, m),
        ("canonical-Y", Resolution::Mesh(m)) => NetSpace::canonical_y(m),
        ("circle", Resolution::Mesh(m)) => NetSpace::circle(m),
        ("square", Resolution::Mesh(m)) => NetSpace::square(m),
        ("cantor", Resolution::Depth(d)) => NetSpace::cantor(d),
        ("interval" | "canonical-Y" | "circle" | "square", Resolution::Depth(_)) => {
            Err(Error::ResolutionKind { name: name.to_string(), expected: "mesh" })
        }
        ("cantor", Resolution::Mesh(_)) => Err(Error::ResolutionKind { name: name.to_string(), expected: "depth" }),
        _ => Err(Error::UnknownGallery(name.to_string())),
    }
}

pub(crate) fn check_mesh(mesh: f64) -> Result<()> {
    if mesh > 0.0 && mesh.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveResolution(mesh))
    }
}

pub(crate) fn check_depth(depth: u32, min: u32) -> Result<()> {
    if depth < min {
        return Err(Error::Depth { min, got: depth });
    }
    if depth > 24 {
        return Err(Error::Parameter { name: "depth", requirement: "at most 24", value: depth as f64 });
    }
    Ok(())
}

fn steps_for(length: f64, mesh: f64) -> usize {
    let s = libm::ceil(length / mesh - 1e-9);
    if s < 1.0 {
        1
    } else {
        s as usize
    }
}

fn grid(a: f64, b: f64, k: usize, steps: usize) -> f64 {
    if k == steps {
        b
    } else {
        a + (b - a) * (k as f64 / steps as f64)
    }
}

pub(crate) fn bits_of(value: usize, depth: u32) -> Vec<bool> {
    (0..depth).map(|i| (value >> (depth - 1 - i)) & 1 == 1).collect()
}
