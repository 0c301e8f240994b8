//! Problem instances: the gallery and the JSON problem-definition format.
//!
//! A problem file has two spaces and a map:
//!
//! ```json
//! {
//!   "X": { "ambient": "interval", "metric": { "kind": "euclidean" }, "covering_radius": 0.25,
//!          "points": [ { "id": 0, "coords": [0.0] }, ... ] },
//!   "Y": { ... },
//!   "j": { "assignment": { "0": 0, "1": 1, ... } }
//! }
//! ```
//!
//! Cantor points carry their coordinates as a bit string such as `"0110"`.
//! Optional fields: `fiber_tol`, `surjectivity_tol` (default 0), a
//! `refinement` holding another `X`, `Y`, `j` triple, and `kernels`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use averaging_core::kernel::canonical_kernel;
use averaging_core::map::{build_gallery_map, canonical_projection, dyadic};
use averaging_core::{Coords, DiscreteMeasure, Error, Kernel, Metric, NetMap, NetPoint, NetSpace, Resolution};
use serde::{Deserialize, Serialize};

/// Gallery instance names accepted by `gallery` and `export`.
pub const GALLERY: [&str; 5] = ["canonical", "cantor", "circle", "identity", "square"];

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Gallery { name: String, resolution: Resolution },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    /// `j: Y → X`; `Y` is the domain and `X` the codomain.
    pub j: NetMap,
    /// The same problem one step finer, used to re-certify admissible sets.
    pub refinement: Option<NetMap>,
    /// `None` means the codomain covering radius.
    pub fiber_tol: Option<f64>,
    pub surjectivity_tol: f64,
    pub kernels: Vec<(String, Kernel)>,
    pub provenance: Provenance,
}

impl ProblemInstance {
    pub fn x_space(&self) -> &Arc<NetSpace> {
        self.j.codomain()
    }

    pub fn y_space(&self) -> &Arc<NetSpace> {
        self.j.domain()
    }

    pub fn effective_fiber_tol(&self) -> f64 {
        self.fiber_tol.unwrap_or_else(|| self.x_space().covering_radius())
    }
}

pub fn default_resolution(name: &str) -> Option<Resolution> {
    match name {
        "canonical" | "square" => Some(Resolution::Mesh(0.25)),
        "identity" | "circle" => Some(Resolution::Mesh(0.1)),
        "cantor" => Some(Resolution::Depth(8)),
        _ => None,
    }
}

/// Builds a gallery instance with its one-step refinement. Gallery maps
/// are exact by construction, so the fiber tolerance is 0, except for the
/// Cantor map whose fibers are read at the grid step.
pub fn gallery_instance(name: &str, resolution: Option<Resolution>) -> Result<ProblemInstance, Error> {
    let resolution = match resolution {
        Some(r) => r,
        None => default_resolution(name).ok_or_else(|| Error::UnknownGallery(name.to_string()))?,
    };
    let (j, refinement, fiber_tol, kernels) = match (name, resolution) {
        ("canonical", Resolution::Mesh(m)) => {
            let j = canonical_projection(m)?;
            let fine = canonical_projection(m / 2.0)?;
            (j, fine, 0.0, vec![("canonical".to_string(), canonical_kernel(m)?)])
        }
        ("cantor", Resolution::Depth(d)) => {
            let j = dyadic(d)?;
            let fine = dyadic(d + 1)?;
            (j, fine, grid_step(d), Vec::new())
        }
        ("identity" | "square" | "circle", Resolution::Mesh(m)) => {
            let core_name = core_map_name(name);
            let j = build_gallery_map(core_name, Resolution::Mesh(m))?;
            let fine = build_gallery_map(core_name, Resolution::Mesh(m / 2.0))?;
            (j, fine, 0.0, Vec::new())
        }
        ("cantor", Resolution::Mesh(_)) => {
            return Err(Error::ResolutionKind { name: name.to_string(), expected: "depth" });
        }
        ("canonical" | "identity" | "square" | "circle", Resolution::Depth(_)) => {
            return Err(Error::ResolutionKind { name: name.to_string(), expected: "mesh" });
        }
        _ => return Err(Error::UnknownGallery(name.to_string())),
    };
    Ok(ProblemInstance {
        j,
        refinement: Some(refinement),
        fiber_tol: Some(fiber_tol),
        surjectivity_tol: 0.0,
        kernels,
        provenance: Provenance::Gallery { name: name.to_string(), resolution },
    })
}

fn core_map_name(name: &str) -> &'static str {
    match name {
        "identity" => "identity",
        "square" => "square-projection",
        "circle" => "circle-doubling",
        "canonical" => "canonical-projection",
        _ => "dyadic",
    }
}

fn grid_step(depth: u32) -> f64 {
    1.0 / (1u64 << depth) as f64
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("Y point {id} is not assigned by j")]
    Unassigned { id: u64 },
    #[error("j assigns unknown Y point {id}")]
    UnknownSource { id: u64 },
    #[error("j sends Y point {y} to unknown X point {x}")]
    UnknownTarget { y: u64, x: u64 },
    #[error("j is not surjective: X point {id} at {coords} is {defect} away from the image (tolerance {tol})")]
    NotSurjective { id: u64, coords: String, defect: f64, tol: f64 },
    #[error("kernel `{label}`: {message}")]
    Kernel { label: String, message: String },
    #[error("{0}")]
    Core(#[from] Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(rename = "X")]
    pub x: SpaceFile,
    #[serde(rename = "Y")]
    pub y: SpaceFile,
    pub j: MapFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surjectivity_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement: Option<Box<TripleFile>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kernels: Vec<KernelFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleFile {
    #[serde(rename = "X")]
    pub x: SpaceFile,
    #[serde(rename = "Y")]
    pub y: SpaceFile,
    pub j: MapFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    #[serde(default)]
    pub ambient: String,
    pub metric: MetricFile,
    pub covering_radius: f64,
    pub points: Vec<PointFile>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MetricFile {
    Euclidean,
    Cantor,
    Arc { circumference: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointFile {
    pub id: u64,
    pub coords: CoordsFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoordsFile {
    Real(Vec<f64>),
    Bits(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    /// `Y` point id to `X` point id.
    pub assignment: BTreeMap<u64, u64>,
}

/// A kernel by point ids: one atom list per base point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelFile {
    pub label: String,
    pub normalized: bool,
    pub declared_modulus: f64,
    pub measures: Vec<MeasureFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub x: u64,
    pub atoms: Vec<(u64, f64)>,
}

pub fn space_to_file(space: &NetSpace) -> SpaceFile {
    SpaceFile {
        ambient: space.ambient().to_string(),
        metric: match space.metric() {
            Metric::Euclidean => MetricFile::Euclidean,
            Metric::Cantor => MetricFile::Cantor,
            Metric::Arc { circumference } => MetricFile::Arc { circumference },
        },
        covering_radius: space.covering_radius(),
        points: space.points().iter().map(|p| PointFile { id: p.id, coords: coords_to_file(&p.coords) }).collect(),
    }
}

fn coords_to_file(c: &Coords) -> CoordsFile {
    match c {
        Coords::Real(v) => CoordsFile::Real(v.clone()),
        Coords::Bits(b) => CoordsFile::Bits(b.iter().map(|&bit| if bit { '1' } else { '0' }).collect()),
    }
}

fn map_to_file(j: &NetMap) -> MapFile {
    let (y, x) = (j.domain(), j.codomain());
    MapFile { assignment: (0..y.len()).map(|i| (y.point(i).id, x.point(j.apply(i)).id)).collect() }
}

pub fn kernel_to_file(label: &str, k: &Kernel) -> KernelFile {
    let (base, total) = (k.base(), k.total());
    KernelFile {
        label: label.to_string(),
        normalized: k.is_normalized(),
        declared_modulus: k.continuity_modulus(),
        measures: (0..base.len())
            .map(|x| MeasureFile {
                x: base.point(x).id,
                atoms: k.measure(x).atoms().iter().map(|&(y, w)| (total.point(y).id, w)).collect(),
            })
            .collect(),
    }
}

pub fn instance_to_file(inst: &ProblemInstance) -> ProblemFile {
    ProblemFile {
        x: space_to_file(inst.x_space()),
        y: space_to_file(inst.y_space()),
        j: map_to_file(&inst.j),
        fiber_tol: inst.fiber_tol,
        surjectivity_tol: Some(inst.surjectivity_tol),
        refinement: inst.refinement.as_ref().map(|r| {
            Box::new(TripleFile { x: space_to_file(r.codomain()), y: space_to_file(r.domain()), j: map_to_file(r) })
        }),
        kernels: inst.kernels.iter().map(|(label, k)| kernel_to_file(label, k)).collect(),
    }
}

/// Serializes with full `f64` precision so that loading reproduces the
/// instance exactly.
pub fn export_json(inst: &ProblemInstance) -> String {
    let mut s = serde_json::to_string_pretty(&instance_to_file(inst)).expect("problem files serialize");
    s.push('\n');
    s
}

pub fn load_problem(path: &Path) -> Result<ProblemInstance, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })?;
    let mut inst = parse_problem(&text)?;
    inst.provenance = Provenance::File(path.to_path_buf());
    Ok(inst)
}

pub fn parse_problem(text: &str) -> Result<ProblemInstance, LoadError> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| LoadError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    instance_from_file(&file)
}

pub fn instance_from_file(file: &ProblemFile) -> Result<ProblemInstance, LoadError> {
    let surjectivity_tol = file.surjectivity_tol.unwrap_or(0.0);
    check_tolerance("surjectivity_tol", surjectivity_tol)?;
    if let Some(t) = file.fiber_tol {
        check_tolerance("fiber_tol", t)?;
    }
    let j = triple_from_file(&file.x, &file.y, &file.j, surjectivity_tol)?;
    let refinement = match &file.refinement {
        Some(r) => Some(triple_from_file(&r.x, &r.y, &r.j, surjectivity_tol)?),
        None => None,
    };
    let kernels = file
        .kernels
        .iter()
        .map(|k| Ok((k.label.clone(), kernel_from_file(k, &j)?)))
        .collect::<Result<Vec<_>, LoadError>>()?;
    Ok(ProblemInstance {
        j,
        refinement,
        fiber_tol: file.fiber_tol,
        surjectivity_tol,
        kernels,
        provenance: Provenance::File(PathBuf::new()),
    })
}

fn check_tolerance(field: &str, value: f64) -> Result<(), LoadError> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(LoadError::Field { field: field.to_string(), message: format!("must be nonnegative, got {value}") })
    }
}

fn triple_from_file(x: &SpaceFile, y: &SpaceFile, j: &MapFile, surjectivity_tol: f64) -> Result<NetMap, LoadError> {
    let x = Arc::new(space_from_file(x, "X")?);
    let y = Arc::new(space_from_file(y, "Y")?);
    for &id in j.assignment.keys() {
        if y.index_of(id).is_none() {
            return Err(LoadError::UnknownSource { id });
        }
    }
    let mut assignment = Vec::with_capacity(y.len());
    for p in y.points() {
        let target = *j.assignment.get(&p.id).ok_or(LoadError::Unassigned { id: p.id })?;
        assignment.push(x.index_of(target).ok_or(LoadError::UnknownTarget { y: p.id, x: target })?);
    }
    let map = NetMap::new(y, x.clone(), assignment)?;
    let image = map.image(&averaging_core::PointSet::full(map.domain().len()));
    let mut worst: Option<(f64, usize)> = None;
    for xi in 0..x.len() {
        let gap = image.iter().map(|i| x.distance(xi, i)).fold(f64::INFINITY, f64::min);
        if worst.is_none_or(|(d, _)| gap > d) {
            worst = Some((gap, xi));
        }
    }
    if let Some((defect, xi)) = worst {
        if defect > surjectivity_tol {
            let p = x.point(xi);
            return Err(LoadError::NotSurjective {
                id: p.id,
                coords: coords_label(&p.coords),
                defect,
                tol: surjectivity_tol,
            });
        }
    }
    Ok(map)
}

pub fn coords_label(c: &Coords) -> String {
    match c {
        Coords::Real(v) => {
            let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
            if parts.len() == 1 {
                parts[0].clone()
            } else {
                format!("({})", parts.join(", "))
            }
        }
        Coords::Bits(b) => b.iter().map(|&bit| if bit { '1' } else { '0' }).collect(),
    }
}

fn space_from_file(s: &SpaceFile, name: &str) -> Result<NetSpace, LoadError> {
    let metric = match s.metric {
        MetricFile::Euclidean => Metric::Euclidean,
        MetricFile::Cantor => Metric::Cantor,
        MetricFile::Arc { circumference } => Metric::Arc { circumference },
    };
    let mut points = Vec::with_capacity(s.points.len());
    for (i, p) in s.points.iter().enumerate() {
        let coords = match &p.coords {
            CoordsFile::Real(v) => Coords::Real(v.clone()),
            CoordsFile::Bits(bits) => {
                let parsed: Option<Vec<bool>> = bits
                    .chars()
                    .map(|c| match c {
                        '0' => Some(false),
                        '1' => Some(true),
                        _ => None,
                    })
                    .collect();
                Coords::Bits(parsed.ok_or_else(|| LoadError::Field {
                    field: format!("{name}.points[{i}].coords"),
                    message: format!("bit string `{bits}` may only contain 0 and 1"),
                })?)
            }
        };
        points.push(NetPoint::new(p.id, coords));
    }
    NetSpace::new(points, metric, s.covering_radius, s.ambient.clone())
        .map_err(|e| LoadError::Field { field: name.to_string(), message: e.to_string() })
}

fn kernel_from_file(k: &KernelFile, j: &NetMap) -> Result<Kernel, LoadError> {
    let fail = |message: String| LoadError::Kernel { label: k.label.clone(), message };
    let (base, total) = (j.codomain(), j.domain());
    let mut measures: Vec<Option<DiscreteMeasure>> = vec![None; base.len()];
    for m in &k.measures {
        let x = base.index_of(m.x).ok_or_else(|| fail(format!("unknown X point {}", m.x)))?;
        if measures[x].is_some() {
            return Err(fail(format!("X point {} listed twice", m.x)));
        }
        let atoms = m
            .atoms
            .iter()
            .map(|&(id, w)| Ok((total.index_of(id).ok_or_else(|| fail(format!("unknown Y point {id}")))?, w)))
            .collect::<Result<Vec<_>, LoadError>>()?;
        measures[x] = Some(DiscreteMeasure::new(total.clone(), atoms).map_err(|e| fail(e.to_string()))?);
    }
    let measures = measures
        .into_iter()
        .enumerate()
        .map(|(x, m)| m.ok_or_else(|| fail(format!("no measure for X point {}", base.point(x).id))))
        .collect::<Result<Vec<_>, LoadError>>()?;
    let built = if k.normalized {
        Kernel::new(j.clone(), measures, k.declared_modulus)
    } else {
        Kernel::nonnegative(j.clone(), measures, k.declared_modulus)
    };
    built.map_err(|e| fail(e.to_string()))
}
