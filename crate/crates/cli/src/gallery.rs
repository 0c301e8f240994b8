//! Running the analysis on an instance and writing the output files.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use averaging_core::analysis::{cantor_mass_bound, uniqueness_report, AnalysisParams, UniquenessReport, Verdict};
use averaging_core::kernel::canonical_kernel;
use averaging_core::{Error, Resolution};

use crate::emit::{emit_report, fixed12, kernels_json, Format, Table};
use crate::problem::{gallery_instance, ProblemInstance, Provenance};

/// Command-line overrides of the analysis defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub lipschitz: Option<f64>,
    pub atom_tol: Option<f64>,
    pub fiber_tol: Option<f64>,
    pub delta: Option<f64>,
    pub openness_ratio: Option<f64>,
    pub smoothing: Option<f64>,
    pub max_sets: Option<usize>,
}

pub fn params_for(inst: &ProblemInstance, o: &Overrides) -> AnalysisParams {
    let mut p = AnalysisParams::defaults_for(&inst.j);
    p.fiber_tol = inst.effective_fiber_tol();
    if let Some(v) = o.lipschitz {
        p.lipschitz_bound = v;
    }
    if let Some(v) = o.atom_tol {
        p.atom_tol = v;
    }
    if let Some(v) = o.fiber_tol {
        p.fiber_tol = v;
    }
    if let Some(v) = o.delta {
        p.delta = v;
    }
    if let Some(v) = o.openness_ratio {
        p.openness_ratio = v;
    }
    if let Some(v) = o.smoothing {
        p.smoothing = v;
    }
    if let Some(v) = o.max_sets {
        p.max_sets = v;
    }
    p
}

fn check_params(p: &AnalysisParams) -> Result<(), Error> {
    let nonnegative = [("lipschitz", p.lipschitz_bound), ("atom-tol", p.atom_tol), ("fiber-tol", p.fiber_tol)];
    for (name, value) in nonnegative {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::Parameter { name, requirement: "nonnegative and finite", value });
        }
    }
    let positive = [("delta", p.delta), ("openness-ratio", p.openness_ratio), ("smoothing", p.smoothing)];
    for (name, value) in positive {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::Parameter { name, requirement: "positive and finite", value });
        }
    }
    Ok(())
}

/// The analysis of one instance plus any gallery tables.
#[derive(Debug, Clone)]
pub struct Run {
    pub instance: ProblemInstance,
    pub report: UniquenessReport,
    pub tables: Vec<Table>,
}

impl Run {
    /// 0 on a decided verdict, 3 when the verdict is inconclusive because a
    /// search cap was hit.
    pub fn exit_code(&self) -> i32 {
        if self.report.verdict == Verdict::Inconclusive && self.report.caps_hit {
            3
        } else {
            0
        }
    }
}

pub fn analyze_instance(inst: ProblemInstance, o: &Overrides) -> Result<Run, Error> {
    let params = params_for(&inst, o);
    check_params(&params)?;
    let report = uniqueness_report(&inst.j, &params, inst.refinement.as_ref(), &inst.kernels)?;
    Ok(Run { instance: inst, report, tables: Vec::new() })
}

/// Analyzes a gallery instance. `canonical` adds the table of its explicit
/// kernel's weights; `cantor` adds the mass bound over depths `4..=depth`
/// (from 2 when `depth < 4`) at Lipschitz constant 1 unless overridden.
pub fn run_gallery(name: &str, resolution: Option<Resolution>, o: &Overrides) -> Result<Run, Error> {
    let inst = gallery_instance(name, resolution)?;
    let resolution = match &inst.provenance {
        Provenance::Gallery { resolution, .. } => *resolution,
        Provenance::File(_) => unreachable!("gallery instances carry their resolution"),
    };
    let mut run = analyze_instance(inst, o)?;
    match (name, resolution) {
        ("canonical", Resolution::Mesh(m)) => run.tables.push(canonical_weights_table(m)?),
        ("cantor", Resolution::Depth(d)) => run.tables.push(cantor_table(d, o.lipschitz.unwrap_or(1.0))?),
        _ => {}
    }
    Ok(run)
}

/// Rows `(x, weight_lower, weight_upper)`: the weights the explicit
/// canonical kernel puts on `(x, 0)` and `(x, 1)`.
pub fn canonical_weights_table(mesh: f64) -> Result<Table, Error> {
    let k = canonical_kernel(mesh)?;
    let (base, total) = (k.base(), k.total());
    let mut rows = Vec::with_capacity(base.len());
    for x in 0..base.len() {
        let (mut lower, mut upper) = (0.0, 0.0);
        for &(y, w) in k.measure(x).atoms() {
            let height = total.point(y).coords.as_real().expect("planar")[1];
            if height == 0.0 {
                lower += w;
            } else {
                upper += w;
            }
        }
        let xv = base.point(x).coords.as_real().expect("interval")[0];
        rows.push(vec![fixed12(xv), fixed12(lower), fixed12(upper)]);
    }
    Ok(Table {
        file_name: "canonical_weights.csv".to_string(),
        header: vec!["x".into(), "weight_lower".into(), "weight_upper".into()],
        rows,
    })
}

pub fn cantor_depths(depth: u32) -> std::ops::RangeInclusive<u32> {
    if depth >= 4 {
        4..=depth
    } else {
        2..=depth.max(2)
    }
}

pub fn cantor_table(depth: u32, lipschitz: f64) -> Result<Table, Error> {
    let mut rows = Vec::new();
    for d in cantor_depths(depth) {
        let bound = cantor_mass_bound(d, lipschitz, 0.5)?;
        rows.push(vec![d.to_string(), fixed12(lipschitz), fixed12(bound)]);
    }
    Ok(Table {
        file_name: "cantor_mass_bound.csv".to_string(),
        header: vec!["depth".into(), "lipschitz".into(), "bound".into()],
        rows,
    })
}

#[derive(Debug, thiserror::Error)]
#[error("cannot write {path}: {source}")]
pub struct WriteError {
    pub path: PathBuf,
    pub source: io::Error,
}

/// Writes `report.<ext>`, `kernels.json` and the tables into `dir`,
/// creating it if needed. Returns the written paths in order.
pub fn write_outputs(dir: &Path, run: &Run, format: Format) -> Result<Vec<PathBuf>, WriteError> {
    let wrap = |path: &Path| {
        let path = path.to_path_buf();
        move |source| WriteError { path, source }
    };
    fs::create_dir_all(dir).map_err(wrap(dir))?;
    let mut files = vec![
        (dir.join(format!("report.{}", format.extension())), emit_report(&run.instance.j, &run.report, format)),
        (dir.join("kernels.json"), kernels_json(&run.report)),
    ];
    for t in &run.tables {
        files.push((dir.join(&t.file_name), t.to_csv()));
    }
    let mut written = Vec::with_capacity(files.len());
    for (path, body) in files {
        fs::write(&path, body).map_err(wrap(&path))?;
        written.push(path);
    }
    Ok(written)
}
