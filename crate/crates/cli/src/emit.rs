//! Deterministic report, kernel and table output. Numbers are written as
//! fixed-point decimals rounded to 12 significant digits; sets and kernels
//! are listed by point id.

use std::fmt::Write as _;

use averaging_core::analysis::{CandidateOrigin, KernelOrigin, UniquenessReport};
use averaging_core::{NetMap, NetSpace, PointSet};
use serde::ser::{Serialize, Serializer};
use serde_json::value::RawValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// `v` rounded to 12 significant digits, in positional notation without
/// trailing zeros. Non-finite values print as `inf`, `-inf` or `nan`.
pub fn fixed12(v: f64) -> String {
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exponent) = sci.split_once('e').expect("exponent form");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let point = exponent + 1;
    let mut out = String::new();
    if v < 0.0 {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-point) as usize));
        out.push_str(&digits);
    } else if point as usize >= digits.len() {
        out.push_str(&digits);
        out.extend(std::iter::repeat_n('0', point as usize - digits.len()));
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    out
}

/// A number serialized through [`fixed12`].
#[derive(Debug, Clone, Copy)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            RawValue::from_string(fixed12(self.0)).expect("decimal literal").serialize(serializer)
        } else {
            serializer.serialize_str(&fixed12(self.0))
        }
    }
}

#[derive(serde::Serialize)]
struct ReportJson {
    verdict: &'static str,
    caps_hit: bool,
    sections_found: usize,
    sections_exhaustive: bool,
    admissible_sets_found: usize,
    admissible_capped: bool,
    refinement_rejections: usize,
    kernels_built: usize,
    valid_kernels: usize,
    distinct_valid_kernels: usize,
    unique_set_is_section_graph: Option<bool>,
    map: MapJson,
    params: ParamsJson,
    sections: Vec<SectionJson>,
    admissible_sets: Vec<SetJson>,
    kernels: Vec<KernelSummaryJson>,
}

#[derive(serde::Serialize)]
struct MapJson {
    x_ambient: String,
    x_points: usize,
    x_covering_radius: Num,
    y_ambient: String,
    y_points: usize,
    y_covering_radius: Num,
    lipschitz_estimate: Num,
    surjectivity_defect: Num,
}

#[derive(serde::Serialize)]
struct ParamsJson {
    lipschitz: Num,
    fiber_tol: Num,
    atom_tol: Num,
    delta: Num,
    openness_ratio: Num,
    smoothing: Num,
    max_sets: usize,
    mesh: Num,
    distinct_threshold: Num,
}

#[derive(serde::Serialize)]
struct SectionJson {
    lipschitz_bound: Num,
    section_defect: Num,
    /// `(x id, α(x) id)` pairs.
    values: Vec<(u64, u64)>,
}

#[derive(serde::Serialize)]
struct SetJson {
    origin: String,
    size: usize,
    surjectivity_defect: Num,
    openness_defect: Num,
    minimal: bool,
    points: Vec<u64>,
}

#[derive(serde::Serialize)]
struct KernelSummaryJson {
    origin: String,
    valid: bool,
    extremal: bool,
    class: Option<usize>,
    normalized: bool,
    fiber_tol: Num,
    declared_modulus: Num,
    recomputed_modulus: Num,
    fiber_violation: Num,
    normalization_drift: Num,
    mass_min: Num,
    mass_max: Num,
    support_size: usize,
}

fn ids(space: &NetSpace, set: &PointSet) -> Vec<u64> {
    set.iter().map(|i| space.point(i).id).collect()
}

pub fn set_origin_label(origin: &CandidateOrigin, y: &NetSpace) -> String {
    match origin {
        CandidateOrigin::FullSpace => "full-space".to_string(),
        CandidateOrigin::SectionGraph(i) => format!("section-graph {i}"),
        CandidateOrigin::Pruned { removed } => format!("pruned {}", y.point(*removed).id),
    }
}

pub fn kernel_origin_label(origin: &KernelOrigin) -> String {
    match origin {
        KernelOrigin::Section(i) => format!("section {i}"),
        KernelOrigin::Milutin(i) => format!("milutin set {i}"),
        KernelOrigin::Tilted(i) => format!("tilted kernel {i}"),
        KernelOrigin::Supplied(label) => format!("supplied {label}"),
    }
}

fn map_json(j: &NetMap) -> MapJson {
    let (x, y) = (j.codomain(), j.domain());
    MapJson {
        x_ambient: x.ambient().to_string(),
        x_points: x.len(),
        x_covering_radius: Num(x.covering_radius()),
        y_ambient: y.ambient().to_string(),
        y_points: y.len(),
        y_covering_radius: Num(y.covering_radius()),
        lipschitz_estimate: Num(j.lipschitz_estimate()),
        surjectivity_defect: Num(j.surjectivity_defect()),
    }
}

fn report_json_value(j: &NetMap, r: &UniquenessReport) -> ReportJson {
    let p = &r.params;
    let (x, y) = (j.codomain(), j.domain());
    ReportJson {
        verdict: r.verdict.as_str(),
        caps_hit: r.caps_hit,
        sections_found: r.sections.sections.len(),
        sections_exhaustive: r.sections.exhaustive,
        admissible_sets_found: r.admissible.sets.len(),
        admissible_capped: r.admissible.capped,
        refinement_rejections: r.admissible.failed_refinement,
        kernels_built: r.kernels.len(),
        valid_kernels: r.kernels.iter().filter(|k| k.certificate.passes).count(),
        distinct_valid_kernels: r.distinct_valid_kernels,
        unique_set_is_section_graph: r.unique_set_is_section_graph,
        map: map_json(j),
        params: ParamsJson {
            lipschitz: Num(p.lipschitz_bound),
            fiber_tol: Num(p.fiber_tol),
            atom_tol: Num(p.atom_tol),
            delta: Num(p.delta),
            openness_ratio: Num(p.openness_ratio),
            smoothing: Num(p.smoothing),
            max_sets: p.max_sets,
            mesh: Num(p.mesh),
            distinct_threshold: Num(p.distinct_threshold()),
        },
        sections: r
            .sections
            .sections
            .iter()
            .map(|s| SectionJson {
                lipschitz_bound: Num(s.lipschitz_bound),
                section_defect: Num(s.section_defect),
                values: (0..x.len()).map(|i| (x.point(i).id, y.point(s.alpha.apply(i)).id)).collect(),
            })
            .collect(),
        admissible_sets: r
            .admissible
            .sets
            .iter()
            .map(|s| SetJson {
                origin: set_origin_label(&s.origin, y),
                size: s.points.len(),
                surjectivity_defect: Num(s.surjectivity_defect),
                openness_defect: Num(s.openness_defect),
                minimal: s.minimal,
                points: ids(y, &s.points),
            })
            .collect(),
        kernels: r
            .kernels
            .iter()
            .map(|k| {
                let mass = k.kernel.mass_function();
                KernelSummaryJson {
                    origin: kernel_origin_label(&k.origin),
                    valid: k.certificate.passes,
                    extremal: k.extremal,
                    class: k.class,
                    normalized: k.kernel.is_normalized(),
                    fiber_tol: Num(k.fiber_tol),
                    declared_modulus: Num(k.certificate.declared_modulus),
                    recomputed_modulus: Num(k.certificate.recomputed_modulus),
                    fiber_violation: Num(k.certificate.fiber_violation),
                    normalization_drift: Num(k.certificate.normalization_drift),
                    mass_min: Num(mass.iter().copied().fold(f64::INFINITY, f64::min)),
                    mass_max: Num(mass.iter().copied().fold(0.0, f64::max)),
                    support_size: k.kernel.union_of_supports(p.atom_tol).len(),
                }
            })
            .collect(),
    }
}

/// The structured report.
pub fn report_json(j: &NetMap, r: &UniquenessReport) -> String {
    let mut s = serde_json::to_string_pretty(&report_json_value(j, r)).expect("report serializes");
    s.push('\n');
    s
}

/// The report as `key,value` rows. Counts are always present, zero
/// included.
pub fn report_csv(j: &NetMap, r: &UniquenessReport) -> String {
    let v = report_json_value(j, r);
    let opt = |b: Option<bool>| b.map_or("none".to_string(), |b| b.to_string());
    let rows: Vec<(&str, String)> = vec![
        ("verdict", v.verdict.to_string()),
        ("caps_hit", v.caps_hit.to_string()),
        ("sections_found", v.sections_found.to_string()),
        ("sections_exhaustive", v.sections_exhaustive.to_string()),
        ("admissible_sets_found", v.admissible_sets_found.to_string()),
        ("admissible_capped", v.admissible_capped.to_string()),
        ("refinement_rejections", v.refinement_rejections.to_string()),
        ("kernels_built", v.kernels_built.to_string()),
        ("valid_kernels", v.valid_kernels.to_string()),
        ("distinct_valid_kernels", v.distinct_valid_kernels.to_string()),
        ("unique_set_is_section_graph", opt(v.unique_set_is_section_graph)),
        ("x_points", v.map.x_points.to_string()),
        ("y_points", v.map.y_points.to_string()),
        ("lipschitz_estimate", fixed12(v.map.lipschitz_estimate.0)),
        ("surjectivity_defect", fixed12(v.map.surjectivity_defect.0)),
        ("lipschitz", fixed12(v.params.lipschitz.0)),
        ("fiber_tol", fixed12(v.params.fiber_tol.0)),
        ("atom_tol", fixed12(v.params.atom_tol.0)),
        ("delta", fixed12(v.params.delta.0)),
        ("openness_ratio", fixed12(v.params.openness_ratio.0)),
        ("smoothing", fixed12(v.params.smoothing.0)),
        ("max_sets", v.params.max_sets.to_string()),
        ("mesh", fixed12(v.params.mesh.0)),
        ("distinct_threshold", fixed12(v.params.distinct_threshold.0)),
    ];
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"]).expect("in-memory write");
    for (k, val) in rows {
        w.write_record([k, val.as_str()]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn emit_report(j: &NetMap, r: &UniquenessReport, format: Format) -> String {
    match format {
        Format::Json => report_json(j, r),
        Format::Csv => report_csv(j, r),
    }
}

#[derive(serde::Serialize)]
struct KernelJson {
    origin: String,
    normalized: bool,
    declared_modulus: Num,
    measures: Vec<MeasureJson>,
}

#[derive(serde::Serialize)]
struct MeasureJson {
    x: u64,
    atoms: Vec<(u64, Num)>,
}

/// Every kernel of the report as per-base-point atom lists, base points and
/// atoms in id order.
pub fn kernels_json(r: &UniquenessReport) -> String {
    let list: Vec<KernelJson> = r
        .kernels
        .iter()
        .map(|k| {
            let (base, total) = (k.kernel.base(), k.kernel.total());
            let mut measures: Vec<MeasureJson> = (0..base.len())
                .map(|x| {
                    let mut atoms: Vec<(u64, Num)> =
                        k.kernel.measure(x).atoms().iter().map(|&(y, w)| (total.point(y).id, Num(w))).collect();
                    atoms.sort_by_key(|a| a.0);
                    MeasureJson { x: base.point(x).id, atoms }
                })
                .collect();
            measures.sort_by_key(|m| m.x);
            KernelJson {
                origin: kernel_origin_label(&k.origin),
                normalized: k.kernel.is_normalized(),
                declared_modulus: Num(k.kernel.continuity_modulus()),
                measures,
            }
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&list).expect("kernels serialize");
    s.push('\n');
    s
}

/// A plot-ready table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file_name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

/// One line per verdict-relevant count, for terminals.
pub fn summary_line(r: &UniquenessReport) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "verdict={} sections_found={} admissible_sets={} distinct_valid_kernels={} caps_hit={}",
        r.verdict.as_str(),
        r.sections.sections.len(),
        r.admissible.sets.len(),
        r.distinct_valid_kernels,
        r.caps_hit
    );
    s
}
