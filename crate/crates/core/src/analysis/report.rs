//! The uniqueness report: sections, admissible sets and the kernels built
//! from them, with a verdict.

use alloc::string::String;
use alloc::vec::Vec;

use crate::analysis::admissible::{enumerate_admissible_sets, AdmissibleSearch, CandidateOrigin, OpennessScale};
use crate::analysis::milutin::milutin_kernel;
use crate::analysis::sections::{find_sections, SectionSearch};
use crate::error::Result;
use crate::kernel::{kernel_from_section, Kernel, KernelCertificate};
use crate::map::NetMap;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisParams {
    pub lipschitz_bound: f64,
    /// Fiber tolerance for section search and kernel validation.
    pub fiber_tol: f64,
    pub atom_tol: f64,
    pub delta: f64,
    pub openness_ratio: f64,
    pub smoothing: f64,
    pub max_sets: usize,
    /// Codomain covering radius; sets the distinctness threshold.
    pub mesh: f64,
}

impl AnalysisParams {
    /// Defaults for a map: `δ = 2·mesh`, ratio `0.5`, smoothing one mesh,
    /// Lipschitz bound 2, caps of 64.
    pub fn defaults_for(j: &NetMap) -> Self {
        let mesh = j.codomain().covering_radius();
        Self {
            lipschitz_bound: 2.0,
            fiber_tol: 0.0,
            atom_tol: 0.0,
            delta: 2.0 * mesh,
            openness_ratio: 0.5,
            smoothing: mesh,
            max_sets: 64,
            mesh,
        }
    }

    /// Kernels further apart than this in sup-bl count as distinct.
    pub fn distinct_threshold(&self) -> f64 {
        10.0 * (self.mesh + self.smoothing)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelOrigin {
    Section(usize),
    /// Milutin kernel over the admissible set with this index.
    Milutin(usize),
    /// Reweighted copy of the kernel with this index in the report.
    Tilted(usize),
    Supplied(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportedKernel {
    pub origin: KernelOrigin,
    pub kernel: Kernel,
    pub certificate: KernelCertificate,
    /// Fiber tolerance the certificate was computed at.
    pub fiber_tol: f64,
    pub extremal: bool,
    /// Distinctness class among valid kernels.
    pub class: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Unique,
    NonUnique,
    NoneFound,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Unique => "unique",
            Verdict::NonUnique => "non-unique",
            Verdict::NoneFound => "none-found",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessReport {
    pub params: AnalysisParams,
    pub sections: SectionSearch,
    pub admissible: AdmissibleSearch,
    pub kernels: Vec<ReportedKernel>,
    pub distinct_valid_kernels: usize,
    /// With exactly one admissible set: whether it is the graph of a found
    /// section, as it must be when the expectation is unique.
    pub unique_set_is_section_graph: Option<bool>,
    pub caps_hit: bool,
    pub verdict: Verdict,
}

/// Runs section search and admissible-set enumeration, builds the section
/// kernels, a Milutin kernel per remaining admissible set, one tilted copy
/// of the first valid non-extremal kernel and any supplied kernels,
/// validates all of them, and groups the valid ones by sup-bl distance.
///
/// The verdict is non-unique when two admissible sets or two distinct
/// valid kernels are exhibited; unique when there is one admissible set,
/// it is a section graph, one distinct kernel, and no cap was hit;
/// none-found when nothing was found; inconclusive otherwise.
pub fn uniqueness_report(
    j: &NetMap,
    params: &AnalysisParams,
    refinement: Option<&NetMap>,
    supplied: &[(String, Kernel)],
) -> Result<UniquenessReport> {
    let sections = find_sections(j, params.lipschitz_bound, params.fiber_tol, params.max_sets)?;
    let scale = OpennessScale { delta: params.delta, ratio: params.openness_ratio };
    let admissible = enumerate_admissible_sets(j, &sections.sections, scale, params.max_sets, refinement)?;

    let mut kernels = Vec::new();
    let atom_tol = params.atom_tol;
    for (i, s) in sections.sections.iter().enumerate() {
        record_kernel(
            &mut kernels,
            atom_tol,
            KernelOrigin::Section(i),
            kernel_from_section(&s.alpha, j, params.fiber_tol)?,
            params.fiber_tol,
        )?;
    }
    let milutin_tol = params.fiber_tol.max(params.smoothing);
    for (i, set) in admissible.sets.iter().enumerate() {
        if matches!(set.origin, CandidateOrigin::SectionGraph(_)) {
            continue;
        }
        if let Ok(k) = milutin_kernel(j, &set.points, params.smoothing) {
            record_kernel(&mut kernels, atom_tol, KernelOrigin::Milutin(i), k, milutin_tol)?;
        }
    }
    for (label, k) in supplied {
        record_kernel(&mut kernels, atom_tol, KernelOrigin::Supplied(label.clone()), k.clone(), params.fiber_tol)?;
    }
    if let Some(i) = kernels.iter().position(|k| k.certificate.passes && !k.extremal && k.kernel.is_normalized()) {
        let base = &kernels[i];
        let tilted = base.kernel.tilted(2.0, 0)?;
        let tol = base.fiber_tol;
        record_kernel(&mut kernels, atom_tol, KernelOrigin::Tilted(i), tilted, tol)?;
    }

    let threshold = params.distinct_threshold();
    let mut representatives: Vec<usize> = Vec::new();
    for i in 0..kernels.len() {
        if !kernels[i].certificate.passes {
            continue;
        }
        let mut class = None;
        for (c, &r) in representatives.iter().enumerate() {
            if !sup_bl_exceeds(&kernels[i].kernel, &kernels[r].kernel, threshold)? {
                class = Some(c);
                break;
            }
        }
        kernels[i].class = Some(class.unwrap_or_else(|| {
            representatives.push(i);
            representatives.len() - 1
        }));
    }
    let distinct_valid_kernels = representatives.len();
    let valid = kernels.iter().filter(|k| k.certificate.passes).count();

    let caps_hit = !sections.exhaustive || admissible.capped;
    let unique_set_is_section_graph = (admissible.sets.len() == 1).then(|| {
        let only = &admissible.sets[0].points;
        sections.sections.iter().any(|s| &s.graph() == only)
    });
    let verdict = if admissible.sets.len() >= 2 || distinct_valid_kernels >= 2 {
        Verdict::NonUnique
    } else if admissible.sets.is_empty() && valid == 0 && !caps_hit {
        Verdict::NoneFound
    } else if admissible.sets.len() == 1
        && distinct_valid_kernels == 1
        && !caps_hit
        && unique_set_is_section_graph == Some(true)
    {
        Verdict::Unique
    } else {
        Verdict::Inconclusive
    };
    Ok(UniquenessReport {
        params: params.clone(),
        sections,
        admissible,
        kernels,
        distinct_valid_kernels,
        unique_set_is_section_graph,
        caps_hit,
        verdict,
    })
}

fn record_kernel(
    kernels: &mut Vec<ReportedKernel>,
    atom_tol: f64,
    origin: KernelOrigin,
    kernel: Kernel,
    fiber_tol: f64,
) -> Result<()> {
    let certificate = kernel.validate(fiber_tol, atom_tol)?;
    let extremal = kernel.is_extremal_candidate(atom_tol);
    kernels.push(ReportedKernel { origin, kernel, certificate, fiber_tol, extremal, class: None });
    Ok(())
}

/// Whether `sup_x bl(μ_x, ν_x) > threshold`, skipping base points whose
/// total variation already rules it out.
pub fn sup_bl_exceeds(a: &Kernel, b: &Kernel, threshold: f64) -> Result<bool> {
    for x in 0..a.base().len() {
        let (m, n) = (a.measure(x), b.measure(x));
        if m.total_variation(n)? <= threshold {
            continue;
        }
        if m.bl_distance(n)? > threshold {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `sup_x bl(μ_x, ν_x)`.
pub fn sup_bl_distance(a: &Kernel, b: &Kernel) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in 0..a.base().len() {
        worst = worst.max(a.measure(x).bl_distance(b.measure(x))?);
    }
    Ok(worst)
}
