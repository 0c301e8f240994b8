//! Classification of kernels: sections, admissible sets, transversals,
//! Milutin kernels, discrete extreme points and the Cantor experiment.

pub mod admissible;
pub mod cantor;
pub mod extreme;
pub mod milutin;
pub mod report;
pub mod sections;
pub mod transversals;

pub use admissible::{
    certify, enumerate_admissible_sets, prune_point, AdmissibleSearch, CandidateOrigin, CandidateSet, OpennessScale,
    PruneRejection,
};
pub use cantor::{cantor_mass_bound, identity_mass_bound, kernel_mass_bound, mass_bound_program};
pub use extreme::{enumerate_extreme_points_discrete, fiber_instance, vertex_kernel, DiscreteExtremePoints};
pub use milutin::{hausdorff, hausdorff_one_sided, milutin_kernel};
pub use report::{
    sup_bl_distance, sup_bl_exceeds, uniqueness_report, AnalysisParams, KernelOrigin, ReportedKernel, UniquenessReport,
    Verdict,
};
pub use sections::{find_sections, SectionCandidate, SectionSearch};
pub use transversals::{minimal_surjective_transversals, TransversalSearch};
