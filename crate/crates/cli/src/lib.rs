//! File formats, gallery instances and report output for `averaging-core`.

pub mod emit;
pub mod gallery;
pub mod problem;

pub use emit::Format;
pub use gallery::{analyze_instance, run_gallery, write_outputs, Overrides, Run};
pub use problem::{export_json, gallery_instance, load_problem, LoadError, ProblemInstance, GALLERY};
