use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use averaging_cli::emit::{emit_report, kernel_origin_label, summary_line};
use averaging_cli::problem::{export_json, gallery_instance, load_problem, LoadError, GALLERY};
use averaging_cli::{analyze_instance, run_gallery, write_outputs, Format, Overrides, Run};
use averaging_core::analysis::KernelOrigin;
use averaging_core::{Error, Resolution};
use clap::{Args, Parser, Subcommand, ValueEnum};

const USAGE: u8 = 1;
const VALIDATION: u8 = 2;

#[derive(Parser)]
#[command(name = "averaging", version, about = "Conditional-expectation kernels for net-scale surjections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a gallery instance: canonical, cantor, circle, identity, square.
    Gallery {
        name: String,
        #[command(flatten)]
        resolution: ResolutionArgs,
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Analyze a problem-definition file.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Write a gallery instance as a problem-definition file.
    Export {
        name: String,
        #[command(flatten)]
        resolution: ResolutionArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ResolutionArgs {
    /// Net spacing for the canonical, circle, identity and square instances.
    #[arg(long, conflicts_with = "depth")]
    mesh: Option<f64>,
    /// Net depth for the cantor instance.
    #[arg(long)]
    depth: Option<u32>,
}

impl ResolutionArgs {
    fn resolution(&self) -> Option<Resolution> {
        self.mesh.map(Resolution::Mesh).or(self.depth.map(Resolution::Depth))
    }
}

#[derive(Args)]
struct AnalysisArgs {
    /// Lipschitz bound for sections (default 2); for cantor also the
    /// constant of the mass-bound table (default 1).
    #[arg(long)]
    lipschitz: Option<f64>,
    /// Atoms at or below this weight are outside the support (default 0).
    #[arg(long)]
    atom_tol: Option<f64>,
    /// Fiber tolerance (default 0 for gallery instances, the codomain mesh
    /// for files without a `fiber_tol` field).
    #[arg(long)]
    fiber_tol: Option<f64>,
    /// Openness scale (default twice the codomain mesh).
    #[arg(long)]
    delta: Option<f64>,
    /// Openness ratio c in j(B(a, δ)) ⊇ B(j(a), cδ) (default 0.5).
    #[arg(long)]
    openness_ratio: Option<f64>,
    /// Milutin smoothing window (default the codomain mesh).
    #[arg(long)]
    smoothing: Option<f64>,
    /// Cap on sections and on admissible sets (default 64).
    #[arg(long)]
    max_sets: Option<usize>,
}

impl AnalysisArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            lipschitz: self.lipschitz,
            atom_tol: self.atom_tol,
            fiber_tol: self.fiber_tol,
            delta: self.delta,
            openness_ratio: self.openness_ratio,
            smoothing: self.smoothing,
            max_sets: self.max_sets,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Directory for report, kernels and tables; without it the report goes
    /// to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
}

impl OutputArgs {
    fn format(&self) -> Format {
        match self.format {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    match cli.command {
        Command::Gallery { name, resolution, analysis, output } => {
            if !GALLERY.contains(&name.as_str()) {
                return fail(USAGE, format!("unknown gallery `{name}`; known: {}", GALLERY.join(", ")));
            }
            match run_gallery(&name, resolution.resolution(), &analysis.overrides()) {
                Ok(run) => finish(&run, &output),
                Err(e) => core_failure(e),
            }
        }
        Command::Analyze { file, analysis, output } => {
            if !file.exists() {
                let shown = file.display().to_string();
                if GALLERY.contains(&shown.as_str()) {
                    return fail(
                        USAGE,
                        format!("`{shown}` is a gallery name, not a file; use `averaging gallery {shown}`"),
                    );
                }
            }
            let inst = match load_problem(&file) {
                Ok(inst) => inst,
                Err(e @ LoadError::Io { .. }) => return fail(USAGE, e.to_string()),
                Err(e) => return fail(VALIDATION, e.to_string()),
            };
            match analyze_instance(inst, &analysis.overrides()) {
                Ok(run) => finish(&run, &output),
                Err(e) => core_failure(e),
            }
        }
        Command::Export { name, resolution, out } => {
            if !GALLERY.contains(&name.as_str()) {
                return fail(USAGE, format!("unknown gallery `{name}`; known: {}", GALLERY.join(", ")));
            }
            let inst = match gallery_instance(&name, resolution.resolution()) {
                Ok(inst) => inst,
                Err(e) => return core_failure(e),
            };
            match fs::write(&out, export_json(&inst)) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(USAGE, format!("cannot write {}: {e}", out.display())),
            }
        }
    }
}

fn finish(run: &Run, output: &OutputArgs) -> ExitCode {
    let format = output.format();
    match &output.out {
        Some(dir) => match write_outputs(dir, run, format) {
            Ok(paths) => {
                for p in paths {
                    eprintln!("wrote {}", p.display());
                }
                println!("{}", summary_line(&run.report));
            }
            Err(e) => return fail(USAGE, e.to_string()),
        },
        None => print!("{}", emit_report(&run.instance.j, &run.report, format)),
    }
    let rejected: Vec<String> = run
        .report
        .kernels
        .iter()
        .filter(|k| matches!(k.origin, KernelOrigin::Supplied(_)) && !k.certificate.passes)
        .map(|k| kernel_origin_label(&k.origin))
        .collect();
    if !rejected.is_empty() {
        return fail(VALIDATION, format!("kernel validation failed: {}", rejected.join(", ")));
    }
    ExitCode::from(run.exit_code() as u8)
}

/// Bad parameters are usage errors; anything else the core rejects is a
/// validation failure.
fn core_failure(e: Error) -> ExitCode {
    let code = match e {
        Error::UnknownGallery(_)
        | Error::NonPositiveResolution(_)
        | Error::ResolutionKind { .. }
        | Error::Depth { .. }
        | Error::Parameter { .. }
        | Error::InvalidCoveringRadius(_) => USAGE,
        _ => VALIDATION,
    };
    fail(code, e.to_string())
}

fn fail(code: u8, message: String) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}
