use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gapbound_cli::instance::{merge_tolerances, Analysis, InstanceSpec};
use gapbound_cli::output::{write_run, write_sweep};
use gapbound_cli::sweep::{parse_range, sweep, Family};
use gapbound_cli::{run_instance, EXIT_FAILED, EXIT_OK, EXIT_SPEC};

#[derive(Parser)]
#[command(name = "gapbound", version, about = "Spectral gap bounds on homogeneous graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the analyses requested by a spec file.
    Run(RunArgs),
    /// As run, always including the bounds; fails if any bound slack is negative.
    Verify(RunArgs),
    /// Run one family over a range of sizes.
    Sweep(SweepArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Instance specification (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Tolerance overrides: a JSON file or an inline JSON object.
    #[arg(long)]
    tol: Option<String>,
}

#[derive(clap::Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Sizes as `a..=b`, `a..b` or a single `n`.
    #[arg(long)]
    range: String,
    /// Comma-separated analyses.
    #[arg(long, value_delimiter = ',', default_value = "bounds")]
    analyses: Vec<String>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    tol: Option<String>,
}

fn fail(code: i32, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("gapbound: {msg}");
    ExitCode::from(code as u8)
}

fn tolerance_record(arg: &str) -> Result<String, String> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(Path::new(arg)).map_err(|e| format!("cannot read tolerance record {arg}: {e}"))
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("GAPBOUND_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("GAPBOUND_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(args: RunArgs, force_bounds: bool) -> ExitCode {
    let mut spec = match InstanceSpec::from_file(&args.spec) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_SPEC, e),
    };
    if let Some(t) = &args.tol {
        match tolerance_record(t).and_then(|r| merge_tolerances(&spec.tolerances, &r).map_err(|e| e.to_string())) {
            Ok(t) => spec.tolerances = t,
            Err(e) => return fail(EXIT_SPEC, e),
        }
    }
    if force_bounds && !spec.analyses.contains(&Analysis::Bounds) {
        spec.analyses.push(Analysis::Bounds);
    }
    let inst = match spec.build() {
        Ok(i) => i,
        Err(e) => return fail(EXIT_SPEC, e),
    };
    let out = match run_instance(&inst) {
        Ok(o) => o,
        Err(e) => return fail(EXIT_FAILED, e),
    };
    if let Err(e) = write_run(&args.out, &out) {
        return fail(EXIT_FAILED, format!("cannot write {}: {e}", args.out.display()));
    }
    for c in out.report.failures() {
        eprintln!("FAIL {}: {}", c.name, c.detail.as_deref().unwrap_or(""));
    }
    if out.report.passed {
        ExitCode::from(EXIT_OK as u8)
    } else {
        ExitCode::from(EXIT_FAILED as u8)
    }
}

fn run_sweep(args: SweepArgs) -> ExitCode {
    let sizes = match parse_range(&args.range) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_SPEC, e),
    };
    let analyses: Result<Vec<Analysis>, _> = args
        .analyses
        .iter()
        .map(|a| serde_json::from_value(serde_json::Value::String(a.trim().to_string())))
        .collect();
    let analyses = match analyses {
        Ok(a) => a,
        Err(e) => return fail(EXIT_SPEC, format!("invalid analysis: {e}")),
    };
    let mut tolerances = gapbound_core::Tolerances::default();
    if let Some(t) = &args.tol {
        match tolerance_record(t).and_then(|r| merge_tolerances(&tolerances, &r).map_err(|e| e.to_string())) {
            Ok(t) => tolerances = t,
            Err(e) => return fail(EXIT_SPEC, e),
        }
    }
    let report = match sweep(args.family, &sizes, &analyses, &tolerances) {
        Ok(r) => r,
        Err(e @ gapbound_cli::sweep::SweepError::Spec { .. }) => return fail(EXIT_SPEC, e),
        Err(e) => return fail(EXIT_FAILED, e),
    };
    if let Err(e) = write_sweep(&args.out, &report) {
        return fail(EXIT_FAILED, format!("cannot write {}: {e}", args.out.display()));
    }
    for (row, r) in report.rows.iter().zip(&report.reports) {
        for c in r.failures() {
            eprintln!(
                "FAIL size {} {}: {}",
                row.size,
                c.name,
                c.detail.as_deref().unwrap_or("")
            );
        }
    }
    if report.passed {
        ExitCode::from(EXIT_OK as u8)
    } else {
        ExitCode::from(EXIT_FAILED as u8)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_SPEC as u8 } else { EXIT_OK as u8 });
        }
    };
    if let Err(e) = configure_threads() {
        return fail(EXIT_SPEC, e);
    }
    match cli.command {
        Command::Run(args) => run(args, false),
        Command::Verify(args) => run(args, true),
        Command::Sweep(args) => run_sweep(args),
    }
}
