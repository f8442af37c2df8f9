//! The `cpbpv` command: argument handling, contract loading and reporting.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use cpbpv_core::report::ReportDocument;
use cpbpv_core::{explore, parse_program, substitute_params, Contract, ExecError, ExecOptions, SolverConfig};

pub const EXIT_CORRECT: i32 = 0;
pub const EXIT_POSTCONDITION: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "cpbpv", version, about = "Bounded program verifier over constraint stores")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify the function in a `.cpv` file.
    Verify(RunOptions),
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunOptions {
    /// Source file.
    pub source: PathBuf,
    /// Bind a symbolic bound, e.g. `N=8`.
    #[arg(long = "param", value_name = "NAME=INT", value_parser = parse_binding)]
    pub params: Vec<(String, i64)>,
    /// Integer width in bits (2 to 31).
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(2..=31))]
    pub bits: u32,
    /// Report values that may not fit in `bits` bits.
    #[arg(long)]
    pub check_overflow: bool,
    /// Decisions allowed on one path.
    #[arg(long, default_value_t = 10_000)]
    pub max_depth: usize,
    /// Search nodes allowed per satisfiability call.
    #[arg(long, default_value_t = 10_000_000)]
    pub node_budget: u64,
    /// Write a JSON report to this file (`-` for stdout, replacing the summary).
    #[arg(long, value_name = "OUT")]
    pub json: Option<PathBuf>,
    /// Directory of `.cpv` files whose functions serve as contracts.
    #[arg(long, value_name = "DIR")]
    pub contracts: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,
    /// Include wall-clock time in the report.
    #[arg(long)]
    pub timing: bool,
}

fn parse_binding(s: &str) -> Result<(String, i64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=INT, got `{s}`"))?;
    let value = value
        .trim()
        .parse()
        .map_err(|_| format!("`{value}` is not an integer"))?;
    Ok((name.trim().to_string(), value))
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn load_contracts(dir: &Path, bindings: &BTreeMap<String, i64>) -> Result<Vec<Contract>, Failure> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| usage(format!("cannot read {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cpv"))
        .collect();
    files.sort();
    let mut out = Vec::new();
    for path in files {
        let ast = parse_program(&read(&path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let ast = substitute_params(&ast, bindings).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        out.push(Contract::from(&ast.function));
        out.extend(ast.externs.iter().map(Contract::from));
    }
    Ok(out)
}

/// Run one verification and write the text report to `out`.
pub fn verify(opts: &RunOptions, out: &mut dyn Write) -> i32 {
    match verify_inner(opts, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(out, "error: {}", f.message);
            f.code
        }
    }
}

fn verify_inner(opts: &RunOptions, out: &mut dyn Write) -> Result<i32, Failure> {
    let started = Instant::now();
    let source = read(&opts.source)?;
    let ast = parse_program(&source).map_err(|e| usage(format!("{}: {e}", opts.source.display())))?;
    let bindings: BTreeMap<String, i64> = opts.params.iter().cloned().collect();
    let ast = substitute_params(&ast, &bindings).map_err(usage)?;
    let contracts = match &opts.contracts {
        Some(dir) => load_contracts(dir, &bindings)?,
        None => Vec::new(),
    };
    let exec = ExecOptions {
        solver: SolverConfig {
            bits: opts.bits,
            node_budget: opts.node_budget,
            ..SolverConfig::default()
        },
        check_overflow: opts.check_overflow,
        max_depth: opts.max_depth,
        jobs: opts.jobs as usize,
        record_paths: false,
    };
    let run = || explore(&ast, &contracts, &exec);
    let result = if opts.jobs > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs as usize)
            .build()
            .map_err(usage)?
            .install(run)
    } else {
        run()
    };
    let report = result.map_err(|e| Failure {
        code: match e {
            ExecError::DepthLimit { .. } | ExecError::Budget { .. } => EXIT_RESOURCE,
            _ => EXIT_USAGE,
        },
        message: e.to_string(),
    })?;
    let mut doc = ReportDocument::new(&report, &bindings, &exec);
    if opts.timing {
        doc.wall_time_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    match opts.json.as_deref() {
        Some(p) if p == Path::new("-") => {
            let _ = out.write_all(doc.to_json().as_bytes());
        }
        Some(p) => {
            let _ = out.write_all(doc.to_text().as_bytes());
            std::fs::write(p, doc.to_json()).map_err(|e| usage(format!("cannot write {}: {e}", p.display())))?
        }
        None => {
            let _ = out.write_all(doc.to_text().as_bytes());
        }
    }
    Ok(doc.exit_code)
}

/// Entry point shared by the binary and the tests. Returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => match cli.command {
            Command::Verify(opts) => verify(&opts, out),
        },
        Err(e) => {
            let _ = write!(out, "{e}");
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_CORRECT
            }
        }
    }
}
