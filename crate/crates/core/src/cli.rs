//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 no distinct packing
//! (or an invalid solution for `verify`), 3 timeout.

use std::fs;
use std::io::Write;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::bench::{run_bench, BenchOptions};
use crate::enumerate::{enumerate_patterns, EnumerationMode, PatternSet};
use crate::io::{
    detect_format, parse_instance, parse_solution_file, serialize_solution, InstanceFormat,
    NamedInstance, Overrides, SolutionJson,
};
use crate::model::{Instance, Packing};
use crate::oracle::{
    count_report, subset_sweep_solve, subset_sweep_solve_uncapped, OracleError, DEFAULT_SUBSET_CAP,
};
use crate::search::{solve_all, SearchConfig, SearchError};
use crate::verify::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_TIMEOUT: i32 = 3;

/// Environment variable holding the default worker count for `bench`.
pub const WORKERS_ENV: &str = "EXACTPACK_WORKERS";

const NO_PACKING: &str = "NO DISTINCT PACKING";

#[derive(Parser, Debug)]
#[command(
    name = "exactpack",
    version,
    about = "Exact distinct-bin packing: k bins of l items, each bin summing to the capacity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find a distinct packing.
    Solve(SolveArgs),
    /// Check a solution file against an instance.
    Verify(VerifyArgs),
    /// Print every bin pattern of an instance.
    Enumerate(PatternArgs),
    /// Print the pattern count and the number of k-subsets of patterns.
    Count(PatternArgs),
    /// Run the exhaustive subset sweep.
    Oracle(OracleArgs),
    /// Solve every instance in a directory and write a report.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct InstanceArgs {
    /// Instance file.
    #[arg(long)]
    instance: PathBuf,
    /// bpplib, falkenauer, list or auto.
    #[arg(long, default_value = "auto")]
    format: String,
    #[arg(long)]
    capacity: Option<u64>,
    #[arg(long = "per-bin")]
    per_bin: Option<usize>,
    #[arg(long)]
    bins: Option<usize>,
    /// Allow one item per bin, or a single bin.
    #[arg(long = "relaxed-bounds")]
    relaxed_bounds: bool,
    /// Problem identifier inside a multi-problem file (default: the first).
    #[arg(long)]
    problem: Option<String>,
}

#[derive(Args, Debug)]
struct ModeArg {
    /// distinct-values or multiplicity-bounded.
    #[arg(long, default_value = "distinct-values")]
    mode: EnumerationMode,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    mode: ModeArg,
    /// Report every packing, up to --limit.
    #[arg(long)]
    all: bool,
    #[arg(long)]
    limit: Option<NonZeroUsize>,
    /// Seconds; 0 disables the limit.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    solution: PathBuf,
}

#[derive(Args, Debug)]
struct PatternArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    mode: ModeArg,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    mode: ModeArg,
    /// Refuse when more subsets than this would be visited.
    #[arg(long, default_value_t = DEFAULT_SUBSET_CAP)]
    cap: u64,
    /// Ignore --cap.
    #[arg(long)]
    force: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    dir: PathBuf,
    /// Seconds per instance; 0 disables the limit.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    /// JSON report destination.
    #[arg(long)]
    report: PathBuf,
    /// Parallel workers (default from EXACTPACK_WORKERS, else 1).
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    mode: ModeArg,
    /// Force one format for all files instead of detecting it.
    #[arg(long)]
    format: Option<InstanceFormat>,
}

/// Failure carrying its exit code and message.
struct Exit {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Exit {
    Exit {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Runs the CLI with `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(&a, out, err),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Enumerate(a) => cmd_enumerate(&a, out),
        Command::Count(a) => cmd_count(&a, out),
        Command::Oracle(a) => cmd_oracle(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn io_exit(e: std::io::Error) -> Exit {
    usage(format!("write failed: {e}"))
}

fn timeout_arg(seconds: f64) -> Result<Option<Duration>, Exit> {
    if !seconds.is_finite() || seconds < 0.0 {
        return Err(usage(format!("invalid timeout {seconds}")));
    }
    Ok((seconds > 0.0).then(|| Duration::from_secs_f64(seconds)))
}

fn read_file(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn load_instance(args: &InstanceArgs) -> Result<NamedInstance, Exit> {
    let text = read_file(&args.instance)?;
    let format = if args.format == "auto" {
        detect_format(&text)
    } else {
        args.format.parse::<InstanceFormat>().map_err(usage)?
    };
    let overrides = Overrides {
        bins: args.bins,
        per_bin: args.per_bin,
        capacity: args.capacity,
        relaxed_bounds: args.relaxed_bounds,
    };
    let file = parse_instance(&text, format, &overrides)
        .map_err(|e| usage(format!("{}: {e}", args.instance.display())))?;
    let mut instances = file.instances.into_iter();
    let named = match &args.problem {
        Some(id) => instances
            .find(|n| &n.name == id)
            .ok_or_else(|| usage(format!("no problem named {id:?}")))?,
        None => instances
            .next()
            .ok_or_else(|| usage("instance file holds no problems"))?,
    };
    let report = named.instance.validate();
    if !report.is_valid() {
        return Err(usage(format!(
            "{}: instance is not feasible: {report}",
            named.name
        )));
    }
    Ok(named)
}

fn load_patterns(inst: &Instance, mode: EnumerationMode) -> Result<PatternSet, Exit> {
    enumerate_patterns(inst, mode).map_err(|e| usage(e.to_string()))
}

fn render_solutions(inst: &Instance, packings: &[Packing], json: bool) -> Result<String, Exit> {
    if json {
        let docs: Vec<SolutionJson<'_>> = packings
            .iter()
            .map(|p| SolutionJson::new(inst, p))
            .collect();
        let text = if docs.len() == 1 {
            serde_json::to_string_pretty(&docs[0])
        } else {
            serde_json::to_string_pretty(&docs)
        }
        .map_err(|e| usage(e.to_string()))?;
        return Ok(text + "\n");
    }
    let mut blocks = Vec::with_capacity(packings.len());
    for p in packings {
        blocks
            .push(serialize_solution(inst, p).map_err(|e| usage(format!("internal error: {e}")))?);
    }
    Ok(blocks.join("\n"))
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Exit> {
    let named = load_instance(&a.instance)?;
    let inst = &named.instance;
    let ps = load_patterns(inst, a.mode.mode)?;
    let cfg = SearchConfig {
        first_solution_only: !a.all,
        solution_limit: a.limit,
        timeout: timeout_arg(a.timeout)?,
        deterministic: true,
    };
    let packings = match solve_all(inst, &ps, &cfg) {
        Ok(p) => p,
        Err(SearchError::TimeoutExceeded { elapsed }) => {
            writeln!(
                err,
                "TIMEOUT after {:.3} s; feasibility unresolved",
                elapsed.as_secs_f64()
            )
            .map_err(io_exit)?;
            return Ok(EXIT_TIMEOUT);
        }
        Err(e) => return Err(usage(e.to_string())),
    };
    if packings.is_empty() {
        writeln!(out, "{NO_PACKING}").map_err(io_exit)?;
        return Ok(EXIT_INFEASIBLE);
    }
    let text = render_solutions(inst, &packings, a.json)?;
    match &a.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?,
        None => out.write_all(text.as_bytes()).map_err(io_exit)?,
    }
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, Exit> {
    let named = load_instance(&a.instance)?;
    let inst = &named.instance;
    let text = read_file(&a.solution)?;
    let sol =
        parse_solution_file(&text).map_err(|e| usage(format!("{}: {e}", a.solution.display())))?;
    let mut lines = Vec::new();
    if (sol.bins, sol.per_bin, sol.capacity) != (inst.bins(), inst.per_bin(), inst.capacity()) {
        lines.push(format!(
            "header: solution declares bins={} per_bin={} capacity={}, instance has bins={} per_bin={} capacity={}",
            sol.bins, sol.per_bin, sol.capacity, inst.bins(), inst.per_bin(), inst.capacity()
        ));
    }
    let report = verify(inst, &sol.packing);
    lines.extend(report.violations.iter().map(ToString::to_string));
    if lines.is_empty() {
        writeln!(out, "VALID").map_err(io_exit)?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "INVALID").map_err(io_exit)?;
        for l in lines {
            writeln!(out, "{l}").map_err(io_exit)?;
        }
        Ok(EXIT_INFEASIBLE)
    }
}

fn cmd_enumerate(a: &PatternArgs, out: &mut dyn Write) -> Result<i32, Exit> {
    let named = load_instance(&a.instance)?;
    let ps = load_patterns(&named.instance, a.mode.mode)?;
    out.write_all(ps.dump().as_bytes()).map_err(io_exit)?;
    Ok(EXIT_OK)
}

fn cmd_count(a: &PatternArgs, out: &mut dyn Write) -> Result<i32, Exit> {
    let named = load_instance(&a.instance)?;
    let ps = load_patterns(&named.instance, a.mode.mode)?;
    let report = count_report(&named.instance, &ps);
    writeln!(out, "patterns={}", report.pattern_count).map_err(io_exit)?;
    writeln!(out, "subsets={}", report.subset_count).map_err(io_exit)?;
    Ok(EXIT_OK)
}

fn cmd_oracle(a: &OracleArgs, out: &mut dyn Write) -> Result<i32, Exit> {
    let named = load_instance(&a.instance)?;
    let inst = &named.instance;
    let ps = load_patterns(inst, a.mode.mode)?;
    let outcome = if a.force {
        subset_sweep_solve_uncapped(inst, &ps)
    } else {
        subset_sweep_solve(inst, &ps, a.cap)
    };
    match outcome {
        Ok(outcome) => match outcome.packing() {
            Some(p) => {
                out.write_all(render_solutions(inst, std::slice::from_ref(p), false)?.as_bytes())
                    .map_err(io_exit)?;
                Ok(EXIT_OK)
            }
            None => {
                writeln!(out, "{NO_PACKING}").map_err(io_exit)?;
                Ok(EXIT_INFEASIBLE)
            }
        },
        Err(e @ OracleError::OracleTooLarge { .. }) => Err(usage(format!("{e} (or pass --force)"))),
        Err(e) => Err(usage(e.to_string())),
    }
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<i32, Exit> {
    let workers = match a.workers {
        Some(w) => w,
        None => match std::env::var(WORKERS_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| usage(format!("{WORKERS_ENV}={v:?} is not a worker count")))?,
            Err(_) => 1,
        },
    };
    let opts = BenchOptions {
        timeout: timeout_arg(a.timeout)?,
        workers: workers.max(1),
        mode: a.mode.mode,
        format: a.format,
        overrides: Overrides::default(),
    };
    let report = run_bench(&a.dir, &opts).map_err(|e| usage(e.to_string()))?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| usage(e.to_string()))?;
    fs::write(&a.report, json + "\n")
        .map_err(|e| usage(format!("cannot write {}: {e}", a.report.display())))?;
    out.write_all(report.table().as_bytes()).map_err(io_exit)?;
    Ok(EXIT_OK)
}
