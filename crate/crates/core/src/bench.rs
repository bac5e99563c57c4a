//! Batch runs over directories of instance files.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::enumerate::{enumerate_patterns, EnumerateError, EnumerationMode};
use crate::io::{detect_format, parse_problems, InstanceFormat, Overrides, RawProblem};
use crate::search::{solve, SearchConfig, SearchError, SolveOutcome};
use crate::verify::verify;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchOutcome {
    Solved,
    DistinctInfeasible,
    Timeout,
    OutOfScope,
}

impl BenchOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            BenchOutcome::Solved => "solved",
            BenchOutcome::DistinctInfeasible => "distinct-infeasible",
            BenchOutcome::Timeout => "timeout",
            BenchOutcome::OutOfScope => "out-of-scope",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub name: String,
    pub file: String,
    pub n: usize,
    pub k: Option<usize>,
    pub per_bin: Option<usize>,
    pub capacity: Option<u64>,
    pub pattern_count: Option<usize>,
    pub outcome: BenchOutcome,
    pub seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BenchSummary {
    pub total: usize,
    pub solved: usize,
    pub distinct_infeasible: usize,
    pub timeout: usize,
    pub out_of_scope: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub summary: BenchSummary,
}

impl BenchReport {
    pub fn from_rows(rows: Vec<BenchRow>) -> Self {
        let mut summary = BenchSummary {
            total: rows.len(),
            ..BenchSummary::default()
        };
        for row in &rows {
            match row.outcome {
                BenchOutcome::Solved => summary.solved += 1,
                BenchOutcome::DistinctInfeasible => summary.distinct_infeasible += 1,
                BenchOutcome::Timeout => summary.timeout += 1,
                BenchOutcome::OutOfScope => summary.out_of_scope += 1,
            }
        }
        BenchReport { rows, summary }
    }

    /// Plain-text table, one row per instance plus a summary line.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<24} {:>5} {:>5} {:>3} {:>8} {:>9} {:<20} {:>9}\n",
            "name", "n", "k", "l", "capacity", "patterns", "outcome", "seconds"
        );
        let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
        for r in &self.rows {
            out.push_str(&format!(
                "{:<24} {:>5} {:>5} {:>3} {:>8} {:>9} {:<20} {:>9.3}\n",
                r.name,
                r.n,
                opt(r.k.map(|v| v.to_string())),
                opt(r.per_bin.map(|v| v.to_string())),
                opt(r.capacity.map(|v| v.to_string())),
                opt(r.pattern_count.map(|v| v.to_string())),
                r.outcome.as_str(),
                r.seconds
            ));
        }
        let s = &self.summary;
        out.push_str(&format!(
            "total={} solved={} distinct-infeasible={} timeout={} out-of-scope={}\n",
            s.total, s.solved, s.distinct_infeasible, s.timeout, s.out_of_scope
        ));
        out
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{name}: solver returned a packing that fails verification: {detail}")]
    Unsound { name: String, detail: String },
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub timeout: Option<Duration>,
    pub workers: usize,
    pub mode: EnumerationMode,
    /// `None` detects the format per file.
    pub format: Option<InstanceFormat>,
    pub overrides: Overrides,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            timeout: Some(Duration::from_secs(60)),
            workers: 1,
            mode: EnumerationMode::DistinctValues,
            format: None,
            overrides: Overrides::default(),
        }
    }
}

struct Job {
    name: String,
    file: String,
    problem: Result<RawProblem, String>,
}

/// Solves every problem of every regular file in `dir` (sorted by file
/// name, hidden files skipped). Rows keep that order regardless of workers.
pub fn run_bench(dir: &Path, opts: &BenchOptions) -> Result<BenchReport, BenchError> {
    let read_err = |source| BenchError::Read {
        path: dir.to_path_buf(),
        source,
    };
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(read_err)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| !n.starts_with('.'))
        })
        .collect();
    files.sort();

    let mut jobs = Vec::new();
    for path in files {
        let text = fs::read_to_string(&path).map_err(|source| BenchError::Read {
            path: path.clone(),
            source,
        })?;
        let file = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let stem = path
            .file_stem()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| file.clone());
        let format = opts.format.unwrap_or_else(|| detect_format(&text));
        match parse_problems(&text, format) {
            Ok(problems) => {
                let single = problems.len() == 1;
                for p in problems {
                    let name = if single { stem.clone() } else { p.name.clone() };
                    jobs.push(Job {
                        name,
                        file: file.clone(),
                        problem: Ok(p),
                    });
                }
            }
            Err(e) => jobs.push(Job {
                name: stem,
                file,
                problem: Err(e.to_string()),
            }),
        }
    }

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<BenchRow, BenchError>>>> =
        Mutex::new((0..jobs.len()).map(|_| None).collect());
    let workers = opts.workers.clamp(1, jobs.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(i) else { break };
                let row = bench_job(job, opts);
                results.lock().expect("bench results lock")[i] = Some(row);
            });
        }
    });
    let rows = results
        .into_inner()
        .expect("bench results lock")
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BenchReport::from_rows(rows))
}

fn bench_job(job: &Job, opts: &BenchOptions) -> Result<BenchRow, BenchError> {
    match &job.problem {
        Ok(raw) => bench_problem(&job.name, &job.file, raw, opts),
        Err(detail) => Ok(BenchRow {
            name: job.name.clone(),
            file: job.file.clone(),
            n: 0,
            k: None,
            per_bin: None,
            capacity: None,
            pattern_count: None,
            outcome: BenchOutcome::OutOfScope,
            seconds: 0.0,
            detail: Some(detail.clone()),
        }),
    }
}

/// Solves one problem. A `Solved` row is only produced after the packing
/// verifies; a packing that fails verification is an error.
pub fn bench_problem(
    name: &str,
    file: &str,
    raw: &RawProblem,
    opts: &BenchOptions,
) -> Result<BenchRow, BenchError> {
    let started = Instant::now();
    let mut row = BenchRow {
        name: name.to_string(),
        file: file.to_string(),
        n: raw.sizes.len(),
        k: None,
        per_bin: None,
        capacity: opts.overrides.capacity.or(raw.capacity),
        pattern_count: None,
        outcome: BenchOutcome::OutOfScope,
        seconds: 0.0,
        detail: None,
    };
    let finish = |mut row: BenchRow| {
        row.seconds = started.elapsed().as_secs_f64();
        Ok(row)
    };

    let inst = match raw.derive(&opts.overrides) {
        Ok(named) => named.instance,
        Err(e) => {
            row.detail = Some(e.to_string());
            return finish(row);
        }
    };
    row.k = Some(inst.bins());
    row.per_bin = Some(inst.per_bin());
    row.capacity = Some(inst.capacity());

    let ps = match enumerate_patterns(&inst, opts.mode) {
        Ok(ps) => ps,
        Err(e @ (EnumerateError::InvalidInstance(_) | EnumerateError::PatternExplosion { .. })) => {
            row.detail = Some(e.to_string());
            return finish(row);
        }
    };
    row.pattern_count = Some(ps.len());

    let cfg = SearchConfig::default().with_timeout(opts.timeout);
    match solve(&inst, &ps, &cfg) {
        Ok(SolveOutcome::Packed(packing)) => {
            let report = verify(&inst, &packing);
            if !report.is_valid() {
                let detail = report
                    .violations
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; ");
                return Err(BenchError::Unsound {
                    name: name.to_string(),
                    detail,
                });
            }
            row.outcome = BenchOutcome::Solved;
        }
        Ok(SolveOutcome::NoDistinctPacking) => row.outcome = BenchOutcome::DistinctInfeasible,
        Err(SearchError::TimeoutExceeded { .. }) => row.outcome = BenchOutcome::Timeout,
        Err(e @ (SearchError::InvalidInstance(_) | SearchError::PatternSetMismatch)) => {
            row.detail = Some(e.to_string());
        }
    }
    finish(row)
}
