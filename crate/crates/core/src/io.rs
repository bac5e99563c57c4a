//! Instance and solution file formats.
//!
//! Instance formats:
//!
//! * `bpplib`: item count, capacity, then one size per line.
//! * `falkenauer`: problem count, then per problem an identifier line, a
//!   header `capacity count [best-known]` and one size per line.
//! * `list`: whitespace-separated sizes; capacity must come from overrides.
//!
//! Solutions are a header `bins=<k> per_bin=<l> capacity=<c>` followed by one
//! bin per line, sizes ascending, bins in lexicographic order.
//!
//! Only ASCII digits and whitespace are significant; carriage returns are
//! stripped.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::model::{BinPattern, Instance, Packing};
use crate::multiset::{Multiset, Size};
use crate::verify::{verify, VerifyReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstanceFormat {
    Bpplib,
    Falkenauer,
    List,
}

impl InstanceFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            InstanceFormat::Bpplib => "bpplib",
            InstanceFormat::Falkenauer => "falkenauer",
            InstanceFormat::List => "list",
        }
    }
}

impl fmt::Display for InstanceFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InstanceFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bpplib" => Ok(InstanceFormat::Bpplib),
            "falkenauer" => Ok(InstanceFormat::Falkenauer),
            "list" => Ok(InstanceFormat::List),
            other => Err(format!(
                "unknown format {other:?} (expected bpplib, falkenauer or list)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cannot derive instance parameters: {0}")]
    Derivation(String),
    #[error("packing does not verify against the instance ({} violations)", .0.violations.len())]
    InvalidPacking(VerifyReport),
}

fn parse_err(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        message: message.into(),
    }
}

/// Explicit parameters; any that are set win over the file and over
/// derivation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub bins: Option<usize>,
    pub per_bin: Option<usize>,
    pub capacity: Option<Size>,
    pub relaxed_bounds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedInstance {
    pub name: String,
    pub instance: Instance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub format: InstanceFormat,
    pub instances: Vec<NamedInstance>,
}

/// Non-blank lines with their 1-based numbers.
struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Split<'a, char>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.split('\n').enumerate(),
            last: 0,
        }
    }

    fn next_line(&mut self) -> Option<(usize, String)> {
        for (i, raw) in self.inner.by_ref() {
            let line: String = raw.chars().filter(|&c| c != '\r').collect();
            self.last = i + 1;
            if !line.trim().is_empty() {
                return Some((i + 1, line));
            }
        }
        None
    }

    fn expect_line(&mut self, what: &str) -> Result<(usize, String), IoError> {
        self.next_line().ok_or_else(|| {
            parse_err(
                self.last,
                format!("unexpected end of input, expected {what}"),
            )
        })
    }

    fn expect_end(&mut self) -> Result<(), IoError> {
        match self.next_line() {
            None => Ok(()),
            Some((line, _)) => Err(parse_err(line, "unexpected trailing data")),
        }
    }
}

fn parse_number<T: FromStr>(token: &str, line: usize, what: &str) -> Result<T, IoError> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(parse_err(
            line,
            format!("{what}: {token:?} is not a base-10 integer"),
        ));
    }
    token
        .parse()
        .map_err(|_| parse_err(line, format!("{what}: {token} is out of range")))
}

fn parse_size(token: &str, line: usize) -> Result<Size, IoError> {
    let v: Size = parse_number(token, line, "item size")?;
    if v == 0 {
        return Err(parse_err(line, "item size must be positive"));
    }
    Ok(v)
}

fn single_token<'l>(line_no: usize, line: &'l str, what: &str) -> Result<&'l str, IoError> {
    let mut tokens = line.split_ascii_whitespace();
    let first = tokens.next().unwrap_or_default();
    if tokens.next().is_some() {
        return Err(parse_err(line_no, format!("expected a single {what}")));
    }
    Ok(first)
}

fn read_sizes(lines: &mut Lines<'_>, count: usize) -> Result<Vec<Size>, IoError> {
    let mut sizes = Vec::with_capacity(count);
    for i in 0..count {
        let (line_no, line) = lines.expect_line(&format!("item size {} of {count}", i + 1))?;
        sizes.push(parse_size(
            single_token(line_no, &line, "item size")?,
            line_no,
        )?);
    }
    Ok(sizes)
}

/// A problem as read from a file, before `bins` and `per_bin` are derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawProblem {
    pub name: String,
    pub sizes: Vec<Size>,
    pub capacity: Option<Size>,
}

impl RawProblem {
    /// Resolves the instance parameters. `bins` and `per_bin` missing from
    /// `overrides` are derived as `sum / capacity` and `n / bins`, both of
    /// which must divide exactly.
    pub fn derive(&self, overrides: &Overrides) -> Result<NamedInstance, IoError> {
        let name = &self.name;
        let items =
            Multiset::from_values(&self.sizes).map_err(|e| IoError::Derivation(e.to_string()))?;
        let capacity = overrides
            .capacity
            .or(self.capacity)
            .ok_or_else(|| IoError::Derivation(format!("{name}: no capacity given")))?;
        if capacity == 0 {
            return Err(IoError::Derivation(format!(
                "{name}: capacity must be positive"
            )));
        }
        let n = items.total_count();
        let bins = match overrides.bins {
            Some(k) => k,
            None => {
                let sum = items.sum();
                if sum == 0 || sum % capacity as u128 != 0 {
                    return Err(IoError::Derivation(format!(
                        "{name}: item sum {sum} is not a positive multiple of capacity {capacity}"
                    )));
                }
                usize::try_from(sum / capacity as u128)
                    .map_err(|_| IoError::Derivation(format!("{name}: bin count overflows")))?
            }
        };
        let per_bin = match overrides.per_bin {
            Some(l) => l,
            None => {
                if bins == 0 || n % bins != 0 {
                    return Err(IoError::Derivation(format!(
                        "{name}: {n} items do not split evenly into {bins} bins"
                    )));
                }
                n / bins
            }
        };
        let instance = Instance::new(items, bins, per_bin, capacity)
            .with_relaxed_bounds(overrides.relaxed_bounds);
        Ok(NamedInstance {
            name: name.clone(),
            instance,
        })
    }
}

/// Parses an instance file and derives every problem's parameters.
pub fn parse_instance(
    text: &str,
    format: InstanceFormat,
    overrides: &Overrides,
) -> Result<InstanceFile, IoError> {
    let instances = parse_problems(text, format)?
        .iter()
        .map(|p| p.derive(overrides))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(InstanceFile { format, instances })
}

/// Syntax-only pass over an instance file.
pub fn parse_problems(text: &str, format: InstanceFormat) -> Result<Vec<RawProblem>, IoError> {
    let mut lines = Lines::new(text);
    let problems = match format {
        InstanceFormat::Bpplib => {
            let (l1, line) = lines.expect_line("item count")?;
            let n: usize = parse_number(single_token(l1, &line, "item count")?, l1, "item count")?;
            let (l2, line) = lines.expect_line("capacity")?;
            let capacity: Size =
                parse_number(single_token(l2, &line, "capacity")?, l2, "capacity")?;
            let sizes = read_sizes(&mut lines, n)?;
            lines.expect_end()?;
            vec![RawProblem {
                name: "instance".into(),
                sizes,
                capacity: Some(capacity),
            }]
        }
        InstanceFormat::Falkenauer => {
            let (l1, line) = lines.expect_line("problem count")?;
            let count: usize = parse_number(
                single_token(l1, &line, "problem count")?,
                l1,
                "problem count",
            )?;
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let (_, id) = lines.expect_line("problem identifier")?;
                let (lh, header) = lines.expect_line("problem header")?;
                let fields: Vec<&str> = header.split_ascii_whitespace().collect();
                if !(2..=3).contains(&fields.len()) {
                    return Err(parse_err(
                        lh,
                        "header must be `capacity count [best-known]`",
                    ));
                }
                // The third field (best known bin count) is ignored.
                let capacity: Size = parse_number(fields[0], lh, "capacity")?;
                let n: usize = parse_number(fields[1], lh, "item count")?;
                let sizes = read_sizes(&mut lines, n)?;
                out.push(RawProblem {
                    name: id.trim().to_string(),
                    sizes,
                    capacity: Some(capacity),
                });
            }
            lines.expect_end()?;
            out
        }
        InstanceFormat::List => {
            let mut sizes = Vec::new();
            while let Some((line_no, line)) = lines.next_line() {
                for token in line.split_ascii_whitespace() {
                    sizes.push(parse_size(token, line_no)?);
                }
            }
            vec![RawProblem {
                name: "instance".into(),
                sizes,
                capacity: None,
            }]
        }
    };
    Ok(problems)
}

/// Guesses the instance format: several numbers on the first line means a
/// list; a non-numeric second line means Falkenauer; otherwise BPPLIB.
pub fn detect_format(text: &str) -> InstanceFormat {
    let mut lines = Lines::new(text);
    let Some((_, first)) = lines.next_line() else {
        return InstanceFormat::List;
    };
    if first.split_ascii_whitespace().count() > 1 {
        return InstanceFormat::List;
    }
    match lines.next_line() {
        Some((_, second)) => {
            let numeric = second
                .split_ascii_whitespace()
                .all(|t| t.bytes().all(|b| b.is_ascii_digit()));
            if numeric {
                InstanceFormat::Bpplib
            } else {
                InstanceFormat::Falkenauer
            }
        }
        None => InstanceFormat::List,
    }
}

pub fn solution_header(inst: &Instance) -> String {
    format!(
        "bins={} per_bin={} capacity={}",
        inst.bins(),
        inst.per_bin(),
        inst.capacity()
    )
}

/// Writes the canonical text form of a verified packing.
pub fn serialize_solution(inst: &Instance, packing: &Packing) -> Result<String, IoError> {
    let report = verify(inst, packing);
    if !report.is_valid() {
        return Err(IoError::InvalidPacking(report));
    }
    let mut out = solution_header(inst);
    out.push('\n');
    for bin in packing.bins() {
        out.push_str(&bin.to_string());
        out.push('\n');
    }
    Ok(out)
}

/// A parsed solution file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionFile {
    pub bins: usize,
    pub per_bin: usize,
    pub capacity: Size,
    pub packing: Packing,
}

/// Reads a solution, canonicalizing bin and item order.
pub fn parse_solution(text: &str) -> Result<Packing, IoError> {
    parse_solution_file(text).map(|s| s.packing)
}

pub fn parse_solution_file(text: &str) -> Result<SolutionFile, IoError> {
    let mut lines = Lines::new(text);
    let (lh, header) = lines.expect_line("solution header")?;
    let (mut bins, mut per_bin, mut capacity) = (None, None, None);
    for field in header.split_ascii_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(lh, format!("malformed header field {field:?}")))?;
        let slot = match key {
            "bins" => &mut bins,
            "per_bin" => &mut per_bin,
            "capacity" => &mut capacity,
            other => return Err(parse_err(lh, format!("unknown header field {other:?}"))),
        };
        if slot.is_some() {
            return Err(parse_err(lh, format!("duplicate header field {key:?}")));
        }
        *slot = Some(parse_number::<u64>(value, lh, key)?);
    }
    let missing = |name| parse_err(lh, format!("header is missing {name}"));
    let bins = bins.ok_or_else(|| missing("bins"))? as usize;
    let per_bin = per_bin.ok_or_else(|| missing("per_bin"))? as usize;
    let capacity = capacity.ok_or_else(|| missing("capacity"))?;

    let mut patterns = Vec::with_capacity(bins);
    while let Some((line_no, line)) = lines.next_line() {
        let sizes = line
            .split_ascii_whitespace()
            .map(|t| parse_size(t, line_no))
            .collect::<Result<Vec<_>, _>>()?;
        if sizes.len() != per_bin {
            return Err(parse_err(
                line_no,
                format!("bin holds {} sizes, header says {per_bin}", sizes.len()),
            ));
        }
        patterns.push(BinPattern::new(sizes));
    }
    if patterns.len() != bins {
        return Err(parse_err(
            lh,
            format!("header says {bins} bins, found {}", patterns.len()),
        ));
    }
    Ok(SolutionFile {
        bins,
        per_bin,
        capacity,
        packing: Packing::new(patterns),
    })
}

/// JSON mirror of the text solution format.
#[derive(Debug, Clone, Serialize)]
pub struct SolutionJson<'a> {
    pub bins: usize,
    pub per_bin: usize,
    pub capacity: Size,
    pub packing: &'a Packing,
}

impl<'a> SolutionJson<'a> {
    pub fn new(inst: &Instance, packing: &'a Packing) -> Self {
        SolutionJson {
            bins: inst.bins(),
            per_bin: inst.per_bin(),
            capacity: inst.capacity(),
            packing,
        }
    }
}

pub fn solution_json(inst: &Instance, packing: &Packing) -> String {
    serde_json::to_string(&SolutionJson::new(inst, packing)).expect("solution serializes")
}
