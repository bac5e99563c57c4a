//! Independent check of a claimed packing against an instance.

use std::fmt;

use serde::Serialize;

use crate::model::{Instance, Packing};
use crate::multiset::multiset_equal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    BinCount,
    BinLength,
    BinSum,
    DuplicateBins,
    SpreadMismatch,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::BinCount => "bin-count",
            ViolationKind::BinLength => "bin-length",
            ViolationKind::BinSum => "bin-sum",
            ViolationKind::DuplicateBins => "duplicate-bins",
            ViolationKind::SpreadMismatch => "spread-mismatch",
        }
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn kinds(&self) -> Vec<ViolationKind> {
        self.violations.iter().map(|v| v.kind).collect()
    }

    fn push(&mut self, kind: ViolationKind, detail: String) {
        self.violations.push(Violation { kind, detail });
    }
}

/// Checks, in order: bin count, bin lengths, bin sums, pairwise distinct
/// bins, and that the bins spread to exactly the instance's items. Every
/// violation is reported.
pub fn verify(inst: &Instance, packing: &Packing) -> VerifyReport {
    let mut report = VerifyReport::default();
    let bins = packing.bins();

    if bins.len() != inst.bins() {
        report.push(
            ViolationKind::BinCount,
            format!("expected {} bins, found {}", inst.bins(), bins.len()),
        );
    }
    for (i, bin) in bins.iter().enumerate() {
        if bin.len() != inst.per_bin() {
            report.push(
                ViolationKind::BinLength,
                format!(
                    "bin {i} ({bin}) holds {} items, expected {}",
                    bin.len(),
                    inst.per_bin()
                ),
            );
        }
    }
    for (i, bin) in bins.iter().enumerate() {
        let sum = bin.sum();
        if sum != inst.capacity() as u128 {
            report.push(
                ViolationKind::BinSum,
                format!(
                    "bin {i} ({bin}) sums to {sum}, expected {}",
                    inst.capacity()
                ),
            );
        }
    }
    // Bins are sorted, so equal bins are adjacent.
    let mut i = 0;
    while i < bins.len() {
        let mut j = i + 1;
        while j < bins.len() && bins[j] == bins[i] {
            j += 1;
        }
        if j - i > 1 {
            report.push(
                ViolationKind::DuplicateBins,
                format!("bin ({}) appears {} times", bins[i], j - i),
            );
        }
        i = j;
    }
    let spread = packing.spread();
    if !multiset_equal(&spread, inst.items()) {
        report.push(ViolationKind::SpreadMismatch, spread_diff(inst, packing));
    }
    report
}

fn spread_diff(inst: &Instance, packing: &Packing) -> String {
    let spread = packing.spread();
    let mut values: Vec<_> = spread
        .extracted_set()
        .into_iter()
        .chain(inst.items().extracted_set())
        .collect();
    values.sort_unstable();
    values.dedup();
    let parts: Vec<String> = values
        .into_iter()
        .filter_map(|v| {
            let packed = spread.multiplicity(v);
            let wanted = inst.items().multiplicity(v);
            (packed != wanted).then(|| format!("{v}: packed {packed}, items {wanted}"))
        })
        .collect();
    parts.join(", ")
}
