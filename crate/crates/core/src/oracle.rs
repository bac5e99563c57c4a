//! Reference solvers used to cross-check the search, and exact subset
//! counting.
//!
//! [`subset_sweep_solve`] walks every `k`-subset of the pattern set in
//! lexicographic index order and compares each spread with the items.
//! [`brute_force_assign`] ignores patterns altogether and assigns items to
//! bins directly. Neither is meant to scale.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::enumerate::{EnumerationMode, PatternSet};
use crate::model::{spread, BinPattern, Instance, Packing, ValidationReport};
use crate::multiset::{multiset_equal, Size};
use crate::search::SolveOutcome;

/// Default limit on the number of subsets the literal procedure may visit.
pub const DEFAULT_SUBSET_CAP: u64 = 10_000_000;

/// Largest item count [`brute_force_assign`] accepts.
pub const BRUTE_FORCE_MAX_ITEMS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance is not feasible: {0}")]
    InvalidInstance(ValidationReport),
    #[error("pattern set was not enumerated from this instance")]
    PatternSetMismatch,
    #[error("{subsets} subsets exceed the cap of {cap}; use the pruned search instead")]
    OracleTooLarge { subsets: BigUint, cap: u64 },
    #[error("{items} items exceed the brute-force limit of {max}")]
    InstanceTooLarge { items: usize, max: usize },
}

/// Exact binomial coefficient; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Pattern count and number of `k`-subsets of the pattern set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountReport {
    pub pattern_count: usize,
    pub subset_count: BigUint,
}

pub fn count_report(inst: &Instance, ps: &PatternSet) -> CountReport {
    CountReport {
        pattern_count: ps.len(),
        subset_count: binomial(ps.len() as u64, inst.bins() as u64),
    }
}

/// Runs the literal subset sweep if it visits at most `cap` subsets.
pub fn subset_sweep_solve(
    inst: &Instance,
    ps: &PatternSet,
    cap: u64,
) -> Result<SolveOutcome, OracleError> {
    check_pattern_set(inst, ps)?;
    let subsets = binomial(ps.len() as u64, inst.bins() as u64);
    if subsets.to_u64().is_none_or(|s| s > cap) {
        return Err(OracleError::OracleTooLarge { subsets, cap });
    }
    Ok(sweep(inst, ps))
}

/// Runs the literal subset sweep with no cap.
pub fn subset_sweep_solve_uncapped(
    inst: &Instance,
    ps: &PatternSet,
) -> Result<SolveOutcome, OracleError> {
    check_pattern_set(inst, ps)?;
    Ok(sweep(inst, ps))
}

fn check_pattern_set(inst: &Instance, ps: &PatternSet) -> Result<(), OracleError> {
    let report = inst.validate();
    if !report.is_valid() {
        return Err(OracleError::InvalidInstance(report));
    }
    if ps.source_digest() != inst.digest() {
        return Err(OracleError::PatternSetMismatch);
    }
    Ok(())
}

fn sweep(inst: &Instance, ps: &PatternSet) -> SolveOutcome {
    let k = inst.bins();
    let p = ps.len();
    if k > p {
        return SolveOutcome::NoDistinctPacking;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut chosen: Vec<BinPattern> = Vec::with_capacity(k);
    loop {
        chosen.clear();
        chosen.extend(idx.iter().map(|&i| ps.patterns()[i].clone()));
        if multiset_equal(&spread(&chosen), inst.items()) {
            return SolveOutcome::Packed(Packing::new(chosen));
        }
        // Advance to the next combination in lexicographic order.
        let Some(pos) = (0..k).rev().find(|&i| idx[i] < p - k + i) else {
            return SolveOutcome::NoDistinctPacking;
        };
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Searches item-to-bin assignments directly for a distinct packing. A bin
/// may hold equal sizes, matching [`EnumerationMode::MultiplicityBounded`].
///
/// Items are sorted; each new bin opens with the smallest unassigned item and
/// takes the rest in increasing position, so bin order and in-bin order are
/// fixed. Equal sizes at the same choice point are tried once.
pub fn brute_force_assign(inst: &Instance) -> Result<SolveOutcome, OracleError> {
    brute_force_assign_mode(inst, EnumerationMode::MultiplicityBounded)
}

/// [`brute_force_assign`] restricted to the bins `mode` admits: with
/// [`EnumerationMode::DistinctValues`] no bin may repeat a size.
pub fn brute_force_assign_mode(
    inst: &Instance,
    mode: EnumerationMode,
) -> Result<SolveOutcome, OracleError> {
    let report = inst.validate();
    if !report.is_valid() {
        return Err(OracleError::InvalidInstance(report));
    }
    let n = inst.item_count();
    if n > BRUTE_FORCE_MAX_ITEMS {
        return Err(OracleError::InstanceTooLarge {
            items: n,
            max: BRUTE_FORCE_MAX_ITEMS,
        });
    }
    let mut state = Assign {
        items: inst.items().to_sorted_vec(),
        used: vec![false; n],
        per_bin: inst.per_bin(),
        capacity: inst.capacity(),
        distinct_values: mode == EnumerationMode::DistinctValues,
        bins: Vec::with_capacity(inst.bins()),
        current: Vec::with_capacity(inst.per_bin()),
    };
    Ok(if state.open_bin() {
        SolveOutcome::Packed(Packing::from_bins(state.bins))
    } else {
        SolveOutcome::NoDistinctPacking
    })
}

struct Assign {
    items: Vec<Size>,
    used: Vec<bool>,
    per_bin: usize,
    capacity: Size,
    distinct_values: bool,
    bins: Vec<Vec<Size>>,
    current: Vec<Size>,
}

impl Assign {
    fn open_bin(&mut self) -> bool {
        let Some(first) = self.used.iter().position(|u| !u) else {
            return true;
        };
        self.used[first] = true;
        self.current.push(self.items[first]);
        let found = self.fill(first + 1, self.items[first]);
        self.current.pop();
        self.used[first] = false;
        found
    }

    fn fill(&mut self, from: usize, sum: Size) -> bool {
        if self.current.len() == self.per_bin {
            if sum != self.capacity || self.bins.contains(&self.current) {
                return false;
            }
            let done = std::mem::take(&mut self.current);
            self.bins.push(done);
            if self.open_bin() {
                return true;
            }
            self.current = self.bins.pop().unwrap_or_default();
            return false;
        }
        let mut last_tried = None;
        for j in from..self.items.len() {
            if self.used[j] || last_tried == Some(self.items[j]) {
                continue;
            }
            if self.distinct_values && self.current.last() == Some(&self.items[j]) {
                continue;
            }
            let next = sum + self.items[j];
            if next > self.capacity {
                break;
            }
            last_tried = Some(self.items[j]);
            self.used[j] = true;
            self.current.push(self.items[j]);
            let found = self.fill(j + 1, next);
            self.current.pop();
            self.used[j] = false;
            if found {
                return true;
            }
        }
        false
    }
}
