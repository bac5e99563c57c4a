//! Enumeration of every bin pattern an instance admits.
//!
//! A pattern is a non-decreasing tuple of `per_bin` item sizes drawn from the
//! instance's distinct values and summing to the capacity. Patterns come out
//! in strict lexicographic order.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{BinPattern, Instance, InstanceDigest, ValidationReport};
use crate::multiset::{Multiset, Size};

/// Default limit on the number of generated patterns.
pub const DEFAULT_PATTERN_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum EnumerationMode {
    /// Strictly increasing tuples over the extracted set.
    #[default]
    DistinctValues,
    /// Values may repeat inside a tuple up to their multiplicity.
    MultiplicityBounded,
}

impl EnumerationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EnumerationMode::DistinctValues => "distinct-values",
            EnumerationMode::MultiplicityBounded => "multiplicity-bounded",
        }
    }
}

impl fmt::Display for EnumerationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EnumerationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "distinct-values" | "distinct" => Ok(EnumerationMode::DistinctValues),
            "multiplicity-bounded" | "bounded" => Ok(EnumerationMode::MultiplicityBounded),
            other => Err(format!(
                "unknown mode {other:?} (expected distinct-values or multiplicity-bounded)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("instance is not feasible: {0}")]
    InvalidInstance(ValidationReport),
    #[error("more than {cap} patterns; instance is outside the reach of pattern enumeration")]
    PatternExplosion { cap: usize },
}

/// All patterns of one instance, lexicographically ordered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    patterns: Vec<BinPattern>,
    mode: EnumerationMode,
    values: Vec<Size>,
    per_bin: usize,
    capacity: Size,
    digest: InstanceDigest,
}

impl PatternSet {
    pub fn patterns(&self) -> &[BinPattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&BinPattern> {
        self.patterns.get(index)
    }

    pub fn mode(&self) -> EnumerationMode {
        self.mode
    }

    /// Distinct item values of the source instance, ascending.
    pub fn values(&self) -> &[Size] {
        &self.values
    }

    pub fn per_bin(&self) -> usize {
        self.per_bin
    }

    pub fn capacity(&self) -> Size {
        self.capacity
    }

    pub fn source_digest(&self) -> InstanceDigest {
        self.digest
    }

    /// Maps every instance value to the ascending indices of the patterns
    /// that contain it. Values no pattern contains map to an empty list,
    /// which proves the instance has no packing.
    pub fn value_support(&self) -> BTreeMap<Size, Vec<usize>> {
        let mut support: BTreeMap<Size, Vec<usize>> =
            self.values.iter().map(|&v| (v, Vec::new())).collect();
        for (index, pattern) in self.patterns.iter().enumerate() {
            let mut previous = None;
            for &v in pattern.sizes() {
                if previous != Some(v) {
                    support.entry(v).or_default().push(index);
                }
                previous = Some(v);
            }
        }
        support
    }

    /// Header line of the pattern dump.
    pub fn dump_header(&self) -> String {
        format!(
            "patterns={} per_bin={} capacity={} mode={}",
            self.patterns.len(),
            self.per_bin,
            self.capacity,
            self.mode
        )
    }

    /// Header followed by one pattern per line.
    pub fn dump(&self) -> String {
        let mut out = self.dump_header();
        out.push('\n');
        for p in &self.patterns {
            out.push_str(&p.to_string());
            out.push('\n');
        }
        out
    }
}

/// Enumerates the pattern set of a feasible instance with the default cap.
pub fn enumerate_patterns(
    inst: &Instance,
    mode: EnumerationMode,
) -> Result<PatternSet, EnumerateError> {
    enumerate_patterns_capped(inst, mode, DEFAULT_PATTERN_CAP)
}

pub fn enumerate_patterns_capped(
    inst: &Instance,
    mode: EnumerationMode,
    cap: usize,
) -> Result<PatternSet, EnumerateError> {
    let report = inst.validate();
    if !report.is_valid() {
        return Err(EnumerateError::InvalidInstance(report));
    }
    let patterns = patterns_over(inst.items(), inst.per_bin(), inst.capacity(), mode, cap)?;
    Ok(PatternSet {
        patterns,
        mode,
        values: inst.items().extracted_set(),
        per_bin: inst.per_bin(),
        capacity: inst.capacity(),
        digest: inst.digest(),
    })
}

/// Raw enumeration over the values of `items`, with no feasibility checks.
///
/// Values are visited in ascending order and a prefix is abandoned as soon
/// as the smallest or largest completion still available misses the target.
pub fn patterns_over(
    items: &Multiset,
    per_bin: usize,
    capacity: Size,
    mode: EnumerationMode,
    cap: usize,
) -> Result<Vec<BinPattern>, EnumerateError> {
    let values: Vec<(Size, usize)> = items
        .iter()
        .map(|(v, c)| match mode {
            EnumerationMode::DistinctValues => (v, 1),
            EnumerationMode::MultiplicityBounded => (v, c.min(per_bin)),
        })
        .collect();
    // Flattened pool: each value repeated by its allowance. Choosing a
    // non-decreasing index sequence into it, skipping equal values at the
    // same depth, yields every canonical tuple exactly once.
    let pool: Vec<Size> = values
        .iter()
        .flat_map(|&(v, c)| std::iter::repeat_n(v, c))
        .collect();
    let mut walker = Walker {
        pool: &pool,
        suffix_max: suffix_max_sums(&pool, per_bin),
        per_bin,
        cap,
        current: Vec::with_capacity(per_bin),
        out: Vec::new(),
    };
    if per_bin > 0 {
        walker.extend(0, capacity as u128)?;
    }
    Ok(walker.out)
}

/// `suffix_max[r]` is the sum of the `r` largest pool entries.
fn suffix_max_sums(pool: &[Size], per_bin: usize) -> Vec<u128> {
    let mut sums = vec![0u128; per_bin + 1];
    for r in 1..=per_bin {
        sums[r] = if r <= pool.len() {
            sums[r - 1] + pool[pool.len() - r] as u128
        } else {
            u128::MAX
        };
    }
    sums
}

struct Walker<'a> {
    pool: &'a [Size],
    suffix_max: Vec<u128>,
    per_bin: usize,
    cap: usize,
    current: Vec<Size>,
    out: Vec<BinPattern>,
}

impl Walker<'_> {
    fn extend(&mut self, start: usize, target: u128) -> Result<(), EnumerateError> {
        let slots = self.per_bin - self.current.len();
        if slots == 0 {
            if target == 0 {
                if self.out.len() == self.cap {
                    return Err(EnumerateError::PatternExplosion { cap: self.cap });
                }
                self.out.push(BinPattern::from_sorted(self.current.clone()));
            }
            return Ok(());
        }
        if self.suffix_max[slots] < target {
            return Ok(());
        }
        let mut i = start;
        while i + slots <= self.pool.len() {
            let v = self.pool[i];
            // Smallest completion: this entry and the next slots-1 entries.
            let min_completion: u128 = self.pool[i..i + slots].iter().map(|&x| x as u128).sum();
            if min_completion > target {
                break;
            }
            // Largest completion using v: v plus the slots-1 largest entries
            // after it.
            let max_completion = v as u128 + self.largest_after(i, slots - 1);
            if max_completion >= target {
                self.current.push(v);
                self.extend(i + 1, target - v as u128)?;
                self.current.pop();
            }
            // Skip the remaining copies of v at this depth.
            while i < self.pool.len() && self.pool[i] == v {
                i += 1;
            }
        }
        Ok(())
    }

    fn largest_after(&self, i: usize, count: usize) -> u128 {
        if count == 0 {
            return 0;
        }
        if self.pool.len() - (i + 1) < count {
            return 0;
        }
        self.pool[self.pool.len() - count..]
            .iter()
            .map(|&x| x as u128)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(items: &[Size], k: usize, l: usize, c: Size) -> Instance {
        Instance::new(Multiset::from_values(items).unwrap(), k, l, c)
    }

    fn sizes(ps: &PatternSet) -> Vec<Vec<Size>> {
        ps.patterns().iter().map(|p| p.sizes().to_vec()).collect()
    }

    #[test]
    fn pairs_summing_to_five() {
        let ps = enumerate_patterns(
            &inst(&[1, 2, 3, 4], 2, 2, 5),
            EnumerationMode::DistinctValues,
        )
        .unwrap();
        assert_eq!(sizes(&ps), vec![vec![1, 4], vec![2, 3]]);
    }

    #[test]
    fn repeated_single_value() {
        let i = inst(&[2, 2, 2, 2], 2, 2, 4);
        let bounded = enumerate_patterns(&i, EnumerationMode::MultiplicityBounded).unwrap();
        assert_eq!(sizes(&bounded), vec![vec![2, 2]]);
        let distinct = enumerate_patterns(&i, EnumerationMode::DistinctValues).unwrap();
        assert!(distinct.is_empty());
    }

    #[test]
    fn multiplicity_caps_repetition() {
        // 3 appears twice and 1 once: (3,3,4) is allowed, (1,1,8) and
        // (3,3,3) are not.
        let items = Multiset::from_values(&[3, 3, 4, 1, 8]).unwrap();
        let got = patterns_over(&items, 3, 10, EnumerationMode::MultiplicityBounded, 100).unwrap();
        let got: Vec<_> = got.iter().map(|p| p.sizes().to_vec()).collect();
        assert_eq!(got, vec![vec![3, 3, 4]]);
        let got = patterns_over(&items, 3, 9, EnumerationMode::MultiplicityBounded, 100).unwrap();
        assert!(got.is_empty());
    }

    #[test]
    fn rejects_infeasible_instance() {
        let err = enumerate_patterns(&inst(&[1, 2, 3], 2, 2, 3), EnumerationMode::DistinctValues)
            .unwrap_err();
        assert!(matches!(err, EnumerateError::InvalidInstance(_)));
    }

    #[test]
    fn explosion_cap() {
        let items: Vec<Size> = (1..=20).collect();
        let m = Multiset::from_values(&items).unwrap();
        let all = patterns_over(&m, 2, 21, EnumerationMode::DistinctValues, 1000).unwrap();
        assert_eq!(all.len(), 10);
        assert_eq!(
            patterns_over(&m, 2, 21, EnumerationMode::DistinctValues, 9),
            Err(EnumerateError::PatternExplosion { cap: 9 })
        );
        assert!(patterns_over(&m, 2, 21, EnumerationMode::DistinctValues, 10).is_ok());
    }

    #[test]
    fn support_read_off() {
        let ps = enumerate_patterns(
            &inst(&[1, 2, 3, 4], 2, 2, 5),
            EnumerationMode::DistinctValues,
        )
        .unwrap();
        let support = ps.value_support();
        assert_eq!(support[&1], vec![0]);
        assert_eq!(support[&2], vec![1]);
        assert_eq!(support[&3], vec![1]);
        assert_eq!(support[&4], vec![0]);
    }

    #[test]
    fn support_of_empty_set() {
        let ps = enumerate_patterns(
            &inst(&[5, 5], 1, 2, 10).with_relaxed_bounds(true),
            EnumerationMode::DistinctValues,
        )
        .unwrap();
        assert!(ps.is_empty());
        assert_eq!(ps.value_support()[&5], Vec::<usize>::new());
    }

    #[test]
    fn dump_format() {
        let ps = enumerate_patterns(
            &inst(&[1, 2, 3, 4], 2, 2, 5),
            EnumerationMode::DistinctValues,
        )
        .unwrap();
        assert_eq!(
            ps.dump(),
            "patterns=2 per_bin=2 capacity=5 mode=distinct-values\n1 4\n2 3\n"
        );
    }

    #[test]
    fn mode_names_round_trip() {
        for mode in [
            EnumerationMode::DistinctValues,
            EnumerationMode::MultiplicityBounded,
        ] {
            assert_eq!(mode.as_str().parse::<EnumerationMode>(), Ok(mode));
        }
        assert!("nope".parse::<EnumerationMode>().is_err());
    }
}
