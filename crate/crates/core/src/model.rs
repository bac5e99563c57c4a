//! Instances, bin patterns and packings.

use std::fmt;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::multiset::{Multiset, Size};

/// A problem instance: pack every item into exactly `bins` bins of
/// `per_bin` items each, every bin summing to `capacity`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    items: Multiset,
    bins: usize,
    per_bin: usize,
    capacity: Size,
    relaxed_bounds: bool,
}

impl Instance {
    /// Builds an instance without checking feasibility; see
    /// [`Instance::validate`].
    pub fn new(items: Multiset, bins: usize, per_bin: usize, capacity: Size) -> Self {
        Instance {
            items,
            bins,
            per_bin,
            capacity,
            relaxed_bounds: false,
        }
    }

    /// Allows `per_bin == 1` and `per_bin == n`.
    pub fn with_relaxed_bounds(mut self, relaxed: bool) -> Self {
        self.relaxed_bounds = relaxed;
        self
    }

    pub fn items(&self) -> &Multiset {
        &self.items
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn per_bin(&self) -> usize {
        self.per_bin
    }

    pub fn capacity(&self) -> Size {
        self.capacity
    }

    pub fn relaxed_bounds(&self) -> bool {
        self.relaxed_bounds
    }

    pub fn item_count(&self) -> usize {
        self.items.total_count()
    }

    /// Lists every violated feasibility constraint.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let n = self.items.total_count();

        if self.bins == 0 || self.per_bin == 0 || self.capacity == 0 {
            violations.push(InstanceViolation::ZeroParameter {
                bins: self.bins,
                per_bin: self.per_bin,
                capacity: self.capacity,
            });
        }
        let slots = self.bins as u128 * self.per_bin as u128;
        if slots != n as u128 {
            violations.push(InstanceViolation::CountMismatch {
                bins: self.bins,
                per_bin: self.per_bin,
                slots,
                items: n,
            });
        }
        let sum = self.items.sum();
        let expected = self.capacity as u128 * self.bins as u128;
        if sum != expected {
            violations.push(InstanceViolation::SumMismatch { sum, expected });
        }
        if !self.relaxed_bounds && !(1 < self.per_bin && self.per_bin < n) {
            violations.push(InstanceViolation::PerBinOutOfBounds {
                per_bin: self.per_bin,
                items: n,
            });
        }
        for value in self.items.extracted_set() {
            if value > self.capacity {
                violations.push(InstanceViolation::SizeOutOfRange {
                    value,
                    capacity: self.capacity,
                });
            }
        }
        ValidationReport { violations }
    }

    /// Content hash over items, bin count, items per bin and capacity.
    pub fn digest(&self) -> InstanceDigest {
        let mut hasher = Sha256::new();
        hasher
            .update(format!("k={} l={} c={}\n", self.bins, self.per_bin, self.capacity).as_bytes());
        for (value, count) in self.items.iter() {
            hasher.update(format!("{value}x{count}\n").as_bytes());
        }
        let bytes = hasher.finalize();
        let mut out = [0u8; 32];
        out.copy_from_slice(&bytes);
        InstanceDigest(out)
    }

    /// Multiplies every size and the capacity by `factor`.
    pub fn scaled(&self, factor: Size) -> Option<Instance> {
        Some(Instance {
            items: self.items.scaled(factor)?,
            bins: self.bins,
            per_bin: self.per_bin,
            capacity: self.capacity.checked_mul(factor)?,
            relaxed_bounds: self.relaxed_bounds,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct InstanceDigest([u8; 32]);

impl fmt::Debug for InstanceDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "InstanceDigest({self})")
    }
}

impl fmt::Display for InstanceDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0[..8] {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceViolation {
    ZeroParameter {
        bins: usize,
        per_bin: usize,
        capacity: Size,
    },
    /// `bins * per_bin != n`
    CountMismatch {
        bins: usize,
        per_bin: usize,
        slots: u128,
        items: usize,
    },
    /// `sum(items) != capacity * bins`
    SumMismatch {
        sum: u128,
        expected: u128,
    },
    /// `1 < per_bin < n` does not hold and bounds are not relaxed.
    PerBinOutOfBounds {
        per_bin: usize,
        items: usize,
    },
    SizeOutOfRange {
        value: Size,
        capacity: Size,
    },
}

impl fmt::Display for InstanceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceViolation::ZeroParameter {
                bins,
                per_bin,
                capacity,
            } => write!(
                f,
                "bins ({bins}), items per bin ({per_bin}) and capacity ({capacity}) must all be positive"
            ),
            InstanceViolation::CountMismatch {
                bins,
                per_bin,
                slots,
                items,
            } => write!(f, "count mismatch: {bins}*{per_bin}={slots} != n={items}"),
            InstanceViolation::SumMismatch { sum, expected } => {
                write!(f, "sum mismatch: item sum {sum} != bins*capacity {expected}")
            }
            InstanceViolation::PerBinOutOfBounds { per_bin, items } => write!(
                f,
                "items per bin {per_bin} outside 1 < l < n={items} (use relaxed bounds to allow)"
            ),
            InstanceViolation::SizeOutOfRange { value, capacity } => {
                write!(f, "item size {value} exceeds capacity {capacity}")
            }
        }
    }
}

/// Result of [`Instance::validate`]. Empty means arithmetically feasible.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<InstanceViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// The sizes placed in one bin, kept in non-decreasing order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct BinPattern(Vec<Size>);

impl BinPattern {
    /// Canonicalizes by sorting.
    pub fn new(mut sizes: Vec<Size>) -> Self {
        sizes.sort_unstable();
        BinPattern(sizes)
    }

    /// Wraps an already sorted sequence.
    pub(crate) fn from_sorted(sizes: Vec<Size>) -> Self {
        debug_assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
        BinPattern(sizes)
    }

    pub fn sizes(&self) -> &[Size] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> u128 {
        self.0.iter().map(|&v| v as u128).sum()
    }

    pub fn scaled(&self, factor: Size) -> Option<BinPattern> {
        self.0
            .iter()
            .map(|v| v.checked_mul(factor))
            .collect::<Option<Vec<_>>>()
            .map(BinPattern)
    }
}

impl fmt::Display for BinPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A claimed assignment of items to bins. Bins are canonical and sorted
/// lexicographically; whether the packing is valid for an instance is
/// decided by [`crate::verify::verify`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Packing {
    bins: Vec<BinPattern>,
}

impl Packing {
    pub fn new(mut bins: Vec<BinPattern>) -> Self {
        bins.sort();
        Packing { bins }
    }

    /// Canonicalizes raw bins: items within each bin, then the bins.
    pub fn from_bins(bins: Vec<Vec<Size>>) -> Self {
        Packing::new(bins.into_iter().map(BinPattern::new).collect())
    }

    pub fn bins(&self) -> &[BinPattern] {
        &self.bins
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// All items of all bins as one multiset.
    pub fn spread(&self) -> Multiset {
        spread(&self.bins)
    }
}

/// Flattens patterns into the multiset of all their elements.
pub fn spread(patterns: &[BinPattern]) -> Multiset {
    patterns
        .iter()
        .flat_map(|p| p.sizes().iter().copied())
        .collect()
}
