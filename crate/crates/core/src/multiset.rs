//! Counted collections of item sizes.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Item sizes are positive integers in abstract size units.
pub type Size = u64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultisetError {
    #[error("size values must be positive, found {value} at position {position}")]
    NonPositiveValue { value: i128, position: usize },
}

/// A multiset of sizes, stored as `value -> multiplicity`.
///
/// Zero multiplicities are never stored, so derived equality is multiset
/// equality.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Multiset {
    entries: BTreeMap<Size, usize>,
    total: usize,
}

impl Multiset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Counts the occurrences of every value in `values`.
    pub fn from_values(values: &[Size]) -> Result<Self, MultisetError> {
        let mut set = Multiset::new();
        for (position, &value) in values.iter().enumerate() {
            if value == 0 {
                return Err(MultisetError::NonPositiveValue { value: 0, position });
            }
            set.insert(value, 1);
        }
        Ok(set)
    }

    /// Like [`Multiset::from_values`] but accepts signed input, rejecting
    /// anything that is not strictly positive.
    pub fn from_signed(values: &[i64]) -> Result<Self, MultisetError> {
        let mut set = Multiset::new();
        for (position, &value) in values.iter().enumerate() {
            if value <= 0 {
                return Err(MultisetError::NonPositiveValue {
                    value: value as i128,
                    position,
                });
            }
            set.insert(value as Size, 1);
        }
        Ok(set)
    }

    /// Builds a multiset from `(value, multiplicity)` pairs. Pairs with a zero
    /// multiplicity are skipped; repeated values accumulate.
    pub fn from_counts<I>(counts: I) -> Result<Self, MultisetError>
    where
        I: IntoIterator<Item = (Size, usize)>,
    {
        let mut set = Multiset::new();
        for (position, (value, count)) in counts.into_iter().enumerate() {
            if value == 0 {
                return Err(MultisetError::NonPositiveValue { value: 0, position });
            }
            set.insert(value, count);
        }
        Ok(set)
    }

    fn insert(&mut self, value: Size, count: usize) {
        if count == 0 {
            return;
        }
        *self.entries.entry(value).or_insert(0) += count;
        self.total += count;
    }

    /// Number of items, counted with multiplicity.
    pub fn total_count(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn multiplicity(&self, value: Size) -> usize {
        self.entries.get(&value).copied().unwrap_or(0)
    }

    /// The distinct values, ascending (the extracted set).
    pub fn extracted_set(&self) -> Vec<Size> {
        self.entries.keys().copied().collect()
    }

    /// Number of distinct values.
    pub fn distinct_count(&self) -> usize {
        self.entries.len()
    }

    /// `(value, multiplicity)` pairs in ascending value order.
    pub fn iter(&self) -> impl Iterator<Item = (Size, usize)> + '_ {
        self.entries.iter().map(|(&v, &c)| (v, c))
    }

    /// Every item, ascending, repeated by multiplicity.
    pub fn to_sorted_vec(&self) -> Vec<Size> {
        let mut out = Vec::with_capacity(self.total);
        for (value, count) in self.iter() {
            out.extend(std::iter::repeat_n(value, count));
        }
        out
    }

    /// Sum of all items with multiplicity. Wide enough that 64-bit sizes
    /// cannot overflow it.
    pub fn sum(&self) -> u128 {
        self.iter().map(|(v, c)| v as u128 * c as u128).sum()
    }

    pub fn min_value(&self) -> Option<Size> {
        self.entries.keys().next().copied()
    }

    pub fn max_value(&self) -> Option<Size> {
        self.entries.keys().next_back().copied()
    }

    /// True when every multiplicity here is at most the one in `other`.
    pub fn is_submultiset_of(&self, other: &Multiset) -> bool {
        self.iter().all(|(v, c)| c <= other.multiplicity(v))
    }

    /// Multiset sum: multiplicities add.
    pub fn union_sum(&self, other: &Multiset) -> Multiset {
        let mut out = self.clone();
        for (v, c) in other.iter() {
            out.insert(v, c);
        }
        out
    }

    /// Multiplies every value by `factor`, keeping multiplicities. Returns
    /// `None` on overflow or a zero factor.
    pub fn scaled(&self, factor: Size) -> Option<Multiset> {
        if factor == 0 {
            return None;
        }
        let mut out = Multiset::new();
        for (v, c) in self.iter() {
            out.insert(v.checked_mul(factor)?, c);
        }
        Some(out)
    }
}

/// Multiset equality: identical multiplicity for every value.
pub fn multiset_equal(a: &Multiset, b: &Multiset) -> bool {
    a.total == b.total && a.entries == b.entries
}

impl fmt::Debug for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter()).finish()
    }
}

impl FromIterator<Size> for Multiset {
    /// Collects sizes; zero values are ignored.
    fn from_iter<T: IntoIterator<Item = Size>>(iter: T) -> Self {
        let mut set = Multiset::new();
        for v in iter {
            if v > 0 {
                set.insert(v, 1);
            }
        }
        set
    }
}
