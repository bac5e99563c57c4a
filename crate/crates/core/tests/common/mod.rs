//! Test-only fixtures and reference computations. Nothing here calls into
//! the enumeration or search code paths it is used to check.

#![allow(dead_code)]

use std::collections::BTreeMap;

use exactpack::{Instance, Multiset, Packing, Size};
use num_bigint::BigUint;
use rand::Rng;

/// The 60 item sizes of Falkenauer_T60_01.
pub const T60_01_ITEMS: [Size; 60] = [
    251, 251, 252, 254, 255, 256, 257, 258, 258, 260, 260, 261, 262, 264, 265, 267, 269, 270, 275,
    277, 280, 282, 289, 297, 300, 302, 304, 305, 307, 308, 313, 314, 319, 333, 334, 339, 340, 347,
    361, 366, 369, 376, 382, 396, 396, 399, 402, 403, 409, 411, 412, 423, 426, 444, 447, 462, 465,
    468, 473, 475,
];

/// The 56 distinct sizes of Falkenauer_T60_01, ascending.
pub const T60_01_DISTINCT: [Size; 56] = [
    251, 252, 254, 255, 256, 257, 258, 260, 261, 262, 264, 265, 267, 269, 270, 275, 277, 280, 282,
    289, 297, 300, 302, 304, 305, 307, 308, 313, 314, 319, 333, 334, 339, 340, 347, 361, 366, 369,
    376, 382, 396, 399, 402, 403, 409, 411, 412, 423, 426, 444, 447, 462, 465, 468, 473, 475,
];

/// The reference 20-triplet packing of Falkenauer_T60_01.
pub const T60_01_REFERENCE: [[Size; 3]; 20] = [
    [251, 302, 447],
    [251, 305, 444],
    [252, 339, 409],
    [254, 347, 399],
    [255, 280, 465],
    [256, 269, 475],
    [257, 361, 382],
    [258, 319, 423],
    [258, 366, 376],
    [260, 267, 473],
    [260, 314, 426],
    [261, 277, 462],
    [262, 270, 468],
    [264, 340, 396],
    [265, 333, 402],
    [275, 313, 412],
    [282, 307, 411],
    [289, 308, 403],
    [297, 334, 369],
    [300, 304, 396],
];

pub fn t60_01() -> Instance {
    Instance::new(Multiset::from_values(&T60_01_ITEMS).unwrap(), 20, 3, 1000)
}

pub fn t60_01_reference() -> Packing {
    Packing::from_bins(T60_01_REFERENCE.iter().map(|t| t.to_vec()).collect())
}

pub fn bpplib_text(items: &[Size], capacity: Size) -> String {
    let mut s = format!("{}\n{}\n", items.len(), capacity);
    for v in items {
        s.push_str(&format!("{v}\n"));
    }
    s
}

pub fn data_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("data")
        .join(name)
}

/// All-distinct triples over `values` summing to `target`, by three nested
/// loops.
pub fn brute_triples(values: &[Size], target: Size) -> Vec<Vec<Size>> {
    let mut out = Vec::new();
    for a in 0..values.len() {
        for b in a + 1..values.len() {
            for c in b + 1..values.len() {
                if values[a] + values[b] + values[c] == target {
                    out.push(vec![values[a], values[b], values[c]]);
                }
            }
        }
    }
    out.sort();
    out
}

/// Every non-decreasing `len`-tuple over the distinct values of `items` that
/// sums to `target`, walked with an odometer over value indices. With
/// `bounded`, a value may repeat up to its multiplicity; otherwise values
/// must be distinct.
pub fn brute_patterns(items: &Multiset, len: usize, target: Size, bounded: bool) -> Vec<Vec<Size>> {
    let values = items.extracted_set();
    let m = values.len();
    let mut out = Vec::new();
    if m == 0 || len == 0 {
        return out;
    }
    let mut idx = vec![0usize; len];
    loop {
        let nondecreasing = idx.windows(2).all(|w| w[0] <= w[1]);
        if nondecreasing {
            let tuple: Vec<Size> = idx.iter().map(|&i| values[i]).collect();
            let sum: u128 = tuple.iter().map(|&v| v as u128).sum();
            let mut counts: BTreeMap<Size, usize> = BTreeMap::new();
            for &v in &tuple {
                *counts.entry(v).or_default() += 1;
            }
            let ok = if bounded {
                counts.iter().all(|(&v, &c)| c <= items.multiplicity(v))
            } else {
                counts.values().all(|&c| c == 1)
            };
            if sum == target as u128 && ok {
                out.push(tuple);
            }
        }
        // Odometer increment.
        let mut pos = len;
        loop {
            if pos == 0 {
                out.sort();
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Pascal's triangle up to row `rows`, exact.
pub fn pascal(rows: usize) -> Vec<Vec<BigUint>> {
    let mut t: Vec<Vec<BigUint>> = Vec::with_capacity(rows + 1);
    for n in 0..=rows {
        let mut row = vec![BigUint::from(1u32); n + 1];
        for k in 1..n {
            row[k] = &t[n - 1][k - 1] + &t[n - 1][k];
        }
        t.push(row);
    }
    t
}

/// A random feasible-looking instance with at most 12 items and sizes in
/// 1..=20, with `(k, l)` derived from the sum and item count. Half the
/// draws plant an exact packing (which may or may not be distinct); the
/// rest are uniform draws retried until the parameters divide exactly.
pub fn random_small_instance<R: Rng>(rng: &mut R) -> Instance {
    loop {
        let items: Vec<Size> = if rng.gen_bool(0.5) {
            let per_bin = rng.gen_range(2..=6);
            let bins = rng.gen_range(2..=12 / per_bin);
            let capacity: Size = rng.gen_range(per_bin as Size..=(20 * per_bin) as Size);
            let mut items = Vec::new();
            let mut ok = true;
            for _ in 0..bins {
                let mut placed = false;
                for _ in 0..50 {
                    let head: Vec<Size> = (0..per_bin - 1).map(|_| rng.gen_range(1..=20)).collect();
                    let s: Size = head.iter().sum();
                    if s < capacity && capacity - s <= 20 {
                        items.extend(head);
                        items.push(capacity - s);
                        placed = true;
                        break;
                    }
                }
                ok &= placed;
            }
            if !ok {
                continue;
            }
            items
        } else {
            let n = rng.gen_range(4..=12);
            (0..n).map(|_| rng.gen_range(1..=20)).collect()
        };
        let n = items.len();
        let sum: Size = items.iter().sum();
        let max = *items.iter().max().unwrap();
        let mut choices = Vec::new();
        for per_bin in 2..n {
            if !n.is_multiple_of(per_bin) {
                continue;
            }
            let bins = n / per_bin;
            if sum.is_multiple_of(bins as Size) && max <= sum / bins as Size {
                choices.push((bins, per_bin, sum / bins as Size));
            }
        }
        if choices.is_empty() {
            continue;
        }
        let (bins, per_bin, capacity) = choices[rng.gen_range(0..choices.len())];
        return Instance::new(
            Multiset::from_values(&items).unwrap(),
            bins,
            per_bin,
            capacity,
        );
    }
}

/// Triplet instance in the style of the Falkenauer T class: per bin, a
/// first size uniform in 380..=490, a second uniform in 250..=(1000-a)/2,
/// and a third completing the bin to 1000.
pub fn triplet_instance<R: Rng>(rng: &mut R, bins: usize) -> Vec<Size> {
    let mut items = Vec::with_capacity(3 * bins);
    for _ in 0..bins {
        let a: Size = rng.gen_range(380..=490);
        let b: Size = rng.gen_range(250..=(1000 - a) / 2);
        items.extend([a, b, 1000 - a - b]);
    }
    // Deterministic shuffle so files do not list bins in order.
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
    items
}
