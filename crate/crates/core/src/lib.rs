//! Exact solver for distinct-bin, exact-fill bin packing.
//!
//! Given `n` items, the task is to fill exactly `k` bins with exactly `l`
//! items each, every bin summing to the capacity, no item left over, and no
//! two bins holding the same sizes. The pipeline is:
//!
//! 1. [`enumerate`]: list every bin pattern (an `l`-tuple of item sizes that
//!    sums to the capacity).
//! 2. [`search`]: choose `k` distinct patterns whose combined items equal
//!    the instance's items.
//! 3. [`verify`]: check any claimed packing independently.
//!
//! [`oracle`] holds the exhaustive reference solvers used to cross-check the
//! search.

pub mod bench;
pub mod cli;
pub mod enumerate;
pub mod io;
pub mod model;
pub mod multiset;
pub mod oracle;
pub mod search;
pub mod verify;

pub use enumerate::{enumerate_patterns, EnumerationMode, PatternSet};
pub use model::{spread, BinPattern, Instance, Packing, ValidationReport};
pub use multiset::{multiset_equal, Multiset, Size};
pub use search::{solve, solve_all, SearchConfig, SearchError, SolveOutcome};
pub use verify::{verify, VerifyReport};
