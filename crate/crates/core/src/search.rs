//! Backtracking search for a distinct packing.
//!
//! The search picks `k` distinct patterns from a [`PatternSet`] whose spread
//! equals the instance's multiset. Two branching strategies are available:
//!
//! * Deterministic (default): branch on the smallest uncovered value, over the
//!   patterns that *start* with it and come after the last chosen index. In
//!   every solution the next pattern in index order must start with the
//!   smallest uncovered value, since all its elements are uncovered and
//!   patterns are sorted lexicographically. Solutions are therefore produced
//!   in lexicographic order of their chosen-index sequences.
//! * Fewest-support: branch on the uncovered value with the fewest usable
//!   patterns (ties to the smaller value). Choosing pattern `p` for value `v`
//!   bans every `v`-pattern with a lower index inside that subtree, so each
//!   solution is reached along exactly one path.
//!
//! Both prune a node when some uncovered value can no longer be covered by
//! the patterns still usable, or when the uncovered count disagrees with the
//! bins left to fill.

use std::num::NonZeroUsize;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::enumerate::PatternSet;
use crate::model::{Instance, Packing, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Stop [`solve_all`] after the first packing.
    pub first_solution_only: bool,
    /// Upper bound on the packings [`solve_all`] collects; `None` is unbounded.
    pub solution_limit: Option<NonZeroUsize>,
    /// Wall-clock budget; `None` is unlimited.
    pub timeout: Option<Duration>,
    /// Use the lexicographic branching strategy, so that the first packing is
    /// the least one by chosen-index sequence.
    pub deterministic: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            first_solution_only: false,
            solution_limit: None,
            timeout: None,
            deterministic: true,
        }
    }
}

impl SearchConfig {
    pub fn with_timeout(mut self, timeout: Option<Duration>) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn with_limit(mut self, limit: Option<NonZeroUsize>) -> Self {
        self.solution_limit = limit;
        self
    }

    pub fn fewest_support(mut self) -> Self {
        self.deterministic = false;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("instance is not feasible: {0}")]
    InvalidInstance(ValidationReport),
    #[error("pattern set was not enumerated from this instance")]
    PatternSetMismatch,
    #[error("search timed out after {elapsed:?}; feasibility unresolved")]
    TimeoutExceeded { elapsed: Duration },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Packed(Packing),
    /// The whole search space was exhausted without a match.
    NoDistinctPacking,
}

impl SolveOutcome {
    pub fn packing(&self) -> Option<&Packing> {
        match self {
            SolveOutcome::Packed(p) => Some(p),
            SolveOutcome::NoDistinctPacking => None,
        }
    }

    pub fn is_packed(&self) -> bool {
        matches!(self, SolveOutcome::Packed(_))
    }
}

/// Counters from one search run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub solutions: usize,
}

/// Finds one distinct packing, or proves none exists.
pub fn solve(
    inst: &Instance,
    ps: &PatternSet,
    cfg: &SearchConfig,
) -> Result<SolveOutcome, SearchError> {
    let (found, _) = run(inst, ps, cfg, 1)?;
    Ok(match found.into_iter().next() {
        Some(p) => SolveOutcome::Packed(p),
        None => SolveOutcome::NoDistinctPacking,
    })
}

/// Collects distinct packings up to the configured limit. An empty result
/// means no distinct packing exists.
pub fn solve_all(
    inst: &Instance,
    ps: &PatternSet,
    cfg: &SearchConfig,
) -> Result<Vec<Packing>, SearchError> {
    solve_all_with_stats(inst, ps, cfg).map(|(p, _)| p)
}

pub fn solve_all_with_stats(
    inst: &Instance,
    ps: &PatternSet,
    cfg: &SearchConfig,
) -> Result<(Vec<Packing>, SearchStats), SearchError> {
    let limit = if cfg.first_solution_only {
        1
    } else {
        cfg.solution_limit.map_or(usize::MAX, NonZeroUsize::get)
    };
    run(inst, ps, cfg, limit)
}

fn run(
    inst: &Instance,
    ps: &PatternSet,
    cfg: &SearchConfig,
    limit: usize,
) -> Result<(Vec<Packing>, SearchStats), SearchError> {
    let report = inst.validate();
    if !report.is_valid() {
        return Err(SearchError::InvalidInstance(report));
    }
    if ps.source_digest() != inst.digest() {
        return Err(SearchError::PatternSetMismatch);
    }
    let mut search = Search::new(inst, ps, cfg, limit);
    let flow = if cfg.deterministic {
        search.lexicographic()
    } else {
        search.fewest_support()
    };
    if let Flow::TimedOut = flow {
        return Err(SearchError::TimeoutExceeded {
            elapsed: search.started.elapsed(),
        });
    }
    let mut chosen_sets = std::mem::take(&mut search.found);
    if !cfg.deterministic {
        chosen_sets.sort();
    }
    let stats = SearchStats {
        nodes: search.nodes,
        solutions: chosen_sets.len(),
    };
    let packings = chosen_sets
        .into_iter()
        .map(|indices| Packing::new(indices.iter().map(|&i| ps.patterns()[i].clone()).collect()))
        .collect();
    Ok((packings, stats))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flow {
    Continue,
    Stop,
    TimedOut,
}

/// Pattern `index` uses value slot `value` `count` times.
#[derive(Debug, Clone, Copy)]
struct Use {
    value: usize,
    count: usize,
}

struct Search<'a> {
    ps: &'a PatternSet,
    per_bin: usize,
    bins: usize,
    /// Per pattern: the value slots it uses.
    uses: Vec<Vec<Use>>,
    /// Per value slot: `(pattern, count)` for every pattern containing it.
    support: Vec<Vec<(usize, usize)>>,
    /// Per value slot: the index range of patterns whose first element is it.
    starts: Vec<std::ops::Range<usize>>,
    original: Vec<usize>,
    remaining: Vec<usize>,
    remaining_total: usize,
    chosen: Vec<usize>,
    banned: Vec<bool>,
    found: Vec<Vec<usize>>,
    limit: usize,
    deadline: Option<Instant>,
    started: Instant,
    nodes: u64,
}

impl<'a> Search<'a> {
    fn new(inst: &Instance, ps: &'a PatternSet, cfg: &SearchConfig, limit: usize) -> Self {
        let values = ps.values();
        let slot = |v| {
            values
                .binary_search(&v)
                .expect("pattern value not in instance")
        };
        let mut uses = Vec::with_capacity(ps.len());
        let mut support = vec![Vec::new(); values.len()];
        let mut starts = vec![0..0; values.len()];
        for (index, pattern) in ps.patterns().iter().enumerate() {
            let mut u: Vec<Use> = Vec::new();
            for &v in pattern.sizes() {
                let s = slot(v);
                match u.last_mut() {
                    Some(last) if last.value == s => last.count += 1,
                    _ => u.push(Use { value: s, count: 1 }),
                }
            }
            for x in &u {
                support[x.value].push((index, x.count));
            }
            if let Some(first) = u.first() {
                let r = &mut starts[first.value];
                if r.start == r.end {
                    *r = index..index + 1;
                } else {
                    r.end = index + 1;
                }
            }
            uses.push(u);
        }
        let original: Vec<usize> = values
            .iter()
            .map(|&v| inst.items().multiplicity(v))
            .collect();
        let started = Instant::now();
        Search {
            ps,
            per_bin: inst.per_bin(),
            bins: inst.bins(),
            uses,
            support,
            starts,
            remaining: original.clone(),
            remaining_total: inst.item_count(),
            original,
            chosen: Vec::with_capacity(inst.bins()),
            banned: vec![false; ps.len()],
            found: Vec::new(),
            limit,
            deadline: cfg.timeout.map(|t| started + t),
            started,
            nodes: 0,
        }
    }

    fn selectable(&self, p: usize) -> bool {
        self.uses[p]
            .iter()
            .all(|u| u.count <= self.remaining[u.value])
    }

    fn apply(&mut self, p: usize) {
        for u in &self.uses[p] {
            self.remaining[u.value] -= u.count;
        }
        self.remaining_total -= self.per_bin;
        self.chosen.push(p);
    }

    fn undo(&mut self, p: usize) {
        for u in &self.uses[p] {
            self.remaining[u.value] += u.count;
        }
        self.remaining_total += self.per_bin;
        self.chosen.pop();
    }

    /// Spread of the chosen patterns plus the uncovered items equals the
    /// original multiset.
    fn conserved(&self) -> bool {
        let mut covered = vec![0usize; self.remaining.len()];
        for &p in &self.chosen {
            for u in &self.uses[p] {
                covered[u.value] += u.count;
            }
        }
        covered
            .iter()
            .zip(&self.remaining)
            .zip(&self.original)
            .all(|((c, r), o)| c + r == *o)
            && self.remaining_total == self.remaining.iter().sum::<usize>()
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        debug_assert!(self.conserved(), "conservation violated");
        if self.nodes.is_multiple_of(1024) {
            if let Some(deadline) = self.deadline {
                return Instant::now() < deadline;
            }
        }
        true
    }

    fn record(&mut self) -> Flow {
        let mut indices = self.chosen.clone();
        indices.sort_unstable();
        self.found.push(indices);
        if self.found.len() >= self.limit {
            Flow::Stop
        } else {
            Flow::Continue
        }
    }

    fn counts_consistent(&self) -> bool {
        self.remaining_total == (self.bins - self.chosen.len()) * self.per_bin
    }

    /// Every uncovered value can still be covered by patterns that pass
    /// `usable`, counting each such pattern once.
    fn coverable(&self, usable: impl Fn(usize) -> bool) -> bool {
        self.remaining.iter().enumerate().all(|(w, &need)| {
            if need == 0 {
                return true;
            }
            let mut have = 0;
            for &(p, count) in &self.support[w] {
                if usable(p) && self.selectable(p) {
                    have += count;
                    if have >= need {
                        return true;
                    }
                }
            }
            false
        })
    }

    fn lexicographic(&mut self) -> Flow {
        if !self.tick() {
            return Flow::TimedOut;
        }
        if self.chosen.len() == self.bins {
            return if self.remaining_total == 0 {
                self.record()
            } else {
                Flow::Continue
            };
        }
        let Some(v) = self.remaining.iter().position(|&r| r > 0) else {
            return Flow::Continue;
        };
        let after = self.chosen.last().map_or(0, |&p| p + 1);
        let range = self.starts[v].clone();
        for p in range.start.max(after)..range.end {
            if !self.selectable(p) {
                continue;
            }
            self.apply(p);
            if self.counts_consistent() && self.coverable(|q| q > p) {
                let flow = self.lexicographic();
                if flow != Flow::Continue {
                    self.undo(p);
                    return flow;
                }
            }
            self.undo(p);
        }
        Flow::Continue
    }

    fn fewest_support(&mut self) -> Flow {
        if !self.tick() {
            return Flow::TimedOut;
        }
        if self.chosen.len() == self.bins {
            return if self.remaining_total == 0 {
                self.record()
            } else {
                Flow::Continue
            };
        }
        if !self.counts_consistent() {
            return Flow::Continue;
        }
        // Pick the scarcest uncovered value; bail out if any is uncoverable.
        let mut pick: Option<(usize, usize)> = None;
        for w in 0..self.remaining.len() {
            let need = self.remaining[w];
            if need == 0 {
                continue;
            }
            let mut options = 0;
            let mut capacity = 0;
            for &(p, count) in &self.support[w] {
                if !self.banned[p] && self.selectable(p) {
                    options += 1;
                    capacity += count;
                }
            }
            if capacity < need {
                return Flow::Continue;
            }
            if pick.is_none_or(|(_, best)| options < best) {
                pick = Some((w, options));
            }
        }
        let Some((v, _)) = pick else {
            return Flow::Continue;
        };
        let candidates: Vec<usize> = self.support[v]
            .iter()
            .map(|&(p, _)| p)
            .filter(|&p| !self.banned[p] && self.selectable(p))
            .collect();
        for p in candidates {
            // p is the lowest-index v-pattern of any solution in this subtree.
            let mut newly_banned = Vec::new();
            for &(q, _) in &self.support[v] {
                if q > p {
                    break;
                }
                if !self.banned[q] {
                    self.banned[q] = true;
                    newly_banned.push(q);
                }
            }
            self.apply(p);
            let flow = self.fewest_support();
            self.undo(p);
            for q in newly_banned {
                self.banned[q] = false;
            }
            if flow != Flow::Continue {
                return flow;
            }
        }
        Flow::Continue
    }
}

impl std::fmt::Debug for Search<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Search")
            .field("patterns", &self.ps.len())
            .field("chosen", &self.chosen)
            .field("remaining_total", &self.remaining_total)
            .finish()
    }
}
