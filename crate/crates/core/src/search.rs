//! Exhaustive searches over admissible families: maximum families of
//! `p`-subsets and the classification of admissible 2-set graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{admissible_with, bits, bound_tp, is_cycle_triple, IndexSet, IndexSetFamily, Relaxation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("need 3 <= p <= n/2, got p = {p}, n = {n}")]
    OutOfRange { p: usize, n: usize },
    #[error("{candidates} candidate sets exceed the limit of {limit}")]
    TooManyCandidates { candidates: usize, limit: usize },
    #[error("graph classification supports 4 <= n <= 10, got {0}")]
    GraphRange(usize),
}

/// Upper limit on the candidate universe for [`max_family`].
pub const MAX_CANDIDATES: usize = 20_000;

/// How families containing a 3-cycle of the weight-2 relation are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleRegime {
    /// No three sets of the family form a 3-cycle.
    Forbid,
    /// At least one 3-cycle is present.
    Require,
    /// No condition.
    Any,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn nodes(n: u64) -> Self {
        Budget { max_nodes: Some(n), max_time: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    /// The search tree was exhausted; `max_size` is the maximum.
    Complete,
    /// The budget ran out; `max_size` is only a lower bound.
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub p: usize,
    pub n: usize,
    pub regime: CycleRegime,
    pub relaxation: Relaxation,
    pub max_size: usize,
    pub witness: IndexSetFamily,
    pub nodes_explored: u64,
    #[serde(skip)]
    pub elapsed: Duration,
    pub status: SearchStatus,
}

impl SearchReport {
    pub fn is_complete(&self) -> bool {
        self.status == SearchStatus::Complete
    }
}

/// All `p`-subsets of `{0..n-1}` in lexicographic order of their member lists,
/// keeping only those containing 0 when `2p = n`.
pub fn candidate_sets(p: usize, n: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..p).collect();
    if p > n {
        return out;
    }
    loop {
        let mask = idx.iter().fold(0u64, |a, &i| a | (1 << i));
        if 2 * p != n || mask & 1 != 0 {
            out.push(mask);
        }
        let mut i = p;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - p {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..p {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

struct FamilySearch<'a> {
    n: usize,
    regime: CycleRegime,
    relaxation: Relaxation,
    universe: &'a [u64],
    budget: Budget,
    start: Instant,
    nodes: u64,
    exhausted: bool,
    best: usize,
    best_family: Vec<usize>,
}

impl FamilySearch<'_> {
    fn out_of_budget(&mut self) -> bool {
        if self.exhausted {
            return true;
        }
        let over_nodes = self.budget.max_nodes.is_some_and(|m| self.nodes >= m);
        let over_time = self.nodes % 1024 == 0 && self.budget.max_time.is_some_and(|t| self.start.elapsed() >= t);
        self.exhausted = over_nodes || over_time;
        self.exhausted
    }

    fn masks(&self, family: &[usize]) -> Vec<u64> {
        family.iter().map(|&i| self.universe[i]).collect()
    }

    fn closes_cycle(&self, family: &[usize], a: u64) -> bool {
        for x in 0..family.len() {
            for y in x + 1..family.len() {
                if is_cycle_triple(self.universe[family[x]], self.universe[family[y]], a) {
                    return true;
                }
            }
        }
        false
    }

    fn pair_closes_cycle(&self, family: &[usize], a: u64, b: u64) -> bool {
        family.iter().any(|&x| is_cycle_triple(self.universe[x], a, b))
    }

    /// `family` is admissible, `cands` holds every later set that keeps it so.
    /// The first family of each new size is kept, so the final witness is
    /// the lexicographically first maximum family.
    fn extend(&mut self, family: &mut Vec<usize>, cands: &[usize], has_cycle: bool) {
        self.nodes += 1;
        let counts = self.regime != CycleRegime::Require || has_cycle;
        if counts && family.len() > self.best {
            self.best = family.len();
            self.best_family = family.clone();
        }
        if self.out_of_budget() {
            return;
        }
        let base = self.masks(family);
        for (pos, &c) in cands.iter().enumerate() {
            if family.len() + cands.len() - pos <= self.best {
                break;
            }
            let cm = self.universe[c];
            let mut next = Vec::with_capacity(cands.len() - pos);
            for &d in &cands[pos + 1..] {
                let dm = self.universe[d];
                if !self.relaxation.admits_with(self.n, &base, &[cm, dm]) {
                    continue;
                }
                if self.regime == CycleRegime::Forbid && self.pair_closes_cycle(family, cm, dm) {
                    continue;
                }
                next.push(d);
            }
            let cyc = has_cycle || (self.regime == CycleRegime::Require && self.closes_cycle(family, cm));
            family.push(c);
            self.extend(family, &next, cyc);
            family.pop();
            if self.exhausted {
                return;
            }
        }
    }
}

/// Largest family of `p`-subsets of `{1..n}` passing the default
/// relaxation under `regime`.
pub fn max_family(p: usize, n: usize, regime: CycleRegime, budget: Budget) -> Result<SearchReport, SearchError> {
    max_family_in(p, n, regime, Relaxation::default(), budget)
}

/// Largest family of `p`-subsets of `{1..n}` passing `relaxation` under `regime`.
///
/// The first set is fixed to `{1..p}` (every predicate is invariant under
/// relabelings, and when `2p = n` those fixing 1 keep the normalization).
/// The witness is the first maximum family in lexicographic extension order.
pub fn max_family_in(
    p: usize,
    n: usize,
    regime: CycleRegime,
    relaxation: Relaxation,
    budget: Budget,
) -> Result<SearchReport, SearchError> {
    if p < 3 || 2 * p > n || n > 64 {
        return Err(SearchError::OutOfRange { p, n });
    }
    let universe = candidate_sets(p, n);
    if universe.len() > MAX_CANDIDATES {
        return Err(SearchError::TooManyCandidates { candidates: universe.len(), limit: MAX_CANDIDATES });
    }
    let start = Instant::now();
    let mut search = FamilySearch {
        n,
        regime,
        relaxation,
        universe: &universe,
        budget,
        start,
        nodes: 0,
        exhausted: false,
        best: 0,
        best_family: Vec::new(),
    };
    let first = universe[0];
    let cands: Vec<usize> = (1..universe.len())
        .filter(|&d| relaxation.admits(n, &[first, universe[d]]))
        .collect();
    let mut family = vec![0];
    search.extend(&mut family, &cands, false);
    let status = if search.exhausted { SearchStatus::BudgetExhausted } else { SearchStatus::Complete };
    let sets = search
        .best_family
        .iter()
        .map(|&i| IndexSet::from_mask(n, universe[i]).expect("candidates are normalized"))
        .collect();
    Ok(SearchReport {
        p,
        n,
        regime,
        relaxation,
        max_size: search.best,
        witness: IndexSetFamily::new(n, sets).expect("same n"),
        nodes_explored: search.nodes,
        elapsed: start.elapsed(),
        status,
    })
}

/// Maximum family of 4-subsets of `{1..8}` (all containing 1).
pub fn verify_t4_n8() -> SearchReport {
    max_family(4, 8, CycleRegime::Any, Budget::unlimited()).expect("(4, 8) is in range")
}

/// Whether the report respects `bound_tp(p, n)`; `None` when the search did
/// not finish.
pub fn confirms_bound(report: &SearchReport) -> Option<bool> {
    let bound = bound_tp(report.p, report.n).ok()?;
    report.is_complete().then_some(report.max_size <= bound)
}

/// A family of 2-sets and singletons on `n` vertices: an edge set plus marked
/// vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct SmallGraph {
    /// `adj[i]` bit `j` set when `{i, j}` is in the family
    adj: [u16; 16],
    marks: u16,
}

impl SmallGraph {
    fn empty() -> Self {
        SmallGraph { adj: [0; 16], marks: 0 }
    }

    fn masks(&self, n: usize) -> Vec<u64> {
        let mut out = Vec::new();
        for i in 0..n {
            for j in bits(self.adj[i] as u64).filter(|&j| j > i) {
                out.push((1u64 << i) | (1u64 << j));
            }
        }
        out.extend(bits(self.marks as u64).map(|i| 1u64 << i));
        out
    }

    fn edges(&self, n: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..n {
            out.extend(bits(self.adj[i] as u64).filter(|&j| j > i).map(|j| (i, j)));
        }
        out
    }

    fn degree(&self, i: usize) -> u32 {
        self.adj[i].count_ones()
    }

    fn relabel(&self, n: usize, perm: &[usize]) -> SmallGraph {
        let mut g = SmallGraph::empty();
        for i in 0..n {
            for j in bits(self.adj[i] as u64) {
                g.adj[perm[i]] |= 1 << perm[j];
            }
            if self.marks & (1 << i) != 0 {
                g.marks |= 1 << perm[i];
            }
        }
        g
    }

    /// Canonical representative under vertex relabeling: vertices are
    /// ordered by a refinement invariant, then every order within equal
    /// classes is tried and the smallest relabeled graph kept.
    fn canonical(&self, n: usize) -> SmallGraph {
        let inv: Vec<(bool, bool, u32, Vec<(u32, bool)>)> = (0..n)
            .map(|i| {
                let mut nb: Vec<(u32, bool)> = bits(self.adj[i] as u64)
                    .map(|j| (self.degree(j), self.marks & (1 << j) != 0))
                    .collect();
                nb.sort();
                let isolated = self.degree(i) == 0 && self.marks & (1 << i) == 0;
                (isolated, self.marks & (1 << i) != 0, self.degree(i), nb)
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| inv[a].cmp(&inv[b]));
        let mut cells: Vec<Vec<usize>> = Vec::new();
        for &v in &order {
            match cells.last_mut() {
                Some(c) if inv[c[0]] == inv[v] && !inv[v].0 => c.push(v),
                _ if inv[v].0 => match cells.last_mut() {
                    // isolated unmarked vertices are interchangeable: one cell, one order
                    Some(c) if inv[c[0]].0 => c.push(v),
                    _ => cells.push(vec![v]),
                },
                _ => cells.push(vec![v]),
            }
        }
        let mut best: Option<SmallGraph> = None;
        let mut seq: Vec<usize> = Vec::with_capacity(n);
        self.permute_cells(n, &cells, 0, &mut seq, &inv, &mut best);
        best.expect("at least one ordering")
    }

    fn permute_cells(
        &self,
        n: usize,
        cells: &[Vec<usize>],
        k: usize,
        seq: &mut Vec<usize>,
        inv: &[(bool, bool, u32, Vec<(u32, bool)>)],
        best: &mut Option<SmallGraph>,
    ) {
        if k == cells.len() {
            let mut perm = vec![0; n];
            for (pos, &v) in seq.iter().enumerate() {
                perm[v] = pos;
            }
            let g = self.relabel(n, &perm);
            if best.is_none_or(|b| g < b) {
                *best = Some(g);
            }
            return;
        }
        let cell = &cells[k];
        if inv[cell[0]].0 {
            seq.extend_from_slice(cell);
            self.permute_cells(n, cells, k + 1, seq, inv, best);
            seq.truncate(seq.len() - cell.len());
            return;
        }
        let mut items = cell.clone();
        permutations(&mut items, 0, &mut |p| {
            seq.extend_from_slice(p);
            self.permute_cells(n, cells, k + 1, seq, inv, best);
            seq.truncate(seq.len() - p.len());
        });
    }
}

fn permutations(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, f);
        items.swap(k, i);
    }
}

/// Structure of an admissible 2-set graph as far as the classification needs it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GraphClass {
    pub edges: Vec<(usize, usize)>,
    pub marked: Vec<usize>,
    pub is_c5: bool,
    pub in_k33: bool,
}

impl GraphClass {
    fn of(g: &SmallGraph, n: usize) -> Self {
        let edges = g.edges(n);
        let marked = bits(g.marks as u64).collect();
        GraphClass { is_c5: is_c5(g, n), in_k33: in_k33(g, n), edges, marked }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

fn non_isolated(g: &SmallGraph, n: usize) -> u16 {
    (0..n).filter(|&i| g.adj[i] != 0).fold(0, |a, i| a | (1 << i))
}

fn is_c5(g: &SmallGraph, n: usize) -> bool {
    let vs = non_isolated(g, n);
    if vs.count_ones() != 5 || (0..n).any(|i| g.adj[i] != 0 && g.degree(i) != 2) {
        return false;
    }
    // connected 2-regular on five vertices
    let start = vs.trailing_zeros() as usize;
    let mut seen = 1u16 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0;
        for i in bits(frontier as u64) {
            next |= g.adj[i];
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen == vs
}

/// Edges fit in a complete bipartite graph with both sides of size at most 3.
fn in_k33(g: &SmallGraph, n: usize) -> bool {
    let vs = non_isolated(g, n);
    if vs.count_ones() > 6 {
        return false;
    }
    let verts: Vec<usize> = bits(vs as u64).collect();
    (0u32..1 << verts.len()).any(|side| {
        let left: u16 = verts.iter().enumerate().filter(|(k, _)| side & (1 << k) != 0).fold(0, |a, (_, &v)| a | (1 << v));
        let right = vs & !left;
        left.count_ones() <= 3
            && right.count_ones() <= 3
            && verts.iter().all(|&v| {
                let same = if left & (1 << v) != 0 { left } else { right };
                g.adj[v] & same == 0
            })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphClassification {
    pub n: usize,
    pub with_singletons: bool,
    /// Number of admissible families up to relabeling.
    pub admissible_classes: usize,
    /// Maximal admissible families up to relabeling.
    pub maximal: Vec<GraphClass>,
    /// Largest `t1 + t2` and every `(t1, t2)` attaining it.
    pub max_total: usize,
    pub max_profiles: Vec<(usize, usize)>,
    /// The families attaining the largest total.
    pub extremal: Vec<GraphClass>,
}

/// Every admissible family of 2-sets (and singletons when `with_singletons`)
/// on `n` indices, up to relabeling, grown one set at a time.
pub fn classify(n: usize, with_singletons: bool) -> Result<GraphClassification, SearchError> {
    if !(4..=10).contains(&n) {
        return Err(SearchError::GraphRange(n));
    }
    let mut level: BTreeSet<SmallGraph> = BTreeSet::from([SmallGraph::empty()]);
    let mut classes = 0;
    let mut maximal = Vec::new();
    let mut by_total: BTreeMap<usize, Vec<SmallGraph>> = BTreeMap::new();
    while !level.is_empty() {
        let mut next = BTreeSet::new();
        for g in &level {
            classes += 1;
            let base = g.masks(n);
            by_total.entry(base.len()).or_default().push(*g);
            let mut extended = false;
            for i in 0..n {
                for j in i + 1..n {
                    if g.adj[i] & (1 << j) != 0 {
                        continue;
                    }
                    let m = (1u64 << i) | (1u64 << j);
                    if IndexSet::from_mask(n, m).is_err() || !admissible_with(n, &base, &[m]) {
                        continue;
                    }
                    extended = true;
                    let mut h = *g;
                    h.adj[i] |= 1 << j;
                    h.adj[j] |= 1 << i;
                    next.insert(h.canonical(n));
                }
                if with_singletons && g.marks & (1 << i) == 0 {
                    let m = 1u64 << i;
                    if admissible_with(n, &base, &[m]) {
                        extended = true;
                        let mut h = *g;
                        h.marks |= 1 << i;
                        next.insert(h.canonical(n));
                    }
                }
            }
            if !extended {
                maximal.push(GraphClass::of(g, n));
            }
        }
        level = next;
    }
    let (&max_total, extremal) = by_total.iter().next_back().expect("the empty family is admissible");
    let mut max_profiles: Vec<(usize, usize)> = extremal
        .iter()
        .map(|g| (g.marks.count_ones() as usize, g.edges(n).len()))
        .collect();
    max_profiles.sort();
    max_profiles.dedup();
    maximal.sort();
    let mut extremal: Vec<GraphClass> = extremal.iter().map(|g| GraphClass::of(g, n)).collect();
    extremal.sort();
    Ok(GraphClassification { n, with_singletons, admissible_classes: classes, maximal, max_total, max_profiles, extremal })
}

/// Maximal admissible families of 2-sets on `n` indices, up to relabeling.
pub fn classify_equiv_graphs(n: usize) -> Result<Vec<GraphClass>, SearchError> {
    Ok(classify(n, false)?.maximal)
}
