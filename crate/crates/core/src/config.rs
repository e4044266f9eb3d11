//! Index-set configurations: weights, the admissibility predicates and the
//! per-type bounds.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("n = {0} is outside the supported range 1..=64")]
    BadDimension(usize),
    #[error("index {index} out of range for n = {n}")]
    OutOfRange { index: usize, n: usize },
    #[error("index set has {size} > n/2 elements (n = {n})")]
    TooLarge { size: usize, n: usize },
    #[error("index set of size n/2 must contain the first index")]
    NotNormalized,
    #[error("duplicate index {0}")]
    Duplicate(usize),
    #[error("bound undefined for p = {p}, n = {n}")]
    BoundOutOfRange { p: usize, n: usize },
}

/// Subset `I` of `{0..n-1}` (printed 1-based) with `|I| <= n/2`, and the
/// first index present when `|I| = n/2`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet {
    n: u8,
    mask: u64,
}

impl IndexSet {
    pub fn new(n: usize, members: &[usize]) -> Result<Self, ConfigError> {
        check_dim(n)?;
        let mut mask = 0u64;
        for &i in members {
            if i >= n {
                return Err(ConfigError::OutOfRange { index: i, n });
            }
            if mask & (1 << i) != 0 {
                return Err(ConfigError::Duplicate(i));
            }
            mask |= 1 << i;
        }
        IndexSet::from_mask(n, mask)
    }

    pub fn from_mask(n: usize, mask: u64) -> Result<Self, ConfigError> {
        check_dim(n)?;
        if n < 64 && mask >> n != 0 {
            return Err(ConfigError::OutOfRange { index: 63 - mask.leading_zeros() as usize, n });
        }
        let size = mask.count_ones() as usize;
        if 2 * size > n {
            return Err(ConfigError::TooLarge { size, n });
        }
        if 2 * size == n && size > 0 && mask & 1 == 0 {
            return Err(ConfigError::NotNormalized);
        }
        Ok(IndexSet { n: n as u8, mask })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        i < 64 && self.mask & (1 << i) != 0
    }

    /// Zero-based members in increasing order.
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        bits(self.mask)
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Serialize, Deserialize)]
struct IndexSetRepr {
    n: usize,
    members: Vec<usize>,
}

impl Serialize for IndexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IndexSetRepr { n: self.n(), members: self.members().map(|i| i + 1).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = IndexSetRepr::deserialize(d)?;
        let zero_based: Vec<usize> = r
            .members
            .iter()
            .map(|&i| i.checked_sub(1).ok_or_else(|| serde::de::Error::custom("members are 1-based")))
            .collect::<Result<_, _>>()?;
        IndexSet::new(r.n, &zero_based).map_err(serde::de::Error::custom)
    }
}

fn check_dim(n: usize) -> Result<(), ConfigError> {
    if n == 0 || n > 64 {
        return Err(ConfigError::BadDimension(n));
    }
    Ok(())
}

pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

/// A family of index sets over a common `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSetFamily {
    pub n: usize,
    pub sets: Vec<IndexSet>,
}

impl IndexSetFamily {
    pub fn new(n: usize, sets: Vec<IndexSet>) -> Result<Self, ConfigError> {
        check_dim(n)?;
        if let Some(s) = sets.iter().find(|s| s.n() != n) {
            return Err(ConfigError::BadDimension(s.n()));
        }
        Ok(IndexSetFamily { n, sets })
    }

    pub fn masks(&self) -> Vec<u64> {
        self.sets.iter().map(IndexSet::mask).collect()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn weights(&self) -> WeightProfile {
        WeightProfile::of(self.n, &self.masks())
    }

    pub fn is_admissible(&self) -> bool {
        admissible(self.n, &self.masks())
    }
}

/// Weight of each index (how many sets contain it) and the sets `W_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightProfile {
    pub weights: Vec<usize>,
    /// `w[k]` = mask of indices of weight exactly `k`, `k = 0..=r`
    pub w: Vec<u64>,
    /// Size of the union of the sets.
    pub m: usize,
}

impl WeightProfile {
    pub fn of(n: usize, sets: &[u64]) -> Self {
        let weights: Vec<usize> = (0..n).map(|i| sets.iter().filter(|&&s| s & (1 << i) != 0).count()).collect();
        let mut w = vec![0u64; sets.len() + 1];
        for (i, &k) in weights.iter().enumerate() {
            w[k] |= 1 << i;
        }
        let m = weights.iter().filter(|&&k| k > 0).count();
        WeightProfile { weights, w, m }
    }

    pub fn w_k(&self, k: usize) -> u64 {
        self.w.get(k).copied().unwrap_or(0)
    }

    pub fn even(&self) -> u64 {
        self.w.iter().step_by(2).fold(0, |a, b| a | b)
    }

    pub fn odd(&self) -> u64 {
        self.w.iter().skip(1).step_by(2).fold(0, |a, b| a | b)
    }
}

/// Masks of indices of weight exactly 1, 2 and 3 for up to 7 sets, via
/// bit-sliced counters.
#[derive(Clone, Copy, Debug)]
struct SmallWeights {
    w1: u64,
    w2: u64,
    w3: u64,
    w4: u64,
    union: u64,
}

fn small_weights(sets: &[u64]) -> SmallWeights {
    debug_assert!(sets.len() <= 7);
    let (mut b0, mut b1, mut b2) = (0u64, 0u64, 0u64);
    for &s in sets {
        let c0 = b0 & s;
        b0 ^= s;
        let c1 = b1 & c0;
        b1 ^= c0;
        b2 ^= c1;
    }
    SmallWeights {
        w1: b0 & !b1 & !b2,
        w2: !b0 & b1 & !b2,
        w3: b0 & b1 & !b2,
        w4: !b0 & !b1 & b2,
        union: b0 | b1 | b2,
    }
}

/// Adjacency of the relation "share an index of weight 2" inside `sets`.
fn sim_adjacency(sets: &[u64], w2: u64) -> Vec<u8> {
    let r = sets.len();
    let mut adj = vec![0u8; r];
    for a in 0..r {
        for b in a + 1..r {
            if sets[a] & sets[b] & w2 != 0 {
                adj[a] |= 1 << b;
                adj[b] |= 1 << a;
            }
        }
    }
    adj
}

/// At most four sets of size 1.
pub fn c1_type1(sets: &[u64]) -> bool {
    sets.iter().filter(|s| s.count_ones() == 1).count() <= 4
}

/// Weight-1 condition on `3 <= r <= 5` sets. When every set has an index of
/// weight 1 (and, for `r = 3`, some index has weight 3): `r <= 4`, each set
/// has exactly one weight-1 index, `|W_3| = 1` when `r = 3`, and
/// `W_3 = W_4 = {}` when `r = 4`.
pub fn c2_weight1(sets: &[u64]) -> bool {
    let r = sets.len();
    if !(3..=5).contains(&r) {
        return true;
    }
    let w = small_weights(sets);
    let hypothesis = sets.iter().all(|s| s & w.w1 != 0) && (r != 3 || w.w3 != 0);
    if !hypothesis {
        return true;
    }
    if r == 5 || sets.iter().any(|s| (s & w.w1).count_ones() != 1) {
        return false;
    }
    match r {
        3 => w.w3.count_ones() == 1,
        _ => w.w3 == 0 && w.w4 == 0,
    }
}

/// Shape of the weight-2 relation graph on a small subfamily.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SimShape {
    Cycle,
    Star,
    Other,
}

fn sim_shape(sets: &[u64], w2: u64) -> SimShape {
    let r = sets.len();
    let adj = sim_adjacency(sets, w2);
    let deg: Vec<u32> = adj.iter().map(|a| a.count_ones()).collect();
    match r {
        // a 2-regular graph on 3 or 5 vertices is a single cycle
        3 | 5 if deg.iter().all(|&d| d == 2) => SimShape::Cycle,
        4 if deg.iter().filter(|&&d| d == 3).count() == 1 && deg.iter().filter(|&&d| d == 1).count() == 3 => {
            SimShape::Star
        }
        _ => SimShape::Other,
    }
}

/// Cycle/star condition on `3 <= r <= 5` sets: when the relation graph is a
/// 3-cycle, a 4-star or a 5-cycle, `n` is `m` or `m + 1`, and when `n = m + 1`
/// the number of weight-2 indices equals the number of edges.
pub fn c3_cycle_star(n: usize, sets: &[u64]) -> bool {
    let r = sets.len();
    if !(3..=5).contains(&r) {
        return true;
    }
    let w = small_weights(sets);
    let edges = match sim_shape(sets, w.w2) {
        SimShape::Cycle => r as u32,
        SimShape::Star => 3,
        SimShape::Other => return true,
    };
    let m = w.union.count_ones() as usize;
    if n == m {
        true
    } else if n == m + 1 {
        w.w2.count_ones() == edges
    } else {
        false
    }
}

/// Three sets of a common size `p >= 3` with a common index: the relation
/// graph is a path and some set has no weight-1 index. Vacuous for
/// `(p, n) = (4, 8)`.
pub fn c4_triple(n: usize, a: u64, b: u64, c: u64) -> bool {
    let p = a.count_ones();
    if p < 3 || b.count_ones() != p || c.count_ones() != p {
        return true;
    }
    if a & b & c == 0 || (p == 4 && n == 8) {
        return true;
    }
    let sets = [a, b, c];
    let w = small_weights(&sets);
    let edges: u32 = sim_adjacency(&sets, w.w2).iter().map(|x| x.count_ones()).sum::<u32>() / 2;
    edges == 2 && sets.iter().any(|s| s & w.w1 == 0)
}

/// Whether the three sets form a 3-cycle of the weight-2 relation.
pub fn is_cycle_triple(a: u64, b: u64, c: u64) -> bool {
    let sets = [a, b, c];
    let w = small_weights(&sets);
    sim_shape(&sets, w.w2) == SimShape::Cycle
}

fn subfamily_ok(n: usize, sub: &[u64]) -> bool {
    if !c2_weight1(sub) || !c3_cycle_star(n, sub) {
        return false;
    }
    sub.len() != 3 || c4_triple(n, sub[0], sub[1], sub[2])
}

/// All four predicates on every subfamily of size 3 to 5.
pub fn admissible(n: usize, sets: &[u64]) -> bool {
    if !c1_type1(sets) {
        return false;
    }
    let r = sets.len();
    let mut sub = Vec::with_capacity(5);
    for k in 3..=5.min(r) {
        if !for_each_subset(r, k, &mut |idx| {
            sub.clear();
            sub.extend(idx.iter().map(|&i| sets[i]));
            subfamily_ok(n, &sub)
        }) {
            return false;
        }
    }
    true
}

/// Admissibility of `base + [extra..]` given that `base` is admissible: only
/// subfamilies containing every set of `extra` are checked.
pub fn admissible_with(n: usize, base: &[u64], extra: &[u64]) -> bool {
    let mut all: Vec<u64> = base.to_vec();
    all.extend_from_slice(extra);
    if !c1_type1(&all) {
        return false;
    }
    let e = extra.len();
    let r = base.len();
    let mut sub = Vec::with_capacity(5);
    for k in 3..=5 {
        if k < e || k - e > r {
            continue;
        }
        if !for_each_subset(r, k - e, &mut |idx| {
            sub.clear();
            sub.extend(idx.iter().map(|&i| base[i]));
            sub.extend_from_slice(extra);
            subfamily_ok(n, &sub)
        }) {
            return false;
        }
    }
    true
}

/// Rank over Q of a small integer matrix (fraction-free elimination).
fn small_rank(mut rows: Vec<Vec<i64>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = 1i64;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else { continue };
        rows.swap(rank, piv);
        for r in rank + 1..rows.len() {
            for k in c + 1..cols {
                rows[r][k] = (rows[rank][c] * rows[r][k] - rows[r][c] * rows[rank][k]) / prev;
            }
            rows[r][c] = 0;
        }
        prev = rows[rank][c];
        rank += 1;
    }
    rank
}

/// Whether the vectors `e - sum_{i in I} e_i` for `I` in `sub` (an even
/// number of them), completed by basis vectors `e_j`, give fewer than `n`
/// independent vectors summing into `2L`.
fn short_even_sum(n: usize, sub: &[u64]) -> bool {
    let t = sub.len();
    if t % 2 == 1 || t >= n {
        return false;
    }
    // coordinate j of the half-sum is t/2 - c_j; its parity decides whether
    // e_j is needed to reach 2L
    let mut odd = 0u64;
    for j in 0..n {
        let c = sub.iter().filter(|&&s| s & (1 << j) != 0).count();
        if (t / 2 + c) % 2 == 1 {
            odd |= 1 << j;
        }
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    [odd, full & !odd].into_iter().any(|fix| {
        if t + fix.count_ones() as usize >= n {
            return false;
        }
        let free: Vec<usize> = (0..n).filter(|&j| fix & (1 << j) == 0).collect();
        let rows = sub.iter().map(|&s| free.iter().map(|&j| if s & (1 << j) != 0 { -1 } else { 1 }).collect()).collect();
        small_rank(rows) == t
    })
}

/// Length condition: no even subfamily of the sets, completed by basis
/// vectors, gives fewer than `n` independent vectors summing into `2L`.
pub fn length_parity(n: usize, sets: &[u64]) -> bool {
    length_parity_with(n, sets, &[])
}

/// [`length_parity`] for `base + extra`, checking only subfamilies that
/// contain every set of `extra`.
pub fn length_parity_with(n: usize, base: &[u64], extra: &[u64]) -> bool {
    let mut sub = Vec::with_capacity(n);
    let e = extra.len();
    if extra.is_empty() {
        // full check: every subfamily of base
        for k in (2..n.min(base.len() + 1)).step_by(2) {
            if !for_each_subset(base.len(), k, &mut |idx| {
                sub.clear();
                sub.extend(idx.iter().map(|&i| base[i]));
                !short_even_sum(n, &sub)
            }) {
                return false;
            }
        }
        return true;
    }
    for k in e..n {
        if (k - e) > base.len() || k % 2 == 1 {
            continue;
        }
        if !for_each_subset(base.len(), k - e, &mut |idx| {
            sub.clear();
            sub.extend(idx.iter().map(|&i| base[i]));
            sub.extend_from_slice(extra);
            !short_even_sum(n, &sub)
        }) {
            return false;
        }
    }
    true
}

/// Which necessary conditions a family must satisfy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relaxation {
    /// The four configuration predicates only.
    Predicates,
    /// The predicates plus [`length_parity`].
    #[default]
    WithLength,
}

impl Relaxation {
    pub fn admits(self, n: usize, sets: &[u64]) -> bool {
        admissible(n, sets) && (self == Relaxation::Predicates || length_parity(n, sets))
    }

    /// Incremental form of [`Relaxation::admits`]: `base` already passes.
    pub fn admits_with(self, n: usize, base: &[u64], extra: &[u64]) -> bool {
        admissible_with(n, base, extra) && (self == Relaxation::Predicates || length_parity_with(n, base, extra))
    }
}

/// Calls `f` on every increasing `k`-subset of `0..r`; stops at the first `false`.
pub(crate) fn for_each_subset(r: usize, k: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if k > r {
        return true;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !f(&idx) {
            return false;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if idx[i] != i + r - k {
                break;
            }
            if i == 0 {
                return true;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Graph on the sets: `A ~ B` when they share an index of weight 2 in the family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl SimGraph {
    pub fn of(sets: &[u64]) -> Self {
        let w = WeightProfile::of(64, sets);
        let w2 = w.w_k(2);
        let mut edges = Vec::new();
        for a in 0..sets.len() {
            for b in a + 1..sets.len() {
                if sets[a] & sets[b] & w2 != 0 {
                    edges.push((a, b));
                }
            }
        }
        SimGraph { vertices: sets.len(), edges }
    }
}

/// A family of 2-sets read as a graph on `{0..n-1}`, with optional marks for
/// singletons in mixed families.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EquivGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub marked: Vec<usize>,
}

impl EquivGraph {
    pub fn of(family: &IndexSetFamily) -> Self {
        let mut edges = Vec::new();
        let mut marked = Vec::new();
        for s in &family.sets {
            let m: Vec<usize> = s.members().collect();
            match m.len() {
                1 => marked.push(m[0]),
                2 => edges.push((m[0], m[1])),
                _ => {}
            }
        }
        edges.sort();
        marked.sort();
        EquivGraph { n: family.n, edges, marked }
    }

    pub fn masks(&self) -> Vec<u64> {
        self.edges
            .iter()
            .map(|&(a, b)| (1u64 << a) | (1u64 << b))
            .chain(self.marked.iter().map(|&a| 1u64 << a))
            .collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }
}

/// Bound on the number of type-`p` sets from the size conditions.
pub fn bound_t1(p: usize, n: usize) -> Result<usize, ConfigError> {
    match (p, n) {
        (4, 8) => Ok(6),
        (3, 7) => Ok(7),
        _ if p >= 4 && n >= 2 * p + 2 => Ok(p + 6),
        _ if (p >= 4 && n == 2 * p + 1) || (p == 3 && n >= 8) => Ok(p + 5),
        _ if p != 4 && p >= 3 && n == 2 * p => Ok(p + 1),
        _ => Err(ConfigError::BoundOutOfRange { p, n }),
    }
}

/// Second bound, defined for `2p + 1 <= n <= 3p - 2`.
pub fn bound_t2(p: usize, n: usize) -> Option<usize> {
    if p < 3 || n < 2 * p + 1 || n + 2 > 3 * p {
        return None;
    }
    if n + 2 == 3 * p && p >= 4 {
        Some(p + 2)
    } else {
        Some(n)
    }
}

/// `max(T1, T2)`.
pub fn bound_tp(p: usize, n: usize) -> Result<usize, ConfigError> {
    let t1 = bound_t1(p, n)?;
    Ok(bound_t2(p, n).map_or(t1, |t2| t1.max(t2)))
}
