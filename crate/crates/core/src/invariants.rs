//! Maximal index, length, the index-2 frame with its type profile, and
//! perfection.

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::IndexSet;
use crate::exactmath::{det_exact, rank_exact, smith_invariants, solve_rational, GramSchmidt, IntMatrix, MathError};
use crate::lattice::{minimal_vectors, GramMatrix, LatticeError, MinimalVectorSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Math(#[from] MathError),
    #[error("lattice is not well rounded (minimal vectors span rank {rank} < {dim})")]
    NotWellRounded { rank: usize, dim: usize },
    #[error("maximal index is {found}, expected 2")]
    WrongMaximalIndex { found: u64 },
    #[error("length is {found}, expected the dimension {dim}")]
    WrongLength { found: usize, dim: usize },
    #[error("subset of minimal vectors has rank {rank} < {dim}")]
    RankDeficient { rank: usize, dim: usize },
    #[error("dimension {0} too large for bitmask index sets")]
    DimensionTooLarge(usize),
    #[error("frame construction failed: {0}")]
    Frame(String),
}

/// Pairwise inner products of a fixed list of vectors.
struct InnerTable {
    ip: Vec<Vec<BigInt>>,
}

impl InnerTable {
    fn new(g: &GramMatrix, vectors: &[Vec<i64>]) -> Self {
        let ip = vectors
            .iter()
            .map(|x| vectors.iter().map(|y| g.inner(x, y)).collect())
            .collect();
        InnerTable { ip }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalIndex {
    pub index: u64,
    /// Positions in the canonical minimal-vector list.
    pub witness: Vec<usize>,
    /// The witness vectors' coordinates.
    pub vectors: Vec<Vec<i64>>,
}

/// Depth-first search over increasing index subsets, pruned by independence
/// (Gram minor zero) and by the bound `d_k * min^(n-k) <= best^2 * det G`.
struct IndexSearch<'a> {
    table: &'a InnerTable,
    det: &'a BigInt,
    n: usize,
    /// `min^j` for `j = 0..=n`
    min_pow: Vec<BigInt>,
}

impl<'a> IndexSearch<'a> {
    fn new(table: &'a InnerTable, min: &'a BigInt, det: &'a BigInt, n: usize) -> Self {
        let mut min_pow = vec![BigInt::one()];
        for j in 0..n {
            let next = &min_pow[j] * min;
            min_pow.push(next);
        }
        IndexSearch { table, det, n, min_pow }
    }

    fn index_of(&self, gram_det: &BigInt) -> u64 {
        let sq = gram_det / self.det;
        debug_assert!((&sq * self.det) == *gram_det);
        let r = sq.sqrt();
        debug_assert!(&r * &r == sq);
        r.to_u64().expect("index fits in u64")
    }

    /// Can a completion of the current partial subset reach `target`
    /// (strictly exceed it when `strict`)?
    fn promising(&self, gs: &GramSchmidt, target: u64, strict: bool) -> bool {
        let k = gs.len();
        let lhs = gs.gram_det() * &self.min_pow[self.n - k];
        let rhs = BigInt::from(target) * BigInt::from(target) * self.det;
        if strict {
            lhs > rhs
        } else {
            lhs >= rhs
        }
    }

    fn push(&self, gs: &mut GramSchmidt, chosen: &[usize], v: usize) -> bool {
        let ip = &self.table.ip;
        let d = gs.push(&ip[v][v], |j| ip[v][chosen[j]].clone());
        !d.is_zero()
    }

    /// Largest index in the subtree below `chosen`; `best` is the shared incumbent.
    fn maximize(&self, gs: &mut GramSchmidt, chosen: &mut Vec<usize>, best: &AtomicU64) {
        let s = self.table.ip.len();
        let k = chosen.len();
        if k == self.n {
            let idx = self.index_of(gs.gram_det());
            best.fetch_max(idx, Ordering::Relaxed);
            return;
        }
        let start = chosen.last().map_or(0, |&l| l + 1);
        for v in start..s {
            if s - v < self.n - k {
                break;
            }
            if !self.push(gs, chosen, v) {
                continue;
            }
            chosen.push(v);
            if self.promising(gs, best.load(Ordering::Relaxed), true) {
                self.maximize(gs, chosen, best);
            }
            chosen.pop();
            gs.pop();
        }
    }

    /// First subset in lexicographic order whose index equals `target`.
    fn first_attaining(&self, gs: &mut GramSchmidt, chosen: &mut Vec<usize>, target: u64) -> bool {
        let s = self.table.ip.len();
        let k = chosen.len();
        if k == self.n {
            return self.index_of(gs.gram_det()) == target;
        }
        let start = chosen.last().map_or(0, |&l| l + 1);
        for v in start..s {
            if s - v < self.n - k {
                break;
            }
            if !self.push(gs, chosen, v) {
                continue;
            }
            chosen.push(v);
            if self.promising(gs, target, false) && self.first_attaining(gs, chosen, target) {
                return true;
            }
            chosen.pop();
            gs.pop();
        }
        false
    }
}

fn require_well_rounded(g: &GramMatrix, mv: &MinimalVectorSet) -> Result<(), InvariantError> {
    let rank = rank_exact(&mv.coordinate_matrix());
    if rank < g.dim() {
        return Err(InvariantError::NotWellRounded { rank, dim: g.dim() });
    }
    Ok(())
}

/// Maximal index over sublattices spanned by `n` independent minimal vectors,
/// with the lexicographically first witness subset attaining it.
pub fn maximal_index(g: &GramMatrix) -> Result<MaximalIndex, InvariantError> {
    let mv = minimal_vectors(g)?;
    maximal_index_of(g, &mv)
}

pub fn maximal_index_of(g: &GramMatrix, mv: &MinimalVectorSet) -> Result<MaximalIndex, InvariantError> {
    require_well_rounded(g, mv)?;
    let n = g.dim();
    let table = InnerTable::new(g, &mv.vectors);
    let det = g.det();
    let search = IndexSearch::new(&table, &mv.min_norm, &det, n);
    let best = AtomicU64::new(0);
    (0..mv.s()).into_par_iter().for_each(|first| {
        let mut gs = GramSchmidt::new();
        let mut chosen = Vec::with_capacity(n);
        if search.push(&mut gs, &chosen, first) {
            chosen.push(first);
            search.maximize(&mut gs, &mut chosen, &best);
        }
    });
    let index = best.load(Ordering::Relaxed);
    let mut gs = GramSchmidt::new();
    let mut witness = Vec::with_capacity(n);
    let found = search.first_attaining(&mut gs, &mut witness, index);
    assert!(found, "witness search must find the maximum it certified");
    let vectors: Vec<Vec<i64>> = witness.iter().map(|&i| mv.vectors[i].clone()).collect();
    let d = det_exact(&IntMatrix::from_rows(&vectors)?)?;
    assert_eq!(d.abs(), BigInt::from(index), "Gram-minor index must match coordinate determinant");
    Ok(MaximalIndex { index, witness, vectors })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Length {
    pub length: usize,
    pub witness: Vec<Vec<i64>>,
}

fn parity_mask(x: &[i64]) -> Result<u64, InvariantError> {
    if x.len() > 64 {
        return Err(InvariantError::DimensionTooLarge(x.len()));
    }
    Ok(x.iter().enumerate().fold(0u64, |acc, (i, &c)| acc | (((c & 1) as u64) << i)))
}

/// Length of a lattice of maximal index 2: the least number of independent
/// minimal vectors whose sum lies in `2L`.
pub fn length(g: &GramMatrix) -> Result<Length, InvariantError> {
    let mv = minimal_vectors(g)?;
    let mi = maximal_index_of(g, &mv)?;
    length_of(g, &mv, &mi)
}

pub fn length_of(g: &GramMatrix, mv: &MinimalVectorSet, mi: &MaximalIndex) -> Result<Length, InvariantError> {
    if mi.index != 2 {
        return Err(InvariantError::WrongMaximalIndex { found: mi.index });
    }
    let n = g.dim();
    let table = InnerTable::new(g, &mv.vectors);
    let parity: Vec<u64> = mv.vectors.iter().map(|x| parity_mask(x)).collect::<Result<_, _>>()?;
    for k in 1..=n {
        let mut gs = GramSchmidt::new();
        let mut chosen = Vec::with_capacity(k);
        if congruent_subset(&table, &parity, k, 0, &mut gs, &mut chosen) {
            let witness = chosen.iter().map(|&i| mv.vectors[i].clone()).collect();
            return Ok(Length { length: k, witness });
        }
    }
    Err(InvariantError::Frame(format!(
        "no independent congruent subset of size <= {n}; maximal index 2 should guarantee one"
    )))
}

/// Lexicographically first independent `k`-subset whose parity masks XOR to zero.
fn congruent_subset(
    table: &InnerTable,
    parity: &[u64],
    k: usize,
    acc: u64,
    gs: &mut GramSchmidt,
    chosen: &mut Vec<usize>,
) -> bool {
    let s = parity.len();
    let start = chosen.last().map_or(0, |&l| l + 1);
    let last = chosen.len() + 1 == k;
    for v in start..s {
        if s - v < k - chosen.len() {
            break;
        }
        // congruence is the cheap test; only the last element is constrained
        if last && parity[v] != acc {
            continue;
        }
        let d = gs.push(&table.ip[v][v], |j| table.ip[v][chosen[j]].clone());
        if d.is_zero() {
            continue;
        }
        chosen.push(v);
        if last || congruent_subset(table, parity, k, acc ^ parity[v], gs, chosen) {
            return true;
        }
        chosen.pop();
        gs.pop();
    }
    false
}

/// A minimal vector written as `e - sum_{i in I} e_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FramedVector {
    /// Coordinates in the input basis (canonical sign as stored in the
    /// minimal-vector list; the index set may describe its negative).
    pub vector: Vec<i64>,
    pub index_set: IndexSet,
}

/// Index-2 sublattice `L0 = <e_1..e_n>` spanned by minimal vectors, with glue
/// `e = (e_1 + ... + e_n)/2` and every other minimal vector as an index set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Index2Frame {
    pub n: usize,
    /// `e_1..e_n` after sign normalization, input-basis coordinates.
    pub basis: Vec<Vec<i64>>,
    /// Which witness vectors were negated to make `e` minimal.
    pub negated: Vec<bool>,
    /// `e` in input-basis coordinates.
    pub glue: Vec<i64>,
    /// False when no minimal vector lies outside `L0`, so `e` could not be
    /// normalized to a minimal vector.
    pub glue_minimal: bool,
    pub framed: Vec<FramedVector>,
}

impl Index2Frame {
    pub fn index_sets(&self) -> impl Iterator<Item = &IndexSet> {
        self.framed.iter().map(|f| &f.index_set)
    }

    /// `e - sum_{i in I} e_i` in input coordinates.
    pub fn reconstruct(&self, set: &IndexSet) -> Vec<i64> {
        let mut v = self.glue.clone();
        for i in set.members() {
            for (c, b) in v.iter_mut().zip(&self.basis[i]) {
                *c -= b;
            }
        }
        v
    }

    pub fn basis_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(&self.basis).expect("nonempty frame")
    }

    /// Gram matrix of `L0` in the basis `e_1..e_n`.
    pub fn sublattice_gram(&self, g: &GramMatrix) -> Result<GramMatrix, InvariantError> {
        Ok(g.transform(&self.basis_matrix())?)
    }
}

/// Builds the index-2 frame of a lattice of maximal index 2 and length `n`.
pub fn index2_frame(g: &GramMatrix) -> Result<Index2Frame, InvariantError> {
    let mv = minimal_vectors(g)?;
    let mi = maximal_index_of(g, &mv)?;
    let len = length_of(g, &mv, &mi)?;
    index2_frame_of(g, &mv, &mi, &len)
}

pub fn index2_frame_of(
    g: &GramMatrix,
    mv: &MinimalVectorSet,
    mi: &MaximalIndex,
    len: &Length,
) -> Result<Index2Frame, InvariantError> {
    let n = g.dim();
    if mi.index != 2 {
        return Err(InvariantError::WrongMaximalIndex { found: mi.index });
    }
    if len.length != n {
        return Err(InvariantError::WrongLength { found: len.length, dim: n });
    }
    if n > 64 {
        return Err(InvariantError::DimensionTooLarge(n));
    }
    let b = IntMatrix::from_rows(&mi.vectors)?;
    let bt = b.transpose();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let frame_coords = |x: &[i64]| -> Result<Vec<BigRational>, InvariantError> {
        let v: Vec<BigInt> = x.iter().map(|&c| BigInt::from(c)).collect();
        Ok(solve_rational(&bt, &v)?.0)
    };

    // glue class: some basis vector of L has half-integral frame coordinates
    let mut glue_class = None;
    for j in 0..n {
        let mut u = vec![0i64; n];
        u[j] = 1;
        let c = frame_coords(&u)?;
        if c.iter().any(|q| !q.is_integer()) {
            glue_class = Some(c);
            break;
        }
    }
    let glue_class = glue_class.ok_or_else(|| InvariantError::Frame("witness spans L".into()))?;
    if let Some(i) = glue_class.iter().position(|q| q.is_integer()) {
        return Err(InvariantError::Frame(format!(
            "glue class misses e_{} although the length equals the dimension",
            i + 1
        )));
    }

    // sort minimal vectors into ±e_i and half vectors (±e_1 ± ... ± e_n)/2
    let mut halves: Vec<(Vec<i64>, Vec<i8>)> = Vec::new();
    for x in &mv.vectors {
        let c = frame_coords(x)?;
        if c.iter().all(|q| q.is_integer()) {
            let nonzero: Vec<&BigRational> = c.iter().filter(|q| !q.is_zero()).collect();
            if nonzero.len() != 1 || !nonzero[0].abs().is_one() {
                return Err(InvariantError::Frame(format!("minimal vector {x:?} of L0 is not some ±e_i")));
            }
            continue;
        }
        let mut signs = Vec::with_capacity(n);
        for q in &c {
            if *q == half {
                signs.push(1i8);
            } else if *q == -&half {
                signs.push(-1i8);
            } else {
                return Err(InvariantError::Frame(format!("minimal vector {x:?} is not of the form (±e_1±...±e_n)/2")));
            }
        }
        halves.push((x.clone(), signs));
    }

    let glue_minimal = !halves.is_empty();
    let reference: Vec<i8> = halves.first().map_or(vec![1; n], |(_, s)| s.clone());
    let negated: Vec<bool> = reference.iter().map(|&s| s < 0).collect();
    let basis: Vec<Vec<i64>> = mi
        .vectors
        .iter()
        .zip(&negated)
        .map(|(v, &neg)| v.iter().map(|&c| if neg { -c } else { c }).collect())
        .collect();
    let mut glue = vec![0i64; n];
    for v in &basis {
        for (g, c) in glue.iter_mut().zip(v) {
            *g += c;
        }
    }
    if glue.iter().any(|c| c % 2 != 0) {
        return Err(InvariantError::Frame("(e_1+...+e_n)/2 is not a lattice vector".into()));
    }
    glue.iter_mut().for_each(|c| *c /= 2);

    let mut framed = Vec::with_capacity(halves.len());
    for (x, signs) in halves {
        let mut members: Vec<usize> =
            (0..n).filter(|&i| signs[i] * reference[i] < 0).collect();
        if 2 * members.len() > n || (2 * members.len() == n && members.first() != Some(&0)) {
            members = (0..n).filter(|i| !members.contains(i)).collect();
        }
        let index_set = IndexSet::new(n, &members).map_err(|e| InvariantError::Frame(e.to_string()))?;
        framed.push(FramedVector { vector: x, index_set });
    }
    Ok(Index2Frame { n, basis, negated, glue, glue_minimal, framed })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeProfile {
    /// `t[p]` = number of pairs of type `p`, `0 <= p <= n/2`
    pub t: Vec<usize>,
    /// The `n` pairs `±e_i`.
    pub basis_pairs: usize,
}

impl TypeProfile {
    pub fn total(&self) -> usize {
        self.basis_pairs + self.t.iter().sum::<usize>()
    }
}

pub fn type_profile(f: &Index2Frame) -> TypeProfile {
    let mut t = vec![0; f.n / 2 + 1];
    for set in f.index_sets() {
        t[set.len()] += 1;
    }
    TypeProfile { t, basis_pairs: f.n }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Perfection {
    pub rank: usize,
    /// `n(n+1)/2`
    pub full: usize,
}

impl Perfection {
    pub fn is_perfect(&self) -> bool {
        self.rank == self.full
    }
}

/// Rank of the projections `x x^t` over the minimal vectors.
pub fn perfection_rank(g: &GramMatrix) -> Result<Perfection, InvariantError> {
    let mv = minimal_vectors(g)?;
    Ok(perfection_rank_of(&mv, g.dim()))
}

pub fn perfection_rank_of(mv: &MinimalVectorSet, n: usize) -> Perfection {
    let full = n * (n + 1) / 2;
    let rows: Vec<Vec<i64>> = mv
        .vectors
        .iter()
        .map(|x| {
            let mut r = Vec::with_capacity(full);
            for i in 0..n {
                for j in i..n {
                    r.push(x[i] * x[j]);
                }
            }
            r
        })
        .collect();
    let rank = if rows.is_empty() { 0 } else { rank_exact(&IntMatrix::from_rows(&rows).expect("nonempty")) };
    Perfection { rank, full }
}

/// Elementary divisors of `L / M` for `M` spanned by `subset`.
pub fn quotient_structure(g: &GramMatrix, subset: &[Vec<i64>]) -> Result<Vec<BigInt>, InvariantError> {
    let n = g.dim();
    if subset.is_empty() {
        return Err(InvariantError::RankDeficient { rank: 0, dim: n });
    }
    let m = IntMatrix::from_rows(subset)?;
    let rank = rank_exact(&m);
    if subset.len() != n || rank < n {
        return Err(InvariantError::RankDeficient { rank, dim: n });
    }
    Ok(smith_invariants(&m)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram(rows: &[&[i64]]) -> GramMatrix {
        GramMatrix::from_rows(rows).unwrap()
    }

    fn identity(n: usize) -> GramMatrix {
        let rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
        GramMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn cubic_lattice_has_index_one() {
        let mi = maximal_index(&identity(4)).unwrap();
        assert_eq!(mi.index, 1);
        assert_eq!(mi.witness, vec![0, 1, 2, 3]);
    }

    #[test]
    fn not_well_rounded_is_rejected() {
        let g = gram(&[&[1, 0], &[0, 5]]);
        assert!(matches!(maximal_index(&g), Err(InvariantError::NotWellRounded { rank: 1, dim: 2 })));
    }

    #[test]
    fn length_requires_index_two() {
        assert!(matches!(length(&identity(3)), Err(InvariantError::WrongMaximalIndex { found: 1 })));
    }

    #[test]
    fn perfection_of_small_lattices() {
        let z2 = perfection_rank(&identity(2)).unwrap();
        assert_eq!((z2.rank, z2.is_perfect()), (2, false));
        let a2 = perfection_rank(&gram(&[&[2, 1], &[1, 2]])).unwrap();
        assert_eq!((a2.rank, a2.is_perfect()), (3, true));
    }

    #[test]
    fn quotient_of_index_four_sublattices() {
        let g = identity(2);
        let cyclic = quotient_structure(&g, &[vec![1, 0], vec![0, 4]]).unwrap();
        assert_eq!(cyclic, vec![BigInt::from(1), BigInt::from(4)]);
        let split = quotient_structure(&g, &[vec![2, 0], vec![0, 2]]).unwrap();
        assert_eq!(split, vec![BigInt::from(2), BigInt::from(2)]);
        assert!(matches!(
            quotient_structure(&g, &[vec![1, 1], vec![2, 2]]),
            Err(InvariantError::RankDeficient { rank: 1, dim: 2 })
        ));
    }

    #[test]
    fn scaled_half_cube_frame() {
        // L = <4 I_n, e = (e_1+...+e_n)/2>: only the e_i are minimal for n >= 5
        let n = 6;
        let mut rows = vec![vec![0i64; n]; n];
        for i in 0..n - 1 {
            rows[i][i] = 4;
            rows[i][n - 1] = 2;
            rows[n - 1][i] = 2;
        }
        rows[n - 1][n - 1] = n as i64;
        let g = GramMatrix::from_rows(&rows).unwrap();
        let mv = minimal_vectors(&g).unwrap();
        assert_eq!(mv.s(), n);
        let f = index2_frame(&g).unwrap();
        assert!(!f.glue_minimal);
        let tp = type_profile(&f);
        assert_eq!(tp.t, vec![0; n / 2 + 1]);
        assert_eq!(tp.total(), n);
    }
}
