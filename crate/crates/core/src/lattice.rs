//! Gram matrices and exact shortest-vector enumeration.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactmath::{det_exact, rank_exact, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("Gram matrix must have dimension at least 1")]
    Empty,
    #[error("Gram matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("Gram matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("Gram matrix is not positive definite (leading minor {order} is {minor})")]
    NotPositiveDefinite { order: usize, minor: BigInt },
    #[error("coordinate of a short vector does not fit in 64 bits")]
    CoordinateOverflow,
}

/// Symmetric positive-definite integer Gram matrix. Construction certifies
/// symmetry and positivity of every leading principal minor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix {
    m: IntMatrix,
}

impl GramMatrix {
    /// Validates `m` (see [`validate_gram`]).
    pub fn new(m: IntMatrix) -> Result<Self, LatticeError> {
        validate_gram(&m)?;
        Ok(GramMatrix { m })
    }

    pub fn from_rows<T, R>(rows: &[R]) -> Result<Self, LatticeError>
    where
        T: Clone + Into<BigInt>,
        R: AsRef<[T]>,
    {
        if rows.is_empty() {
            return Err(LatticeError::Empty);
        }
        let m = IntMatrix::from_rows(rows).map_err(|_| LatticeError::NotSquare {
            rows: rows.len(),
            cols: rows.iter().map(|r| r.as_ref().len()).max().unwrap_or(0),
        })?;
        GramMatrix::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        self.m.get(i, j)
    }

    pub fn det(&self) -> BigInt {
        det_exact(&self.m).expect("square")
    }

    /// `x^t G y`
    pub fn inner(&self, x: &[i64], y: &[i64]) -> BigInt {
        let n = self.dim();
        let mut acc = BigInt::zero();
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            let mut row = BigInt::zero();
            for j in 0..n {
                if y[j] != 0 {
                    row += self.m.get(i, j) * y[j];
                }
            }
            acc += row * x[i];
        }
        acc
    }

    pub fn norm(&self, x: &[i64]) -> BigInt {
        self.inner(x, x)
    }

    /// Gram matrix of the basis `u^t e` for an integer change of basis `u`
    /// (rows of `u` are the new basis vectors in old coordinates).
    pub fn transform(&self, u: &IntMatrix) -> Result<GramMatrix, LatticeError> {
        let g = u
            .mul(&self.m)
            .and_then(|x| x.mul(&u.transpose()))
            .map_err(|_| LatticeError::NotSquare { rows: u.rows(), cols: u.cols() })?;
        GramMatrix::new(g)
    }

    pub fn to_rows_i64(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.dim())
            .map(|i| self.m.row(i).iter().map(|x| x.to_i64()).collect())
            .collect()
    }
}

/// Exact symmetry and positive-definiteness test (all leading principal
/// minors positive).
pub fn validate_gram(m: &IntMatrix) -> Result<(), LatticeError> {
    if !m.is_square() {
        return Err(LatticeError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    for i in 0..n {
        for j in i + 1..n {
            if m.get(i, j) != m.get(j, i) {
                return Err(LatticeError::NotSymmetric { row: i, col: j });
            }
        }
    }
    for k in 1..=n {
        let minor = leading_minor(m, k);
        if !minor.is_positive() {
            return Err(LatticeError::NotPositiveDefinite { order: k, minor });
        }
    }
    Ok(())
}

fn leading_minor(m: &IntMatrix, k: usize) -> BigInt {
    let rows: Vec<Vec<BigInt>> = (0..k).map(|i| m.row(i)[..k].to_vec()).collect();
    det_exact(&IntMatrix::from_rows(&rows).expect("k >= 1")).expect("square")
}

/// Pairs of minimal vectors. One representative per pair, with its first
/// nonzero coordinate positive, sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalVectorSet {
    pub min_norm: BigInt,
    pub vectors: Vec<Vec<i64>>,
}

impl MinimalVectorSet {
    /// Number of pairs `±x`.
    pub fn s(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    /// Rows are the vectors' coordinates.
    pub fn coordinate_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(&self.vectors).expect("nonempty")
    }
}

/// Flips `x` so its first nonzero coordinate is positive.
pub fn canonical_sign(x: &mut [i64]) {
    if let Some(&first) = x.iter().find(|&&c| c != 0) {
        if first < 0 {
            x.iter_mut().for_each(|c| *c = -*c);
        }
    }
}

/// Exact Cholesky-type decomposition `Q[x] = sum_i q_i (x_i + sum_{j>i} mu_ij x_j)^2`.
struct QuadraticDecomposition {
    q: Vec<BigRational>,
    mu: Vec<Vec<BigRational>>,
}

impl QuadraticDecomposition {
    fn new(g: &GramMatrix) -> Self {
        let n = g.dim();
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..n).map(|j| BigRational::from_integer(g.entry(i, j).clone())).collect())
            .collect();
        let mut q = vec![BigRational::zero(); n];
        let mut mu = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            q[i] = a[i][i].clone();
            for j in i + 1..n {
                mu[i][j] = &a[i][j] / &q[i];
            }
            for k in i + 1..n {
                for l in k..n {
                    let t = &mu[i][k] * &a[i][l];
                    a[k][l] -= t;
                    a[l][k] = a[k][l].clone();
                }
            }
        }
        QuadraticDecomposition { q, mu }
    }
}

/// Enumerates every nonzero `x` with `x^t G x <= bound`, calling `visit` with
/// the vector and its exact norm. `visit` may return a new (smaller) bound,
/// which then prunes the rest of the search.
fn enumerate_short<F>(g: &GramMatrix, bound: &BigInt, mut visit: F) -> Result<(), LatticeError>
where
    F: FnMut(&[i64], &BigInt) -> Option<BigInt>,
{
    let n = g.dim();
    let mut search = ShortSearch {
        g,
        dec: QuadraticDecomposition::new(g),
        bound: BigRational::from_integer(bound.clone()),
        x: vec![0; n],
    };
    search.level(n - 1, &BigRational::zero(), &mut visit)
}

struct ShortSearch<'a> {
    g: &'a GramMatrix,
    dec: QuadraticDecomposition,
    bound: BigRational,
    x: Vec<i64>,
}

impl ShortSearch<'_> {
    fn level<F>(&mut self, i: usize, used: &BigRational, visit: &mut F) -> Result<(), LatticeError>
    where
        F: FnMut(&[i64], &BigInt) -> Option<BigInt>,
    {
        let mut c = BigRational::zero();
        for j in i + 1..self.x.len() {
            if self.x[j] != 0 {
                c -= &self.dec.mu[i][j] * BigRational::from_integer(self.x[j].into());
            }
        }
        let start = c.round().to_integer().to_i64().ok_or(LatticeError::CoordinateOverflow)?;
        // admissible values form an interval around c; walk outward from round(c)
        // and stop at the first value that no longer fits the (possibly shrunk) bound
        for upward in [true, false] {
            let mut v = if upward { start } else { start - 1 };
            loop {
                let d = BigRational::from_integer(v.into()) - &c;
                let total = used + &self.dec.q[i] * &d * &d;
                if total > self.bound {
                    break;
                }
                self.x[i] = v;
                if i == 0 {
                    if self.x.iter().any(|&c| c != 0) {
                        let norm = self.g.norm(&self.x);
                        if let Some(nb) = visit(&self.x, &norm) {
                            self.bound = BigRational::from_integer(nb);
                        }
                    }
                } else {
                    self.level(i - 1, &total, visit)?;
                }
                v = if upward { v.checked_add(1) } else { v.checked_sub(1) }
                    .ok_or(LatticeError::CoordinateOverflow)?;
            }
        }
        self.x[i] = 0;
        Ok(())
    }
}

/// All pairs of minimal vectors, with the minimum found by staged search
/// starting from the smallest diagonal entry.
pub fn minimal_vectors(g: &GramMatrix) -> Result<MinimalVectorSet, LatticeError> {
    let n = g.dim();
    let start = (0..n).map(|i| g.entry(i, i).clone()).min().expect("n >= 1");
    let mut best = start.clone();
    let mut found: Vec<Vec<i64>> = Vec::new();
    enumerate_short(g, &start, |x, norm| match norm.cmp(&best) {
        Ordering::Greater => None,
        Ordering::Equal => {
            found.push(x.to_vec());
            None
        }
        Ordering::Less => {
            best = norm.clone();
            found.clear();
            found.push(x.to_vec());
            Some(best.clone())
        }
    })?;
    let mut vectors: Vec<Vec<i64>> = found
        .into_iter()
        .map(|mut x| {
            canonical_sign(&mut x);
            x
        })
        .collect();
    vectors.sort();
    vectors.dedup();
    Ok(MinimalVectorSet { min_norm: best, vectors })
}

/// Every nonzero vector of norm at most `bound`, one per `±` pair, canonical
/// sign, sorted. Used by oracles and by frame checks.
pub fn short_vectors(g: &GramMatrix, bound: &BigInt) -> Result<Vec<(BigInt, Vec<i64>)>, LatticeError> {
    let mut out = Vec::new();
    enumerate_short(g, bound, |x, norm| {
        let mut x = x.to_vec();
        canonical_sign(&mut x);
        out.push((norm.clone(), x));
        None
    })?;
    out.sort();
    out.dedup();
    Ok(out)
}

pub fn is_well_rounded(g: &GramMatrix) -> Result<bool, LatticeError> {
    let mv = minimal_vectors(g)?;
    Ok(rank_exact(&mv.coordinate_matrix()) == g.dim())
}

impl PartialOrd for MinimalVectorSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MinimalVectorSet {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.min_norm, &self.vectors).cmp(&(&other.min_norm, &other.vectors))
    }
}
