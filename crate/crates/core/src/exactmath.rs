//! Exact integer and rational linear algebra.
//!
//! Everything here works on arbitrary-precision integers; nothing in this
//! module rounds.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MathError {
    #[error("matrix must have positive dimensions, got {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },
    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {got}")]
    BadShape { rows: usize, cols: usize, expected: usize, got: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: matrix has {rows} rows, vector has {len} entries")]
    DimensionMismatch { rows: usize, len: usize },
}

/// Dense row-major matrix of big integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self, MathError> {
        if rows == 0 || cols == 0 {
            return Err(MathError::EmptyMatrix { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(MathError::BadShape { rows, cols, expected: rows * cols, got: data.len() });
        }
        Ok(IntMatrix { rows, cols, data })
    }

    /// Builds a matrix from nested rows of anything convertible to `BigInt`.
    pub fn from_rows<T, R>(rows: &[R]) -> Result<Self, MathError>
    where
        T: Clone + Into<BigInt>,
        R: AsRef<[T]>,
    {
        let nrows = rows.len();
        let ncols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != ncols {
                return Err(MathError::BadShape {
                    rows: nrows,
                    cols: ncols,
                    expected: nrows * ncols,
                    got: data.len() + r.len(),
                });
            }
            data.extend(r.iter().cloned().map(Into::into));
        }
        IntMatrix::new(nrows, ncols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, MathError> {
        if self.cols != other.rows {
            return Err(MathError::DimensionMismatch { rows: other.rows, len: self.cols });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows().iter().map(|r| {
            r.iter().map(|x| x.to_string()).collect::<Vec<_>>()
        })).finish()
    }
}

/// Vector of rationals, always kept in lowest terms with positive denominators
/// (`BigRational` normalizes on construction and after every operation).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatVector(pub Vec<BigRational>);

impl RatVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.0
    }

    /// The coordinates as integers, if they all are.
    pub fn as_integers(&self) -> Option<Vec<BigInt>> {
        self.0.iter().map(|q| q.is_integer().then(|| q.to_integer())).collect()
    }
}

/// Determinant by Bareiss fraction-free elimination.
pub fn det_exact(m: &IntMatrix) -> Result<BigInt, MathError> {
    if !m.is_square() {
        return Err(MathError::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        if a.get(k, k).is_zero() {
            match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                Some(i) => {
                    a.swap_rows(k, i);
                    sign = !sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        let pivot = a.get(k, k).clone();
        for i in k + 1..n {
            let aik = a.get(i, k).clone();
            for j in k + 1..n {
                let v = (&pivot * a.get(i, j) - &aik * a.get(k, j)) / &prev;
                a.set(i, j, v);
            }
            a.set(i, k, BigInt::zero());
        }
        prev = pivot;
    }
    let d = a.get(n - 1, n - 1).clone();
    Ok(if sign { -d } else { d })
}

/// Rank over the rationals.
pub fn rank_exact(m: &IntMatrix) -> usize {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        a.swap_rows(rank, p);
        let pivot = a.get(rank, c).clone();
        for i in rank + 1..rows {
            let aic = a.get(i, c).clone();
            for j in c + 1..cols {
                let v = (&pivot * a.get(i, j) - &aic * a.get(rank, j)) / &prev;
                a.set(i, j, v);
            }
            a.set(i, c, BigInt::zero());
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// Elementary divisors `d1 | d2 | ... | dn` of a nonsingular square matrix.
pub fn smith_invariants(m: &IntMatrix) -> Result<Vec<BigInt>, MathError> {
    if !m.is_square() {
        return Err(MathError::NotSquare { rows: m.rows, cols: m.cols });
    }
    if det_exact(m)?.is_zero() {
        return Err(MathError::Singular);
    }
    let n = m.rows;
    let mut a = m.clone();
    for t in 0..n {
        loop {
            // smallest nonzero entry of the trailing block goes to (t, t)
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    let v = a.get(i, j);
                    if v.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| v.abs() < a.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let (bi, bj) = best.expect("nonsingular trailing block");
            a.swap_rows(t, bi);
            a.swap_cols(t, bj);
            let pivot = a.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..n {
                let q = a.get(i, t).div_floor(&pivot);
                if !q.is_zero() {
                    for j in t..n {
                        let v = a.get(i, j) - &q * a.get(t, j);
                        a.set(i, j, v);
                    }
                }
                if !a.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = a.get(t, j).div_floor(&pivot);
                if !q.is_zero() {
                    for i in t..n {
                        let v = a.get(i, j) - &q * a.get(i, t);
                        a.set(i, j, v);
                    }
                }
                if !a.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the rest of the block
            let bad = (t + 1..n)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !a.get(i, j).is_multiple_of(&pivot));
            match bad {
                Some((i, _)) => {
                    for j in t..n {
                        let v = a.get(t, j) + a.get(i, j);
                        a.set(t, j, v);
                    }
                }
                None => break,
            }
        }
    }
    Ok((0..n).map(|i| a.get(i, i).abs()).collect())
}

/// Solves `basis * x = v` exactly over the rationals.
pub fn solve_rational(basis: &IntMatrix, v: &[BigInt]) -> Result<RatVector, MathError> {
    if !basis.is_square() {
        return Err(MathError::NotSquare { rows: basis.rows, cols: basis.cols });
    }
    let n = basis.rows;
    if v.len() != n {
        return Err(MathError::DimensionMismatch { rows: n, len: v.len() });
    }
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut r: Vec<BigRational> =
                basis.row(i).iter().map(|x| BigRational::from_integer(x.clone())).collect();
            r.push(BigRational::from_integer(v[i].clone()));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero()).ok_or(MathError::Singular)?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for j in c..=n {
            a[c][j] = &a[c][j] * &inv;
        }
        for i in 0..n {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in c..=n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    Ok(RatVector(a.into_iter().map(|mut r| r.pop().unwrap()).collect()))
}

/// Incremental integral Gram–Schmidt on vectors given through their pairwise
/// inner products.
///
/// `push` appends a vector and returns the new leading Gram minor `d_k`; a zero
/// minor means the vector is dependent on the ones already present, and the
/// vector is then not kept. All quantities stay integral (the exact divisions
/// of the integral LLL formulation).
#[derive(Clone, Debug, Default)]
pub struct GramSchmidt {
    /// `d[0] = 1`, `d[k]` = Gram determinant of the first `k` vectors
    d: Vec<BigInt>,
    /// `lambda[k][j]` for `j < k`
    lambda: Vec<Vec<BigInt>>,
}

impl GramSchmidt {
    pub fn new() -> Self {
        GramSchmidt { d: vec![BigInt::one()], lambda: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    /// Gram determinant of the vectors pushed so far.
    pub fn gram_det(&self) -> &BigInt {
        self.d.last().unwrap()
    }

    /// `inner(j)` must return the inner product of the new vector with the
    /// j-th vector already present; `norm` is the new vector's own norm.
    pub fn push<F>(&mut self, norm: &BigInt, inner: F) -> BigInt
    where
        F: Fn(usize) -> BigInt,
    {
        let k = self.lambda.len();
        let mut row: Vec<BigInt> = Vec::with_capacity(k);
        for j in 0..k {
            let mut u = inner(j);
            for i in 0..j {
                u = (&self.d[i + 1] * &u - &self.lambda[j][i] * &row[i]) / &self.d[i];
            }
            row.push(u);
        }
        let mut u = norm.clone();
        for (i, l) in row.iter().enumerate() {
            u = (&self.d[i + 1] * &u - l * l) / &self.d[i];
        }
        if !u.is_zero() {
            self.d.push(u.clone());
            self.lambda.push(row);
        }
        u
    }

    pub fn pop(&mut self) {
        if self.lambda.pop().is_some() {
            self.d.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn det_small_cases() {
        assert_eq!(det_exact(&IntMatrix::identity(3)).unwrap(), BigInt::from(1));
        assert_eq!(det_exact(&m(&[&[2, 1], &[1, 2]])).unwrap(), BigInt::from(3));
        assert_eq!(det_exact(&m(&[&[0, 1], &[1, 0]])).unwrap(), BigInt::from(-1));
        assert_eq!(det_exact(&m(&[&[1, 2], &[2, 4]])).unwrap(), BigInt::zero());
        assert!(matches!(det_exact(&m(&[&[1, 2, 3]])), Err(MathError::NotSquare { .. })));
    }

    #[test]
    fn empty_matrix_rejected() {
        assert!(matches!(IntMatrix::new(0, 2, vec![]), Err(MathError::EmptyMatrix { .. })));
    }

    #[test]
    fn rank_cases() {
        assert_eq!(rank_exact(&IntMatrix::zeros(3, 4)), 0);
        assert_eq!(rank_exact(&IntMatrix::identity(5)), 5);
        assert_eq!(rank_exact(&m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]])), 2);
        // A2 minimal vectors (1,0), (0,1), (1,-1): rows (x1^2, 2 x1 x2, x2^2)
        assert_eq!(rank_exact(&m(&[&[1, 0, 0], &[0, 0, 1], &[1, -2, 1]])), 3);
    }

    #[test]
    fn smith_cases() {
        assert_eq!(smith_invariants(&IntMatrix::identity(4)).unwrap(), big(&[1, 1, 1, 1]));
        assert_eq!(smith_invariants(&m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 2]])).unwrap(), big(&[1, 1, 2]));
        assert_eq!(smith_invariants(&m(&[&[2, 0], &[0, 2]])).unwrap(), big(&[2, 2]));
        assert_eq!(smith_invariants(&m(&[&[2, 0], &[0, 3]])).unwrap(), big(&[1, 6]));
        assert_eq!(smith_invariants(&m(&[&[4, 0], &[0, 1]])).unwrap(), big(&[1, 4]));
        assert_eq!(smith_invariants(&m(&[&[1, 1], &[1, -1]])).unwrap(), big(&[1, 2]));
        assert_eq!(smith_invariants(&m(&[&[1, 2], &[2, 4]])), Err(MathError::Singular));
    }

    #[test]
    fn solve_cases() {
        let x = solve_rational(&IntMatrix::identity(3), &big(&[4, -1, 7])).unwrap();
        assert_eq!(x.as_integers().unwrap(), big(&[4, -1, 7]));
        let x = solve_rational(&m(&[&[2, 0], &[0, 2]]), &big(&[1, 1])).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(x.0, vec![half.clone(), half]);
        assert_eq!(x.as_integers(), None);
        assert_eq!(solve_rational(&m(&[&[1, 2], &[2, 4]]), &big(&[1, 1])), Err(MathError::Singular));
    }

    #[test]
    fn gram_schmidt_tracks_minors() {
        // A2 basis: norms 2, inner product 1 -> minors 2, 3
        let mut gs = GramSchmidt::new();
        assert_eq!(gs.push(&BigInt::from(2), |_| unreachable!()), BigInt::from(2));
        assert_eq!(gs.push(&BigInt::from(2), |_| BigInt::from(1)), BigInt::from(3));
        // the sum vector is dependent
        assert_eq!(gs.push(&BigInt::from(6), |_| BigInt::from(3)), BigInt::zero());
        assert_eq!(gs.len(), 2);
        gs.pop();
        assert_eq!(gs.gram_det(), &BigInt::from(2));
    }
}
