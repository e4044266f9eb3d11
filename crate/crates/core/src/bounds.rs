//! Closed-form kissing-number bounds for lattices of maximal index 2 and
//! length `n`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::bound_tp;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("n = {n} is below the supported range (n >= {min})")]
    OutOfRange { n: usize, min: usize },
    #[error("{what} is not divisible by {by} at n = {n}")]
    NotIntegral { what: &'static str, by: i64, n: usize },
}

fn require(n: usize, min: usize) -> Result<(), BoundsError> {
    if n < min {
        Err(BoundsError::OutOfRange { n, min })
    } else {
        Ok(())
    }
}

fn exact_div(num: i64, by: i64, what: &'static str, n: usize) -> Result<i64, BoundsError> {
    if num % by != 0 {
        return Err(BoundsError::NotIntegral { what, by, n });
    }
    Ok(num / by)
}

/// Closed form `(n^2 + 24n - 161)/8` (odd `n`) or `(n^2 + 26n - 168)/8` (even `n`).
pub fn sigma1(n: usize) -> Result<i64, BoundsError> {
    require(n, 11)?;
    let m = n as i64;
    let num = if n % 2 == 1 { m * m + 24 * m - 161 } else { m * m + 26 * m - 168 };
    exact_div(num, 8, "sigma1 numerator", n)
}

/// `8 + sum_{p=4}^{n/2} (p + 6) - eps`, `eps = 1` for odd `n` and `5` for even `n`.
pub fn sigma1_sum(n: usize) -> Result<i64, BoundsError> {
    require(n, 11)?;
    let eps = if n % 2 == 1 { 1 } else { 5 };
    Ok(8 + (4..=n as i64 / 2).map(|p| p + 6).sum::<i64>() - eps)
}

/// The integer interval `[ceil((n+3)/3), floor((n-1)/2)]`, possibly empty.
pub fn pset(n: usize) -> Vec<usize> {
    let lo = (n + 3).div_ceil(3);
    let hi = n.saturating_sub(1) / 2;
    (lo..=hi).collect()
}

/// `sum_{p in P} (n - 6 - p) + [n odd]`.
pub fn sigma2_sum(n: usize) -> Result<i64, BoundsError> {
    require(n, 11)?;
    let m = n as i64;
    let body: i64 = pset(n).iter().map(|&p| m - 6 - p as i64).sum();
    Ok(body + (m % 2))
}

/// Coefficients `(a, b, c)` of `72 Sigma_2 = a n^2 + b n + c`, indexed by `n mod 6`.
/// The constant for `n = 4 mod 6` is 760; a printed value of 76 does not give
/// integers (see [`SIGMA2_POLY_PRINTED_ROW4`]).
pub const SIGMA2_POLY: [(i64, i64, i64); 6] = [
    (7, -114, 432),
    (7, -128, 625),
    (7, -130, 592),
    (7, -96, 297),
    (7, -146, 760),
    (7, -112, 457),
];

/// The `n = 4 mod 6` row with constant 76, kept for the discrepancy check.
pub const SIGMA2_POLY_PRINTED_ROW4: (i64, i64, i64) = (7, -146, 76);

pub fn eval_poly((a, b, c): (i64, i64, i64), n: usize) -> i64 {
    let m = n as i64;
    a * m * m + b * m + c
}

/// `Sigma_2` from the polynomial table, divided by 72 exactly.
pub fn sigma2_poly(n: usize) -> Result<i64, BoundsError> {
    require(n, 11)?;
    exact_div(eval_poly(SIGMA2_POLY[n % 6], n), 72, "72*sigma2 polynomial", n)
}

/// Numerators `(a, b, c)` of `(a n^2 + b n + c)/9` for `n >= 11`, by `n mod 6`.
pub const TABLE_FORMULA: [(i64, i64, i64); 6] = [
    (2, 24, -45),
    (2, 20, -13),
    (2, 22, -25),
    (2, 24, -54),
    (2, 20, -4),
    (2, 22, -34),
];

/// Tabulated values for `6 <= n <= 10`.
pub const TABLE_SMALL: [(usize, i64); 5] = [(6, 19), (7, 24), (8, 32), (9, 37), (10, 44)];

/// The published upper bound for `s`.
pub fn bound_table(n: usize) -> Result<i64, BoundsError> {
    require(n, 6)?;
    if let Some(&(_, v)) = TABLE_SMALL.iter().find(|&&(m, _)| m == n) {
        return Ok(v);
    }
    exact_div(eval_poly(TABLE_FORMULA[n % 6], n), 9, "table formula", n)
}

/// `n` basis pairs, one type-0 pair, at most nine of types 1 and 2, and
/// `bound_tp(p, n)` of each type `p >= 3`; for `n = 6` the types 1 and 2
/// together with type 3 contribute one less.
pub fn bound_recomputed(n: usize) -> Result<i64, BoundsError> {
    require(n, 6)?;
    let per_type: i64 = (3..=n / 2).map(|p| bound_tp(p, n).expect("3 <= p <= n/2") as i64).sum();
    let refinement = if n == 6 { 1 } else { 0 };
    Ok(n as i64 + 1 + 9 + per_type - refinement)
}

/// `n(n+1)/2 - bound_recomputed(n)`.
pub fn perfection_gap(n: usize) -> Result<i64, BoundsError> {
    Ok(perfection_threshold(n) - bound_recomputed(n)?)
}

pub fn perfection_threshold(n: usize) -> i64 {
    (n * (n + 1) / 2) as i64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    /// `(p, bound_tp(p, n))` for `3 <= p <= n/2`.
    pub per_type: Vec<(usize, usize)>,
    pub sigma1: Option<i64>,
    pub sigma2_sum: Option<i64>,
    pub sigma2_poly: Option<i64>,
    pub bound_table: i64,
    pub bound_recomputed: i64,
    pub perfection_threshold: i64,
    pub gap: i64,
    pub discrepancy_flag: bool,
}

pub fn kissing_bound(n: usize) -> Result<BoundReport, BoundsError> {
    require(n, 6)?;
    let per_type = (3..=n / 2).map(|p| (p, bound_tp(p, n).expect("3 <= p <= n/2"))).collect();
    let large = n >= 11;
    let bound_table = bound_table(n)?;
    let bound_recomputed = bound_recomputed(n)?;
    Ok(BoundReport {
        n,
        per_type,
        sigma1: if large { Some(sigma1(n)?) } else { None },
        sigma2_sum: if large { Some(sigma2_sum(n)?) } else { None },
        sigma2_poly: if large { Some(sigma2_poly(n)?) } else { None },
        bound_table,
        bound_recomputed,
        perfection_threshold: perfection_threshold(n),
        gap: perfection_threshold(n) - bound_recomputed,
        discrepancy_flag: bound_table != bound_recomputed,
    })
}
