//! Brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use std::path::PathBuf;

use maxindex::catalog::{load_catalog, CatalogEntry};
use maxindex::exactmath::{det_exact, IntMatrix};
use maxindex::lattice::{canonical_sign, GramMatrix};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Determinant by cofactor expansion along the first row.
pub fn laplace_det(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        if m[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
        let term = BigInt::from(m[0][j]) * laplace_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn cofactor_diag(g: &GramMatrix, i: usize) -> BigInt {
    let n = g.dim();
    let rows: Vec<Vec<BigInt>> = (0..n)
        .filter(|&a| a != i)
        .map(|a| (0..n).filter(|&b| b != i).map(|b| g.entry(a, b).clone()).collect())
        .collect();
    if rows.is_empty() {
        return BigInt::from(1);
    }
    det_exact(&IntMatrix::from_rows(&rows).unwrap()).unwrap()
}

/// Box half-widths `|x_i| <= sqrt(bound * (G^-1)_ii)`, which contain every
/// vector of norm at most `bound`.
pub fn box_widths(g: &GramMatrix, bound: &BigInt) -> Vec<i64> {
    let det = g.det();
    (0..g.dim())
        .map(|i| {
            let num = bound * cofactor_diag(g, i);
            let mut w = 0i64;
            while BigInt::from((w + 1) * (w + 1)) * &det <= num {
                w += 1;
            }
            w
        })
        .collect()
}

/// Number of points in the box, saturating.
pub fn box_size(widths: &[i64]) -> u64 {
    widths.iter().fold(1u64, |a, &w| a.saturating_mul(2 * w as u64 + 1))
}

/// Minimum and minimal vectors (canonical sign, sorted) by scanning the box.
pub fn box_minimal_vectors(g: &GramMatrix) -> (BigInt, Vec<Vec<i64>>) {
    let n = g.dim();
    let bound = (0..n).map(|i| g.entry(i, i).clone()).min().unwrap();
    let widths = box_widths(g, &bound);
    let mut x: Vec<i64> = widths.iter().map(|w| -w).collect();
    let mut best = bound.clone();
    let mut found: Vec<Vec<i64>> = Vec::new();
    loop {
        if x.iter().any(|&c| c != 0) {
            let v = g.norm(&x);
            if v < best {
                best = v.clone();
                found.clear();
            }
            if v == best {
                let mut y = x.clone();
                canonical_sign(&mut y);
                found.push(y);
            }
        }
        let mut i = 0;
        while i < n && x[i] == widths[i] {
            x[i] = -widths[i];
            i += 1;
        }
        if i == n {
            break;
        }
        x[i] += 1;
    }
    found.sort();
    found.dedup();
    (best, found)
}

pub fn is_positive_definite(rows: &[Vec<i64>]) -> bool {
    (1..=rows.len()).all(|k| {
        let lead: Vec<Vec<i64>> = rows[..k].iter().map(|r| r[..k].to_vec()).collect();
        laplace_det(&lead).is_positive()
    })
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/catalog")
}

pub fn shipped_catalog() -> Vec<CatalogEntry> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(data_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files.iter().flat_map(|f| load_catalog(f, true).unwrap()).collect()
}

pub fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().unwrap()
}
