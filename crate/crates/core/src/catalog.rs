//! Root-lattice generators and the JSON Gram-matrix catalog format.
//!
//! A catalog file holds one entry or an array of entries:
//!
//! ```json
//! {"name": "A2", "dim": 2, "gram": [[2, 1], [1, 2]],
//!  "expected": {"s": 3, "min": 2, "maximal_index": 1, "perfect": true}}
//! ```
//!
//! Gram entries are JSON integers, or decimal strings for values beyond 64 bits.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::invariants::{length_of, maximal_index_of, perfection_rank_of, InvariantError};
use crate::lattice::{minimal_vectors, GramMatrix, LatticeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("no root lattice {family}{n}")]
    InvalidFamily { family: RootFamily, n: usize },
    #[error("unknown root family {0:?}")]
    UnknownFamily(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("entry {entry}: {message}")]
    Invalid { entry: String, message: String },
    #[error("entry {entry}: {invariant} expected {expected}, computed {computed}")]
    ValidationFailure { entry: String, invariant: &'static str, expected: String, computed: String },
    #[error("entry {entry}: {source}")]
    Invariant { entry: String, source: InvariantError },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootFamily {
    A,
    D,
    E,
}

impl fmt::Display for RootFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            RootFamily::A => "A",
            RootFamily::D => "D",
            RootFamily::E => "E",
        };
        f.write_str(c)
    }
}

impl FromStr for RootFamily {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(RootFamily::A),
            "D" | "d" => Ok(RootFamily::D),
            "E" | "e" => Ok(RootFamily::E),
            _ => Err(CatalogError::UnknownFamily(s.to_string())),
        }
    }
}

/// Gram matrix of the root lattice on its simple roots: 2 on the diagonal and
/// 1 for each edge of the Dynkin diagram (a tree, so the signs of the edges
/// are immaterial up to isometry).
pub fn gen_root(family: RootFamily, n: usize) -> Result<GramMatrix, CatalogError> {
    let invalid = || CatalogError::InvalidFamily { family, n };
    let mut edges: Vec<(usize, usize)> = Vec::new();
    match family {
        RootFamily::A if n >= 1 => edges.extend((1..n).map(|i| (i - 1, i))),
        RootFamily::D if n >= 3 => {
            edges.extend((1..n - 1).map(|i| (i - 1, i)));
            edges.push((n - 3, n - 1));
        }
        RootFamily::E if (6..=8).contains(&n) => {
            edges.extend((1..n - 1).map(|i| (i - 1, i)));
            edges.push((2, n - 1));
        }
        _ => return Err(invalid()),
    }
    let mut rows = vec![vec![0i64; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (i, j) in edges {
        rows[i][j] = 1;
        rows[j][i] = 1;
    }
    GramMatrix::from_rows(&rows).map_err(|_| invalid())
}

/// Claimed invariants, checked in strict mode.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maximal_index: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perfect: Option<bool>,
}

impl Expected {
    pub fn is_empty(&self) -> bool {
        *self == Expected::default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    pub dim: usize,
    pub gram: GramMatrix,
    pub expected: Option<Expected>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    name: String,
    dim: usize,
    gram: Vec<Vec<Value>>,
    #[serde(default)]
    expected: Option<Expected>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawFile {
    Many(Vec<RawEntry>),
    One(RawEntry),
}

fn parse_integer(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(x) => x.as_i64().map(BigInt::from).or_else(|| x.as_u64().map(BigInt::from)),
        Value::String(s) => BigInt::from_str(s.trim()).ok(),
        _ => None,
    }
}

impl CatalogEntry {
    fn from_raw(raw: RawEntry) -> Result<Self, CatalogError> {
        let invalid = |message: String| CatalogError::Invalid { entry: raw.name.clone(), message };
        if raw.dim == 0 {
            return Err(invalid("dim must be positive".into()));
        }
        if raw.gram.len() != raw.dim || raw.gram.iter().any(|r| r.len() != raw.dim) {
            return Err(invalid(format!("gram is not {0}x{0}", raw.dim)));
        }
        let mut rows = Vec::with_capacity(raw.dim);
        for (i, r) in raw.gram.iter().enumerate() {
            let mut row = Vec::with_capacity(raw.dim);
            for (j, v) in r.iter().enumerate() {
                row.push(parse_integer(v).ok_or_else(|| invalid(format!("gram[{i}][{j}] = {v} is not an integer")))?);
            }
            rows.push(row);
        }
        let gram = GramMatrix::from_rows(&rows).map_err(|e: LatticeError| invalid(e.to_string()))?;
        Ok(CatalogEntry { name: raw.name, dim: raw.dim, gram, expected: raw.expected })
    }

    pub fn new(name: impl Into<String>, gram: GramMatrix, expected: Option<Expected>) -> Self {
        CatalogEntry { name: name.into(), dim: gram.dim(), gram, expected }
    }

    /// The entry in the catalog file format.
    pub fn to_json(&self) -> Value {
        let gram: Vec<Vec<Value>> = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        let x = self.gram.entry(i, j);
                        x.to_i64().map_or_else(|| Value::String(x.to_string()), Value::from)
                    })
                    .collect()
            })
            .collect();
        let mut obj = serde_json::json!({ "name": self.name, "dim": self.dim, "gram": gram });
        if let Some(e) = self.expected.as_ref().filter(|e| !e.is_empty()) {
            obj["expected"] = serde_json::to_value(e).expect("plain struct");
        }
        obj
    }

    /// Recomputes every claimed invariant.
    pub fn verify(&self) -> Result<(), CatalogError> {
        let Some(exp) = &self.expected else { return Ok(()) };
        let wrap = |source: InvariantError| CatalogError::Invariant { entry: self.name.clone(), source };
        let mismatch = |invariant: &'static str, expected: String, computed: String| CatalogError::ValidationFailure {
            entry: self.name.clone(),
            invariant,
            expected,
            computed,
        };
        let mv = minimal_vectors(&self.gram).map_err(|e| wrap(e.into()))?;
        if let Some(s) = exp.s {
            if s != mv.s() as u64 {
                return Err(mismatch("s", s.to_string(), mv.s().to_string()));
            }
        }
        if let Some(min) = exp.min {
            if BigInt::from(min) != mv.min_norm {
                return Err(mismatch("min", min.to_string(), mv.min_norm.to_string()));
            }
        }
        if let Some(perfect) = exp.perfect {
            let got = perfection_rank_of(&mv, self.dim).is_perfect();
            if got != perfect {
                return Err(mismatch("perfect", perfect.to_string(), got.to_string()));
            }
        }
        if exp.maximal_index.is_some() || exp.length.is_some() {
            let mi = maximal_index_of(&self.gram, &mv).map_err(wrap)?;
            if let Some(want) = exp.maximal_index {
                if want != mi.index {
                    return Err(mismatch("maximal_index", want.to_string(), mi.index.to_string()));
                }
            }
            if let Some(want) = exp.length {
                let len = length_of(&self.gram, &mv, &mi).map_err(wrap)?;
                if want != len.length as u64 {
                    return Err(mismatch("length", want.to_string(), len.length.to_string()));
                }
            }
        }
        Ok(())
    }
}

/// Parses catalog text; in strict mode every entry's claims are verified.
pub fn parse_catalog(text: &str, strict: bool) -> Result<Vec<CatalogEntry>, CatalogError> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| CatalogError::Parse(e.to_string()))?;
    let raws = match raw {
        RawFile::Many(v) => v,
        RawFile::One(e) => vec![e],
    };
    let entries = raws.into_iter().map(CatalogEntry::from_raw).collect::<Result<Vec<_>, _>>()?;
    if strict {
        for e in &entries {
            e.verify()?;
        }
    }
    Ok(entries)
}

pub fn load_catalog(path: impl AsRef<Path>, strict: bool) -> Result<Vec<CatalogEntry>, CatalogError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| CatalogError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_catalog(&text, strict)
}

/// Serializes entries as a catalog document.
pub fn write_catalog(entries: &[CatalogEntry]) -> String {
    let values: Vec<Value> = entries.iter().map(CatalogEntry::to_json).collect();
    serde_json::to_string_pretty(&values).expect("json values")
}
