//! Report records and the verification checks behind the `maxindex` binary.

pub mod checks;

use std::fmt;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Published values disagree with each other; both are reported.
    KnownDiscrepancy,
    /// The search maximum is strictly below the published bound.
    GapReported,
    /// The search ran out of budget before certifying anything.
    BudgetExhausted,
    /// Informational row without a claim to check.
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::KnownDiscrepancy => "KNOWN-DISCREPANCY",
            Status::GapReported => "GAP",
            Status::BudgetExhausted => "BUDGET-EXHAUSTED",
            Status::Info => "INFO",
        };
        f.write_str(s)
    }
}

/// One checked statement or one output row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub statement: String,
    pub citation: String,
    pub expected: Value,
    pub computed: Value,
    pub status: Status,
}

impl Record {
    pub fn new(
        statement: impl Into<String>,
        citation: impl Into<String>,
        expected: impl Serialize,
        computed: impl Serialize,
        status: Status,
    ) -> Self {
        Record {
            statement: statement.into(),
            citation: citation.into(),
            expected: serde_json::to_value(expected).expect("serializable"),
            computed: serde_json::to_value(computed).expect("serializable"),
            status,
        }
    }

    /// Pass when `expected == computed`, fail otherwise.
    pub fn compare<T: Serialize + PartialEq>(
        statement: impl Into<String>,
        citation: impl Into<String>,
        expected: T,
        computed: T,
    ) -> Self {
        let status = if expected == computed { Status::Pass } else { Status::Fail };
        Record::new(statement, citation, expected, computed, status)
    }

    pub fn info(statement: impl Into<String>, computed: impl Serialize) -> Self {
        Record::new(statement, "", Value::Null, computed, Status::Info)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn render(records: &[Record], format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(records).expect("records serialize");
            s.push('\n');
            s
        }
        Format::Table => {
            let rows: Vec<[String; 4]> = records
                .iter()
                .map(|r| [r.status.to_string(), r.statement.clone(), cell(&r.expected), cell(&r.computed)])
                .collect();
            let header = ["status", "statement", "expected", "computed"].map(String::from);
            let mut width = header.clone().map(|h| h.len());
            for row in &rows {
                for (w, c) in width.iter_mut().zip(row) {
                    *w = (*w).max(c.chars().count());
                }
            }
            let mut out = String::new();
            for row in std::iter::once(&header).chain(&rows) {
                let line: Vec<String> = row.iter().zip(width).map(|(c, w)| format!("{c:<w$}")).collect();
                out.push_str(line.join("  ").trim_end());
                out.push('\n');
            }
            out
        }
    }
}

/// Process exit status for a set of records: 1 on any failure, 3 when a
/// budget ran out, 0 otherwise.
pub fn exit_code(records: &[Record]) -> i32 {
    if records.iter().any(|r| r.status == Status::Fail) {
        1
    } else if records.iter().any(|r| r.status == Status::BudgetExhausted) {
        3
    } else {
        0
    }
}

/// Parses `6..16` (inclusive), `6..=16` or a single `n`.
pub fn parse_range(s: &str) -> Result<std::ops::RangeInclusive<usize>, String> {
    let bad = || format!("invalid range {s:?}; expected N, A..B or A..=B");
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
        }
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok(lo..=hi)
}
