//! Line-oriented JSON dumps.
//!
//! A table dump is an optional header `{"bound":n}` followed by one
//! `{"a":n,"b":m,"s":t}` record per enumerated pair, in enumeration order.
//! A partition dump is one sorted JSON array per class, classes ordered by
//! least member.

use serde::Deserialize;

use super::{CeerError, CeerTable, Stage, StagedPair, DEFAULT_BOUND};

#[derive(Deserialize)]
#[serde(untagged)]
enum Line {
    Header { bound: usize },
    Pair(StagedPair),
}

pub fn to_jsonl(table: &CeerTable) -> String {
    let mut out = format!("{{\"bound\":{}}}\n", table.bound());
    for p in table.pairs() {
        out.push_str(&serde_json::to_string(p).expect("plain struct"));
        out.push('\n');
    }
    out
}

/// Parses a table dump. Without a header the bound is the larger of
/// [`DEFAULT_BOUND`] and one past the largest index mentioned.
pub fn load_jsonl(text: &str) -> Result<CeerTable, CeerError> {
    let mut bound = None;
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(line)
            .map_err(|e| CeerError::Dump { line: idx + 1, reason: e.to_string() })?;
        match parsed {
            Line::Header { bound: b } => {
                if bound.is_some() || !pairs.is_empty() {
                    return Err(CeerError::Dump {
                        line: idx + 1,
                        reason: "header must come first".into(),
                    });
                }
                bound = Some(b);
            }
            Line::Pair(p) => pairs.push((idx + 1, p)),
        }
    }
    let bound = bound.unwrap_or_else(|| {
        let top = pairs.iter().map(|(_, p)| p.a.max(p.b) + 1).max().unwrap_or(0);
        top.max(DEFAULT_BOUND)
    });
    let mut table = CeerTable::identity(bound);
    for (line, p) in pairs {
        table
            .assert_pair(p.a, p.b, p.stage)
            .map_err(|e| CeerError::Dump { line, reason: e.to_string() })?;
    }
    Ok(table)
}

/// Class lists of the stage-`s` partition below `limit`, one JSON array per
/// line.
pub fn partition_lines(table: &CeerTable, stage: Stage, limit: usize) -> Vec<String> {
    table
        .classes(stage, limit)
        .iter()
        .map(|class| serde_json::to_string(class).expect("vector of integers"))
        .collect()
}
