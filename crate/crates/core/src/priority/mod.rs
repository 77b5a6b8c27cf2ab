//! A sequential finite-injury engine and the constructions run on it.
//!
//! Every construction proceeds in stages. At each stage the environment
//! (new column entries, ceer collapses) is read first, then at most one
//! requirement acts: the highest-priority one that is ready. Acting
//! reinitializes lower-priority requirements, each of which gets its own
//! `reinitialized` record, so the injury discipline can be checked from the
//! log alone.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraError, GsVerdict};
use crate::ceer::{CeerError, Stage};
use crate::groups::{GenStatus, GroupError};

mod dark;
mod sigma3;
mod star;
mod sug;
mod verify;

pub use dark::{run_dark_group, run_dark_ring, DarkOutputs, DarkParams, DarkWitness, TestStream};
pub use sigma3::{run_sigma3_ceer, Sigma3Outputs};
pub use star::{
    level_census, run_star_universal, star_word, words_equal, LevelCensus, PhiStub, StarOutputs,
    StarParams, StarUniversal,
};
pub use sug::{run_sug_indexset, SugInputs, SugOutputs};
pub use verify::{verify_log, SuiteReport, SUITES};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Ceer(#[from] CeerError),
    #[error("stage {stage}: {verdict}")]
    GsViolation { stage: Stage, verdict: GsVerdict },
    #[error("level {level} ran out of generators while {requirement} acted: {reason}")]
    Budget { level: usize, requirement: String, reason: String },
    #[error("{requirement} needs degree {degree}, beyond maxdeg = {maxdeg}")]
    Horizon { requirement: String, degree: usize, maxdeg: usize },
    #[error("bad parameters: {0}")]
    Params(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RequirementKind {
    #[serde(rename = "L_n-light")]
    Light,
    #[serde(rename = "D_m-collapse")]
    Collapse,
    #[serde(rename = "C_k-coding")]
    Coding,
    #[serde(rename = "D_kk'-coding")]
    PairCoding,
    #[serde(rename = "L_m-lowness")]
    Lowness,
    #[serde(rename = "R_e-diagonal")]
    Diagonal,
    #[serde(rename = "environment")]
    Environment,
    #[serde(rename = "initialization")]
    Initialization,
}

/// A named requirement at a fixed priority rank; rank 0 is reserved for the
/// environment and initialization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Requirement {
    pub name: String,
    pub kind: RequirementKind,
    pub priority: usize,
}

impl Requirement {
    pub fn new(name: impl Into<String>, kind: RequirementKind, priority: usize) -> Self {
        Self { name: name.into(), kind, priority }
    }

    pub fn environment() -> Self {
        Self::new("env", RequirementKind::Environment, 0)
    }

    pub fn initialization() -> Self {
        Self::new("init", RequirementKind::Initialization, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusChange {
    pub generator: usize,
    pub from: GenStatus,
    pub to: GenStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogRecord {
    pub stage: Stage,
    pub requirement: String,
    pub kind: RequirementKind,
    pub priority: usize,
    pub action: String,
    #[serde(rename = "emitted-relations", default)]
    pub emitted_relations: Vec<String>,
    #[serde(rename = "status-changes", default)]
    pub status_changes: Vec<StatusChange>,
    #[serde(default)]
    pub reinitialized: Vec<String>,
    #[serde(default)]
    pub detail: BTreeMap<String, String>,
}

impl LogRecord {
    pub fn new(stage: Stage, req: &Requirement, action: impl Into<String>) -> Self {
        Self {
            stage,
            requirement: req.name.clone(),
            kind: req.kind,
            priority: req.priority,
            action: action.into(),
            emitted_relations: Vec::new(),
            status_changes: Vec::new(),
            reinitialized: Vec::new(),
            detail: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.detail.insert(key.to_string(), value.to_string());
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.detail.get(key).map(String::as_str)
    }

    pub fn is_reinitialization(&self) -> bool {
        self.action == "reinitialized"
    }
}

/// An append-only action log.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunLog {
    pub records: Vec<LogRecord>,
}

impl RunLog {
    pub fn push(&mut self, record: LogRecord) -> &mut LogRecord {
        self.records.push(record);
        self.records.last_mut().expect("just pushed")
    }

    /// Records that `by` reinitialized each of `victims`, and lists them on
    /// the last record of `by`.
    pub fn reinitialize(&mut self, stage: Stage, by: &Requirement, victims: &[Requirement]) {
        if victims.is_empty() {
            return;
        }
        if let Some(last) = self.records.iter_mut().rev().find(|r| r.requirement == by.name) {
            last.reinitialized.extend(victims.iter().map(|v| v.name.clone()));
        }
        for v in victims {
            self.records.push(LogRecord::new(stage, v, "reinitialized").with("by", &by.name));
        }
    }

    pub fn to_jsonl(&self) -> String {
        records_to_jsonl(&self.records)
    }
}

pub fn records_to_jsonl(records: &[LogRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

/// Parses a JSONL log, reporting the 1-based line of the first bad record.
pub fn parse_log(text: &str) -> Result<Vec<LogRecord>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| format!("line {}: {e}", i + 1)))
        .collect()
}

#[derive(Debug, Clone)]
pub enum RunOutputs {
    Dark(DarkOutputs),
    Sigma3(Sigma3Outputs),
    Star(Box<StarOutputs>),
    Sug(Box<SugOutputs>),
}

/// A finished run: the log plus whatever the construction built.
#[derive(Debug, Clone)]
pub struct ConstructionRun {
    pub name: String,
    pub stages_run: usize,
    pub log: RunLog,
    pub outputs: RunOutputs,
}

impl ConstructionRun {
    pub fn log_jsonl(&self) -> String {
        self.log.to_jsonl()
    }

    pub fn dark(&self) -> Option<&DarkOutputs> {
        match &self.outputs {
            RunOutputs::Dark(d) => Some(d),
            _ => None,
        }
    }

    pub fn sigma3(&self) -> Option<&Sigma3Outputs> {
        match &self.outputs {
            RunOutputs::Sigma3(d) => Some(d),
            _ => None,
        }
    }

    pub fn star(&self) -> Option<&StarOutputs> {
        match &self.outputs {
            RunOutputs::Star(d) => Some(d),
            _ => None,
        }
    }

    pub fn sug(&self) -> Option<&SugOutputs> {
        match &self.outputs {
            RunOutputs::Sug(d) => Some(d),
            _ => None,
        }
    }

    /// Records per action requirement, in order.
    pub fn actions_of(&self, requirement: &str) -> Vec<&LogRecord> {
        self.log
            .records
            .iter()
            .filter(|r| r.requirement == requirement && !r.is_reinitialization())
            .collect()
    }
}
