//! Stage-enumerated equivalence relations on an initial segment of the
//! naturals, and the order-theoretic operations on them.
//!
//! A [`CeerTable`] records every enumerated pair together with the stage at
//! which it was enumerated. Queries always name a stage: the answer is the
//! equivalence closure of exactly the pairs enumerated by that stage. Only
//! positive facts are ever asserted; "not related" always means "not related
//! yet".
//!
//! The union-find behind a table is partially persistent: links are
//! timestamped with the stage at which they were made and never move, so a
//! `find` at stage `s` simply ignores links made after `s`.

mod dump;
mod functional;
mod ops;
pub mod pairing;
mod reduction;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dump::{load_jsonl, partition_lines, to_jsonl};
pub use functional::{FunctionalStub, Halting, OracleView, StubComputation};
pub use ops::{product, uniform_join};
pub use reduction::{
    darkness_probe, lightness_witness_check, pullback, verify_reduction, ReductionFn,
    ReductionReport,
};

/// Construction stage. Stage 0 is the first stage.
pub type Stage = usize;

/// Working bound used when none is given.
pub const DEFAULT_BOUND: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CeerError {
    #[error("stage {stage} precedes the last enumerated stage {last}")]
    StageRegression { stage: Stage, last: Stage },
    #[error("index {index} is outside the working bound {bound}")]
    OutOfRange { index: usize, bound: usize },
    #[error("reduction is undefined at argument {0}")]
    Partial(usize),
    #[error("reduction already maps {arg} to {old}, cannot remap to {new}")]
    Redefined { arg: usize, old: usize, new: usize },
    #[error("lightness witness repeats the entry {0}")]
    RepeatedWitness(usize),
    #[error("malformed dump line {line}: {reason}")]
    Dump { line: usize, reason: String },
}

/// One enumerated pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StagedPair {
    pub a: usize,
    pub b: usize,
    #[serde(rename = "s")]
    pub stage: Stage,
}

/// Anything that answers "are `a` and `b` related by stage `s`".
///
/// Implemented by [`CeerTable`] and by the word-problem adapters in
/// [`crate::groups`], so reductions can be checked against either.
pub trait StagedRelation {
    fn related_at(&self, a: usize, b: usize, stage: Stage) -> Result<bool, CeerError>;

    /// Last stage at which the relation changes; queries at or after it see
    /// the whole (finite) enumeration.
    fn final_stage(&self) -> Stage;

    /// Stages at which the relation can change, when known. `None` means
    /// every stage up to [`final_stage`](Self::final_stage) must be examined.
    fn change_stages(&self) -> Option<Vec<Stage>> {
        None
    }
}

/// A stage-enumerated ceer restricted to `[0, bound)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CeerTable {
    bound: usize,
    pairs: Vec<StagedPair>,
    parent: Vec<u32>,
    size: Vec<u32>,
    link_stage: Vec<Stage>,
    last_stage: Stage,
}

impl Default for CeerTable {
    fn default() -> Self {
        Self::identity(DEFAULT_BOUND)
    }
}

impl CeerTable {
    /// The identity relation on `[0, bound)`.
    pub fn identity(bound: usize) -> Self {
        Self {
            bound,
            pairs: Vec::new(),
            parent: (0..bound as u32).collect(),
            size: vec![1; bound],
            link_stage: vec![Stage::MAX; bound],
            last_stage: 0,
        }
    }

    /// The relation with everything related from stage 0 on.
    pub fn all_related(bound: usize) -> Self {
        let mut table = Self::identity(bound);
        for i in 1..bound {
            table.assert_pair(0, i, 0).expect("in range and monotone");
        }
        table
    }

    /// Builds a table from pairs; they are enumerated in stage order (ties
    /// keep their input order).
    pub fn from_pairs(
        bound: usize,
        pairs: impl IntoIterator<Item = (usize, usize, Stage)>,
    ) -> Result<Self, CeerError> {
        let mut sorted: Vec<_> = pairs.into_iter().collect();
        sorted.sort_by_key(|&(_, _, s)| s);
        let mut table = Self::identity(bound);
        for (a, b, s) in sorted {
            table.assert_pair(a, b, s)?;
        }
        Ok(table)
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn pairs(&self) -> &[StagedPair] {
        &self.pairs
    }

    /// Last stage at which a pair was enumerated (0 for an empty table).
    pub fn last_stage(&self) -> Stage {
        self.last_stage
    }

    fn check(&self, index: usize) -> Result<(), CeerError> {
        if index >= self.bound {
            return Err(CeerError::OutOfRange { index, bound: self.bound });
        }
        Ok(())
    }

    /// Enumerates `a ~ b` at `stage`. Returns whether two classes merged.
    pub fn assert_pair(&mut self, a: usize, b: usize, stage: Stage) -> Result<bool, CeerError> {
        self.check(a)?;
        self.check(b)?;
        if !self.pairs.is_empty() && stage < self.last_stage {
            return Err(CeerError::StageRegression { stage, last: self.last_stage });
        }
        self.pairs.push(StagedPair { a, b, stage });
        self.last_stage = stage;
        let (ra, rb) = (self.root(a, Stage::MAX), self.root(b, Stage::MAX));
        if ra == rb {
            return Ok(false);
        }
        let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big as u32;
        self.link_stage[small] = stage;
        self.size[big] += self.size[small];
        Ok(true)
    }

    /// Functional form of [`assert_pair`](Self::assert_pair).
    pub fn with_pair(mut self, a: usize, b: usize, stage: Stage) -> Result<Self, CeerError> {
        self.assert_pair(a, b, stage)?;
        Ok(self)
    }

    fn root(&self, mut x: usize, stage: Stage) -> usize {
        while self.parent[x] as usize != x && self.link_stage[x] <= stage {
            x = self.parent[x] as usize;
        }
        x
    }

    /// Whether `a` and `b` are related by `stage`.
    pub fn related(&self, a: usize, b: usize, stage: Stage) -> Result<bool, CeerError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.root(a, stage) == self.root(b, stage))
    }

    /// The stage-`s` partition as an immutable value.
    pub fn snapshot(&self, stage: Stage) -> Partition {
        let mut least = vec![usize::MAX; self.bound];
        let roots: Vec<usize> = (0..self.bound).map(|x| self.root(x, stage)).collect();
        for (x, &r) in roots.iter().enumerate() {
            least[r] = least[r].min(x);
        }
        let rep = roots.iter().map(|&r| least[r]).collect();
        Partition { rep, stage }
    }

    /// Snapshot at the last stage.
    pub fn final_partition(&self) -> Partition {
        self.snapshot(self.last_stage)
    }

    /// Sorted class lists of the stage-`s` partition below `limit`.
    pub fn classes(&self, stage: Stage, limit: usize) -> Vec<Vec<usize>> {
        self.snapshot(stage).classes_below(limit.min(self.bound))
    }

    /// Distinct stages at which some pair was enumerated, ascending.
    pub fn stages(&self) -> Vec<Stage> {
        let mut stages: Vec<Stage> = self.pairs.iter().map(|p| p.stage).collect();
        stages.dedup();
        stages
    }

    /// Same relation, new bound. Pairs outside the new bound are dropped.
    pub fn restricted(&self, bound: usize) -> Self {
        let mut table = Self::identity(bound);
        for p in &self.pairs {
            if p.a < bound && p.b < bound {
                table.assert_pair(p.a, p.b, p.stage).expect("pairs are stage-sorted");
            }
        }
        table
    }
}

impl StagedRelation for CeerTable {
    fn related_at(&self, a: usize, b: usize, stage: Stage) -> Result<bool, CeerError> {
        self.related(a, b, stage)
    }

    fn final_stage(&self) -> Stage {
        self.last_stage
    }

    fn change_stages(&self) -> Option<Vec<Stage>> {
        let mut stages = self.stages();
        stages.insert(0, 0);
        stages.dedup();
        Some(stages)
    }
}

/// A frozen partition: every index mapped to the least member of its class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    rep: Vec<usize>,
    stage: Stage,
}

impl Partition {
    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn len(&self) -> usize {
        self.rep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rep.is_empty()
    }

    /// Least member of the class of `x`.
    pub fn rep(&self, x: usize) -> Option<usize> {
        self.rep.get(x).copied()
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        matches!((self.rep(a), self.rep(b)), (Some(x), Some(y)) if x == y)
    }

    pub fn classes_below(&self, limit: usize) -> Vec<Vec<usize>> {
        let mut by_rep: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..limit.min(self.rep.len()) {
            by_rep.entry(self.rep[x]).or_default().push(x);
        }
        by_rep.into_values().collect()
    }

    pub fn class_count(&self) -> usize {
        self.rep.iter().enumerate().filter(|&(x, &r)| x == r).count()
    }
}

/// A stage-enumerated set of naturals, e.g. a c.e. set `W` or a column
/// `U^[n]`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StagedSet {
    entries: Vec<(usize, Stage)>,
}

impl StagedSet {
    pub fn new(entries: impl IntoIterator<Item = (usize, Stage)>) -> Self {
        let mut entries: Vec<_> = entries.into_iter().collect();
        entries.sort_by_key(|&(_, s)| s);
        Self { entries }
    }

    pub fn entries(&self) -> &[(usize, Stage)] {
        &self.entries
    }

    /// Elements enumerated by `stage`, in enumeration order.
    pub fn members_at(&self, stage: Stage) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().take_while(move |&&(_, s)| s <= stage).map(|&(x, _)| x)
    }

    pub fn count_at(&self, stage: Stage) -> usize {
        self.entries.partition_point(|&(_, s)| s <= stage)
    }

    pub fn contains_at(&self, x: usize, stage: Stage) -> bool {
        self.members_at(stage).any(|y| y == x)
    }
}
