use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::word::{ExponentVector, Word};
use super::GroupError;
use crate::ceer::Stage;

/// Shapes of relations `x_j = w(x_0, …, x_{j-1})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    /// `x_j = 1`
    One,
    /// `x_j = x_i`
    Equal,
    /// `x_j = x_i^-1`
    Inverse,
    /// `Π_{k ∈ S} x_k = 1` solved for `x_{max S}`.
    Product,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    pub stage: Stage,
    pub lhs: usize,
    pub rhs: ExponentVector,
    pub kind: RelationKind,
}

impl Relation {
    pub fn one(stage: Stage, lhs: usize) -> Self {
        Self { stage, lhs, rhs: ExponentVector::new(), kind: RelationKind::One }
    }

    pub fn equal(stage: Stage, lhs: usize, rhs: usize) -> Self {
        Self { stage, lhs, rhs: ExponentVector::from([(rhs, 1)]), kind: RelationKind::Equal }
    }

    pub fn inverse(stage: Stage, lhs: usize, rhs: usize) -> Self {
        Self { stage, lhs, rhs: ExponentVector::from([(rhs, -1)]), kind: RelationKind::Inverse }
    }

    /// `Π_{k ∈ set} x_k = 1` rewritten as `x_{max} = (Π_{others} x_k)^-1`.
    pub fn product(stage: Stage, set: &[usize]) -> Self {
        let lhs = *set.iter().max().expect("nonempty index set");
        let rhs = set.iter().filter(|&&k| k != lhs).map(|&k| (k, -1)).collect();
        Self { stage, lhs, rhs, kind: RelationKind::Product }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{} = {}", self.lhs, Word::from_exponents(&self.rhs))
    }
}

impl FromStr for Relation {
    type Err = GroupError;

    /// Parses `"x8 = x2^-1 x4^-1"`; the stage is 0 and the kind is inferred.
    fn from_str(text: &str) -> Result<Self, GroupError> {
        let bad = |reason: &str| GroupError::Parse { input: text.into(), reason: reason.into() };
        let (lhs, rhs) = text.split_once('=').ok_or_else(|| bad("missing '='"))?;
        let lhs = Word::parse(lhs)?;
        let [l] = lhs.letters() else { return Err(bad("left side must be one generator")) };
        if l.exp != 1 {
            return Err(bad("left side must be one generator"));
        }
        let rhs = Word::parse(rhs)?.exponents();
        let kind = match rhs.iter().collect::<Vec<_>>().as_slice() {
            [] => RelationKind::One,
            [(_, 1)] => RelationKind::Equal,
            [(_, -1)] => RelationKind::Inverse,
            _ => RelationKind::Product,
        };
        Ok(Relation { stage: 0, lhs: l.gen, rhs, kind })
    }
}

/// Status of a generator in the ∗-universal construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenStatus {
    /// Still carries the word `v_j`.
    Level(usize),
    /// Cancelled out of `v_j` by a pair of collapses; never used again.
    Free,
    /// Fixed by an initialization or Case 3c product relation.
    Determined,
    /// Sent to 1 or identified with a lower-level generator.
    Collapsed,
}

impl fmt::Display for GenStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenStatus::Level(j) => write!(f, "level-{j}"),
            GenStatus::Free => write!(f, "free"),
            GenStatus::Determined => write!(f, "determined"),
            GenStatus::Collapsed => write!(f, "collapsed"),
        }
    }
}

impl FromStr for GenStatus {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, GroupError> {
        match s {
            "free" => Ok(GenStatus::Free),
            "determined" => Ok(GenStatus::Determined),
            "collapsed" => Ok(GenStatus::Collapsed),
            _ => s
                .strip_prefix("level-")
                .and_then(|j| j.parse().ok())
                .map(GenStatus::Level)
                .ok_or_else(|| GroupError::Parse { input: s.into(), reason: "unknown status".into() }),
        }
    }
}

impl Serialize for GenStatus {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GenStatus {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Abelian group on `x_0 … x_{n-1}` with a stage-enumerated triangular
/// relation stream.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StagedPresentation {
    generators: usize,
    relations: Vec<Relation>,
    by_lhs: BTreeMap<usize, usize>,
    statuses: Vec<Vec<(Stage, GenStatus)>>,
}

impl StagedPresentation {
    /// All generators start with status `initial`.
    pub fn new(generators: usize, initial: impl Fn(usize) -> GenStatus) -> Self {
        Self {
            generators,
            relations: Vec::new(),
            by_lhs: BTreeMap::new(),
            statuses: (0..generators).map(|g| vec![(0, initial(g))]).collect(),
        }
    }

    /// Free abelian group on `generators` generators.
    pub fn free(generators: usize) -> Self {
        Self::new(generators, |_| GenStatus::Free)
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relations_at(&self, stage: Stage) -> impl Iterator<Item = &Relation> {
        self.relations.iter().take_while(move |r| r.stage <= stage)
    }

    pub fn last_stage(&self) -> Stage {
        self.relations.last().map_or(0, |r| r.stage)
    }

    pub fn relation_for(&self, lhs: usize) -> Option<&Relation> {
        self.by_lhs.get(&lhs).map(|&i| &self.relations[i])
    }

    /// Appends a relation, rejecting anything that would break
    /// triangularity or stage order.
    pub fn add_relation(&mut self, rel: Relation) -> Result<(), GroupError> {
        let fail = |reason: String| GroupError::Triangularity { relation: rel.to_string(), reason };
        if rel.lhs >= self.generators {
            return Err(GroupError::UnknownGenerator(rel.lhs));
        }
        if self.by_lhs.contains_key(&rel.lhs) {
            return Err(fail(format!("x{} is already a left-hand side", rel.lhs)));
        }
        if let Some((&g, _)) = rel.rhs.iter().find(|(&g, _)| g >= rel.lhs) {
            return Err(fail(format!("right-hand side mentions x{g}, not below x{}", rel.lhs)));
        }
        if rel.stage < self.last_stage() {
            return Err(fail(format!("stage {} precedes stage {}", rel.stage, self.last_stage())));
        }
        self.by_lhs.insert(rel.lhs, self.relations.len());
        self.relations.push(rel);
        Ok(())
    }

    pub fn set_status(&mut self, gen: usize, stage: Stage, status: GenStatus) {
        let history = &mut self.statuses[gen];
        if history.last().map(|&(_, s)| s) != Some(status) {
            history.push((stage, status));
        }
    }

    pub fn status(&self, gen: usize) -> GenStatus {
        self.statuses[gen].last().expect("initial status").1
    }

    pub fn status_at(&self, gen: usize, stage: Stage) -> GenStatus {
        let history = &self.statuses[gen];
        history.iter().rev().find(|(s, _)| *s <= stage).unwrap_or(&history[0]).1
    }

    pub fn status_history(&self, gen: usize) -> &[(Stage, GenStatus)] {
        &self.statuses[gen]
    }

    /// Canonical form of `w` in `G_s`: left-hand sides are replaced by their
    /// right-hand sides, highest index first, until only generators that are
    /// not a left-hand side by stage `s` remain.
    pub fn staged_abelian_wp(
        &self,
        w: &ExponentVector,
        stage: Stage,
    ) -> Result<ExponentVector, GroupError> {
        if let Some((&g, _)) = w.iter().next_back().filter(|(&g, _)| g >= self.generators) {
            return Err(GroupError::UnknownGenerator(g));
        }
        let mut work = w.clone();
        let mut out = ExponentVector::new();
        while let Some((g, e)) = work.pop_last() {
            if e == 0 {
                continue;
            }
            match self.relation_for(g).filter(|r| r.stage <= stage) {
                None => {
                    out.insert(g, e);
                }
                Some(rel) => {
                    for (&i, &c) in &rel.rhs {
                        let v = work.entry(i).or_insert(0);
                        *v += e * c;
                        if *v == 0 {
                            work.remove(&i);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn is_identity(&self, w: &ExponentVector, stage: Stage) -> Result<bool, GroupError> {
        Ok(self.staged_abelian_wp(w, stage)?.is_empty())
    }

    /// Re-checks every relation: each left-hand side occurs once and every
    /// right-hand side index is smaller. Returns the first offender.
    pub fn check_triangular(relations: &[Relation]) -> Result<(), GroupError> {
        let mut seen = std::collections::BTreeSet::new();
        for rel in relations {
            let fail = |reason: String| GroupError::Triangularity { relation: rel.to_string(), reason };
            if !seen.insert(rel.lhs) {
                return Err(fail(format!("x{} is a left-hand side twice", rel.lhs)));
            }
            if let Some(&g) = rel.rhs.keys().find(|&&g| g >= rel.lhs) {
                return Err(fail(format!("right-hand side mentions x{g}")));
            }
        }
        Ok(())
    }
}
