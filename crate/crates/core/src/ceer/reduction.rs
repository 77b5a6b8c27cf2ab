use std::collections::BTreeMap;
use std::fmt;

use super::{CeerError, CeerTable, Stage, StagedRelation, StagedSet};

/// A partial computable map given as a table of converged values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReductionFn {
    table: BTreeMap<usize, (usize, Stage)>,
    totality_bound: usize,
}

impl ReductionFn {
    pub fn new(totality_bound: usize) -> Self {
        Self { table: BTreeMap::new(), totality_bound }
    }

    /// `n ↦ map(n)` below `bound`, converged at stage 0.
    pub fn from_fn(bound: usize, map: impl Fn(usize) -> usize) -> Self {
        let mut f = Self::new(bound);
        for n in 0..bound {
            f.define(n, map(n), 0).expect("fresh table");
        }
        f
    }

    pub fn identity(bound: usize) -> Self {
        Self::from_fn(bound, |n| n)
    }

    pub fn totality_bound(&self) -> usize {
        self.totality_bound
    }

    /// Records `f(arg) = value`, converged at `stage`. Re-recording the same
    /// value is a no-op; a different value is an error.
    pub fn define(&mut self, arg: usize, value: usize, stage: Stage) -> Result<(), CeerError> {
        match self.table.get(&arg) {
            Some(&(old, _)) if old != value => Err(CeerError::Redefined { arg, old, new: value }),
            Some(_) => Ok(()),
            None => {
                self.table.insert(arg, (value, stage));
                Ok(())
            }
        }
    }

    /// Value at `arg` if converged by `stage`.
    pub fn eval(&self, arg: usize, stage: Stage) -> Option<usize> {
        self.table.get(&arg).filter(|&&(_, s)| s <= stage).map(|&(v, _)| v)
    }

    /// Value at `arg` in the limit.
    pub fn value(&self, arg: usize) -> Result<usize, CeerError> {
        self.table.get(&arg).map(|&(v, _)| v).ok_or(CeerError::Partial(arg))
    }

    pub fn convergence_stage(&self, arg: usize) -> Option<Stage> {
        self.table.get(&arg).map(|&(_, s)| s)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Stage)> + '_ {
        self.table.iter().map(|(&a, &(v, s))| (a, v, s))
    }

    fn check_total(&self, bound: usize) -> Result<(), CeerError> {
        (0..bound).try_for_each(|n| self.value(n).map(|_| ()))
    }
}

/// Stages at which a pullback can change.
fn pullback_stages(f: &ReductionFn, target: &impl StagedRelation, bound: usize) -> Vec<Stage> {
    let mut stages: Vec<Stage> = match target.change_stages() {
        Some(s) => s,
        None => (0..=target.final_stage()).collect(),
    };
    stages.extend((0..bound).filter_map(|n| f.convergence_stage(n)));
    stages.sort_unstable();
    stages.dedup();
    stages
}

/// `i ~ j` iff `f(i) R f(j)`, as a ceer on `[0, f.totality_bound())`.
///
/// At stage `s` an argument whose value has not converged by `s` is related
/// only to itself.
pub fn pullback(f: &ReductionFn, target: &impl StagedRelation) -> Result<CeerTable, CeerError> {
    let bound = f.totality_bound();
    f.check_total(bound)?;
    let mut out = CeerTable::identity(bound);
    for s in pullback_stages(f, target, bound) {
        let mut anchors: Vec<(usize, usize)> = Vec::new();
        for i in 0..bound {
            let Some(fi) = f.eval(i, s) else { continue };
            let mut placed = false;
            for &(anchor, fa) in &anchors {
                if target.related_at(fa, fi, s)? {
                    if !out.related(anchor, i, s)? {
                        out.assert_pair(anchor, i, s)?;
                    }
                    placed = true;
                    break;
                }
            }
            if !placed {
                anchors.push((i, fi));
            }
        }
    }
    Ok(out)
}

/// Outcome of checking a candidate reduction on an initial segment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReductionReport {
    /// `i E j` at the queried stage, but `f(i)`, `f(j)` unrelated at the
    /// target's final stage. Conclusive.
    pub positive_violations: Vec<(usize, usize)>,
    /// `f(i) R f(j)` at the target's final stage while `i`, `j` are not yet
    /// `E`-related. Inconclusive: `E` may still collapse them.
    pub unaligned_so_far: Vec<(usize, usize)>,
}

impl ReductionReport {
    pub fn is_clean(&self) -> bool {
        self.positive_violations.is_empty() && self.unaligned_so_far.is_empty()
    }
}

impl fmt::Display for ReductionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            return write!(f, "no violations");
        }
        for (i, j) in &self.positive_violations {
            writeln!(f, "violation (conclusive): {i} ~ {j} but images unrelated")?;
        }
        for (i, j) in &self.unaligned_so_far {
            writeln!(f, "unaligned so far (inconclusive): images of {i}, {j} related")?;
        }
        Ok(())
    }
}

/// Checks `f` as a reduction from `source` to `target` on `[0, bound)`.
pub fn verify_reduction(
    f: &ReductionFn,
    source: &impl StagedRelation,
    target: &impl StagedRelation,
    bound: usize,
    stage: Stage,
) -> Result<ReductionReport, CeerError> {
    f.check_total(bound)?;
    let last = target.final_stage();
    let mut report = ReductionReport::default();
    for i in 0..bound {
        for j in i + 1..bound {
            let related = source.related_at(i, j, stage)?;
            let images = target.related_at(f.value(i)?, f.value(j)?, last)?;
            match (related, images) {
                (true, false) => report.positive_violations.push((i, j)),
                (false, true) => report.unaligned_so_far.push((i, j)),
                _ => {}
            }
        }
    }
    Ok(report)
}

/// Some `a ≠ b` in `W_s` with `a E_s b`, scanning `W` in enumeration order.
pub fn darkness_probe(
    e: &impl StagedRelation,
    w: &StagedSet,
    stage: Stage,
) -> Result<Option<(usize, usize)>, CeerError> {
    let members: Vec<usize> = w.members_at(stage).collect();
    for (idx, &b) in members.iter().enumerate() {
        for &a in &members[..idx] {
            if a != b && e.related_at(a, b, stage)? {
                return Ok(Some((a, b)));
            }
        }
    }
    Ok(None)
}

/// Whether no two entries of `t` are related at `stage`. Only a `false`
/// answer is conclusive.
pub fn lightness_witness_check(
    e: &impl StagedRelation,
    t: &[usize],
    stage: Stage,
) -> Result<bool, CeerError> {
    for (idx, &b) in t.iter().enumerate() {
        for &a in &t[..idx] {
            if a == b {
                return Err(CeerError::RepeatedWitness(a));
            }
            if e.related_at(a, b, stage)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
