use std::collections::BTreeSet;

use super::word::Word;
use super::GroupError;
use crate::ceer::{CeerTable, Stage, StagedSet};

/// `<g_k | g_k^2 = 1, g_j g_k = g_k g_j, g_j = g_k for j E k>`: the
/// `Z/2Z`-vector space on the classes of `E`.
#[derive(Debug, Clone, Copy)]
pub struct CeerModuleGroup<'a> {
    pub ceer: &'a CeerTable,
}

impl<'a> CeerModuleGroup<'a> {
    pub fn new(ceer: &'a CeerTable) -> Self {
        Self { ceer }
    }

    pub fn canonical(&self, w: &Word, stage: Stage) -> Result<BTreeSet<usize>, GroupError> {
        z2_module_wp(self.ceer, w, stage)
    }
}

/// Least members of the classes met an odd number of times by `w` at stage
/// `s`. The word is the identity iff the set is empty.
pub fn z2_module_wp(
    ceer: &CeerTable,
    w: &Word,
    stage: Stage,
) -> Result<BTreeSet<usize>, GroupError> {
    let partition = ceer.snapshot(stage);
    let mut odd = BTreeSet::new();
    for l in w.letters() {
        let rep = partition
            .rep(l.gen)
            .ok_or(crate::ceer::CeerError::OutOfRange { index: l.gen, bound: ceer.bound() })?;
        if l.exp % 2 != 0 && !odd.remove(&rep) {
            odd.insert(rep);
        }
    }
    Ok(odd)
}

/// Word problem of `G_A = <g_i | g_i^2 = 1, g_i = 1 for i ∈ A>`: whether
/// every generator of odd multiplicity has entered `A` by stage `s`.
pub fn ga_wp(a: &StagedSet, w: &Word, stage: Stage) -> bool {
    let mut odd = BTreeSet::new();
    for l in w.letters() {
        if l.exp % 2 != 0 && !odd.remove(&l.gen) {
            odd.insert(l.gen);
        }
    }
    odd.iter().all(|&g| a.contains_at(g, stage))
}
