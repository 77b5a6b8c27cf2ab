use std::collections::BTreeMap;

use super::module_group::z2_module_wp;
use super::presentation::StagedPresentation;
use super::word::{Word, WordCodec};
use super::GroupError;
use crate::ceer::{CeerError, CeerTable, ReductionFn, Stage, StagedRelation};

/// Substitution of a fixed word for each generator of a new finite
/// generating set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordMap {
    reps: BTreeMap<usize, Word>,
}

/// The word map induced by representatives `reps` of the new generators as
/// words in the old ones.
pub fn finite_genset_translate(reps: BTreeMap<usize, Word>) -> WordMap {
    WordMap { reps }
}

impl WordMap {
    pub fn apply(&self, w: &Word) -> Result<Word, GroupError> {
        let mut out = Word::empty();
        for l in w.letters() {
            let rep = self.reps.get(&l.gen).ok_or(GroupError::UnknownGenerator(l.gen))?;
            let piece = if l.exp < 0 { rep.inverse() } else { rep.clone() };
            for _ in 0..l.exp.unsigned_abs() {
                out = out.concat(&piece);
            }
        }
        Ok(out)
    }

    /// The map on word codes below `bound`, new words coded with `from` and
    /// their images with `to`.
    pub fn to_reduction(
        &self,
        from: WordCodec,
        to: WordCodec,
        bound: usize,
    ) -> Result<ReductionFn, GroupError> {
        let mut f = ReductionFn::new(bound);
        for n in 0..bound {
            let image = to.encode(&self.apply(&from.decode(n))?)?;
            f.define(n, image, 0)?;
        }
        Ok(f)
    }
}

fn decode_checked(codec: WordCodec, code: usize, bound: usize) -> Result<Word, CeerError> {
    let w = codec.decode(code);
    match w.letters().iter().find(|l| l.gen >= bound) {
        Some(l) => Err(CeerError::OutOfRange { index: l.gen, bound }),
        None => Ok(w),
    }
}

/// Word problem of a ceer's `Z/2Z`-module group, on word codes.
#[derive(Debug, Clone, Copy)]
pub struct ModuleWordProblem<'a> {
    pub ceer: &'a CeerTable,
}

impl ModuleWordProblem<'_> {
    /// Code of the one-letter word `g_n`.
    pub fn generator_code(n: usize) -> usize {
        WordCodec::Infinite.encode(&Word::gen(n)).expect("single letters never overflow")
    }
}

impl StagedRelation for ModuleWordProblem<'_> {
    fn related_at(&self, a: usize, b: usize, stage: Stage) -> Result<bool, CeerError> {
        let bound = self.ceer.bound();
        let u = decode_checked(WordCodec::Infinite, a, bound)?;
        let v = decode_checked(WordCodec::Infinite, b, bound)?;
        let canon = |w: &Word| {
            z2_module_wp(self.ceer, w, stage).map_err(|e| match e {
                GroupError::Ceer(c) => c,
                other => unreachable!("module word problem only fails on range: {other}"),
            })
        };
        Ok(canon(&u)? == canon(&v)?)
    }

    fn final_stage(&self) -> Stage {
        self.ceer.last_stage()
    }

    fn change_stages(&self) -> Option<Vec<Stage>> {
        self.ceer.change_stages()
    }
}

/// Word problem of a staged abelian presentation, on word codes.
#[derive(Debug, Clone, Copy)]
pub struct AbelianWordProblem<'a> {
    pub presentation: &'a StagedPresentation,
    pub codec: WordCodec,
}

impl StagedRelation for AbelianWordProblem<'_> {
    fn related_at(&self, a: usize, b: usize, stage: Stage) -> Result<bool, CeerError> {
        let n = self.presentation.generators();
        let u = decode_checked(self.codec, a, n)?;
        let v = decode_checked(self.codec, b, n)?;
        let quotient = u.inverse().concat(&v).exponents();
        Ok(self.presentation.is_identity(&quotient, stage).expect("generators checked"))
    }

    fn final_stage(&self) -> Stage {
        self.presentation.last_stage()
    }

    fn change_stages(&self) -> Option<Vec<Stage>> {
        let mut stages: Vec<Stage> = self.presentation.relations().iter().map(|r| r.stage).collect();
        stages.insert(0, 0);
        stages.dedup();
        Some(stages)
    }
}
