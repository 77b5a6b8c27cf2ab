use std::fmt;

use super::module_group::z2_module_wp;
use super::presentation::StagedPresentation;
use super::word::{Letter, StarWord, Word};
use super::GroupError;
use crate::ceer::{CeerTable, Stage};

/// Solves the word problem of one free factor by returning a canonical word:
/// two words are equal in the factor iff their canonical words are equal,
/// and the identity's canonical word is empty.
pub trait FactorDecider {
    fn canonical(&self, w: &Word) -> Result<Word, GroupError>;

    fn is_identity(&self, w: &Word) -> Result<bool, GroupError> {
        Ok(self.canonical(w)?.is_empty())
    }
}

/// `Z/nZ` generated by `x0`.
#[derive(Debug, Clone, Copy)]
pub struct CyclicDecider {
    pub order: i64,
}

impl CyclicDecider {
    pub fn new(order: i64) -> Self {
        assert!(order >= 1);
        Self { order }
    }
}

impl FactorDecider for CyclicDecider {
    fn canonical(&self, w: &Word) -> Result<Word, GroupError> {
        let mut e = 0;
        for l in w.letters() {
            if l.gen != 0 {
                return Err(GroupError::UnknownGenerator(l.gen));
            }
            e += l.exp;
        }
        Ok(Word::power(0, e.rem_euclid(self.order)))
    }
}

/// The stage-`s` group of a staged abelian presentation.
#[derive(Debug, Clone, Copy)]
pub struct AbelianDecider<'a> {
    pub presentation: &'a StagedPresentation,
    pub stage: Stage,
}

impl FactorDecider for AbelianDecider<'_> {
    fn canonical(&self, w: &Word) -> Result<Word, GroupError> {
        let v = self.presentation.staged_abelian_wp(&w.exponents(), self.stage)?;
        Ok(Word::from_exponents(&v))
    }
}

/// The stage-`s` `Z/2Z`-module group over a ceer.
#[derive(Debug, Clone, Copy)]
pub struct ModuleDecider<'a> {
    pub ceer: &'a CeerTable,
    pub stage: Stage,
}

impl FactorDecider for ModuleDecider<'_> {
    fn canonical(&self, w: &Word) -> Result<Word, GroupError> {
        let odd = z2_module_wp(self.ceer, w, self.stage)?;
        Ok(Word(odd.into_iter().map(|g| Letter::new(g, 1)).collect()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syllable {
    pub factor: usize,
    pub word: Word,
}

/// A word in a free product, as a sequence of factor-tagged syllables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FreeProductWord {
    pub syllables: Vec<Syllable>,
}

impl FreeProductWord {
    pub fn new(syllables: impl IntoIterator<Item = (usize, Word)>) -> Self {
        Self { syllables: syllables.into_iter().map(|(factor, word)| Syllable { factor, word }).collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn inverse(&self) -> Self {
        Self {
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable { factor: s.factor, word: s.word.inverse() })
                .collect(),
        }
    }

    pub fn concat(&self, other: &Self) -> Self {
        Self { syllables: self.syllables.iter().chain(&other.syllables).cloned().collect() }
    }

    /// Adjacent syllables lie in distinct factors and none is empty.
    pub fn is_alternating(&self) -> bool {
        self.syllables.iter().all(|s| !s.word.is_empty())
            && self.syllables.windows(2).all(|w| w[0].factor != w[1].factor)
    }
}

impl fmt::Display for FreeProductWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> =
            self.syllables.iter().map(|s| format!("f{}[{}]", s.factor, s.word)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Normal form in the free product of the given factors: syllables are
/// canonicalized, identities dropped, and newly adjacent syllables of the
/// same factor merged. The word is the identity iff the result is empty.
pub fn fp_reduce(
    w: &FreeProductWord,
    factors: &[&dyn FactorDecider],
) -> Result<FreeProductWord, GroupError> {
    let mut stack: Vec<Syllable> = Vec::new();
    for s in &w.syllables {
        let decider = factors.get(s.factor).ok_or(GroupError::UnknownFactor(s.factor))?;
        let merged = match stack.last() {
            Some(top) if top.factor == s.factor => {
                let word = decider.canonical(&top.word.concat(&s.word))?;
                stack.pop();
                word
            }
            _ => decider.canonical(&s.word)?,
        };
        if !merged.is_empty() {
            stack.push(Syllable { factor: s.factor, word: merged });
        }
    }
    Ok(FreeProductWord { syllables: stack })
}

/// `g_0 a g_1 … a g_n` as a word in `G * Z/2Z`, with `G` factor 0 and `Z/2Z`
/// (generated by `x0`) factor 1.
pub fn star_as_free_product(w: &StarWord) -> FreeProductWord {
    let mut out = Vec::new();
    for (i, piece) in w.pieces.iter().enumerate() {
        if i > 0 {
            out.push((1, Word::gen(0)));
        }
        out.push((0, piece.clone()));
    }
    FreeProductWord::new(out)
}

/// `g_0 a g_1 a … a g_n ↦ g_0 h^-1 g_1 h … h^{(-1)^n} g_n` in `G * H`, with
/// `G` factor 0 and `H` factor 1.
pub fn star_z2_to_star_h(
    w: &StarWord,
    h: &Word,
    h_decider: &dyn FactorDecider,
) -> Result<FreeProductWord, GroupError> {
    if h_decider.is_identity(h)? {
        return Err(GroupError::TrivialElement);
    }
    let mut out = Vec::new();
    for (i, piece) in w.pieces.iter().enumerate() {
        if i > 0 {
            out.push((1, if i % 2 == 1 { h.inverse() } else { h.clone() }));
        }
        out.push((0, piece.clone()));
    }
    Ok(FreeProductWord::new(out))
}
