//! Word problems of the concrete group families: free products, the
//! `Z/2Z`-module group over a ceer, the groups `G_A`, and staged abelian
//! presentations with triangular relation streams.

mod free_product;
mod genset;
mod module_group;
mod presentation;
mod word;

pub use free_product::{
    fp_reduce, star_as_free_product, star_z2_to_star_h, AbelianDecider, CyclicDecider,
    FactorDecider, FreeProductWord, ModuleDecider, Syllable,
};
pub use genset::{finite_genset_translate, AbelianWordProblem, ModuleWordProblem, WordMap};
pub use module_group::{ga_wp, z2_module_wp, CeerModuleGroup};
pub use presentation::{GenStatus, Relation, RelationKind, StagedPresentation};
pub use word::{ExponentVector, Letter, StarWord, Word, WordCodec};

use crate::ceer::CeerError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("relation {relation} breaks triangularity: {reason}")]
    Triangularity { relation: String, reason: String },
    #[error("generator x{0} is not materialized")]
    UnknownGenerator(usize),
    #[error("the element h must be nontrivial")]
    TrivialElement,
    #[error("factor {0} has no decider")]
    UnknownFactor(usize),
    #[error("word code overflows")]
    CodeOverflow,
    #[error("letter code {code} is outside an alphabet of {gens} generators")]
    Alphabet { code: usize, gens: usize },
    #[error(transparent)]
    Ceer(#[from] CeerError),
}
