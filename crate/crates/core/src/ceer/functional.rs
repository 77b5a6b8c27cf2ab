use serde::{Deserialize, Serialize};

use super::Stage;

/// Read access to the current approximation of an oracle relation.
pub trait OracleView {
    fn holds(&self, a: usize, b: usize) -> bool;
}

impl<F: Fn(usize, usize) -> bool> OracleView for F {
    fn holds(&self, a: usize, b: usize) -> bool {
        self(a, b)
    }
}

/// One halting computation of a stub: from `stage` on, provided every pair
/// in `requires` holds in the oracle, the stub halts with use `use_bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StubComputation {
    pub stage: Stage,
    #[serde(rename = "use")]
    pub use_bound: usize,
    #[serde(default)]
    pub requires: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Halting {
    Diverged,
    Halted { use_bound: usize },
}

/// Stand-in for `φ_m` run with an oracle: an explicit table of halting
/// computations, not an interpreter.
///
/// Evaluation is monotone: more oracle pairs or a later stage never turn a
/// halting computation into a divergent one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalStub {
    pub id: usize,
    pub computations: Vec<StubComputation>,
}

impl FunctionalStub {
    pub fn new(id: usize, computations: Vec<StubComputation>) -> Self {
        Self { id, computations }
    }

    /// Checks that each computation's use bounds the oracle pairs it reads.
    pub fn uses_are_honest(&self) -> bool {
        self.computations
            .iter()
            .all(|c| c.requires.iter().all(|&(a, b)| a < c.use_bound && b < c.use_bound))
    }

    /// The first listed computation that applies at `stage`.
    pub fn evaluate(&self, oracle: &impl OracleView, stage: Stage) -> Halting {
        self.computations
            .iter()
            .find(|c| c.stage <= stage && c.requires.iter().all(|&(a, b)| oracle.holds(a, b)))
            .map_or(Halting::Diverged, |c| Halting::Halted { use_bound: c.use_bound })
    }
}
