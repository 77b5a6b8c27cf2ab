//! Bounded, stage-faithful machinery for computably enumerable equivalence
//! relations (ceers) and the word problems of groups built from them.
//!
//! * [`ceer`]: stage-enumerated equivalence relations, reductions, joins,
//!   products and darkness/lightness probes.
//! * [`algebra`]: the free algebra `(Z/pZ)<x, y>`, homogeneous ideals with
//!   per-degree echelon bases, Golod–Shafarevich audits and unit words.
//! * [`groups`]: free-product normal forms, `Z/2Z`-module groups over a ceer
//!   and staged abelian presentations with triangular relations.
//! * [`priority`]: a deterministic finite-injury engine and the four
//!   constructions built on it, with replayable logs and log verifiers.
//! * [`scenario`]: declarative scenario files that fully determine a run.

pub mod algebra;
pub mod ceer;
pub mod groups;
pub mod priority;
pub mod scenario;
