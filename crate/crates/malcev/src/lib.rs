//! A workbench for computing with finite algebras: operation tables, clone and
//! polynomial-clone slices, congruences, higher commutators and nilpotence,
//! conjunct-atomic-definable relations, and finite-relatedness scans.
//!
//! Elements of an algebra of size `s` are the integers `0..s` (stored as `u8`,
//! so `s <= 255`). Operations are total functions given by flat value tables
//! indexed in mixed-radix tuple order, with the first argument least
//! significant. Tuples over the base set (rows of a subpower, graphs of
//! finitary functions) use the same encoding throughout, see [`TupleCode`].
//!
//! The modules build on each other roughly bottom-up:
//!
//! * [`algebra`]: operation tables, algebras, loading from JSON
//! * [`relation`]: bitsets, finitary relations, partial functions
//! * [`partition`]: partitions of the base set, congruence generation
//! * [`closure`]: generation of subuniverses of powers (the shared engine)
//! * [`clone`]: term/polynomial clone slices, Mal'cev terms, commutator
//!   witnesses, sum-of-commutators decomposition
//! * [`commutator`]: higher commutators, lower central series, nilpotence
//!   and supernilpotence classification
//! * [`duality`]: conjunct-atomic-definable domains, preservation tests,
//!   finite-relatedness scans over partial functions
//! * [`z4`]: the mod-4 family with doubled products, its normal forms and
//!   a full duality verifier for it
//! * [`witness`]: window elements over a subpower, commutator-driven ghost
//!   elements and the parity functional separating them
//! * [`report`]: deterministic plain-text reports for the CLI

pub mod algebra;
pub mod clone;
pub mod closure;
pub mod commutator;
pub mod duality;
pub mod partition;
pub mod relation;
pub mod report;
pub mod samples;
pub mod witness;
pub mod z4;

pub use algebra::{load_algebra, load_algebra_str, AlgebraError, FiniteAlgebra, FunctionTable, Operation, TupleCode};
pub use relation::{Bitset, PartialFunction, RelationSet};

/// Crate version string embedded in reports so that archived outputs can be
/// traced back to the code that produced them.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
