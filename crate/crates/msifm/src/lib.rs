//! Synthesis of many-sorted transactional datasets from support constraints.
//!
//! Given a schema mixing single-valued attributes (each transaction carries
//! exactly one item) and set-valued ones (each carries an itemset), plus
//!
//! * support ranges per single-valued item,
//! * containment-support ranges over frequent itemsets,
//! * an infrequency cap on every minimal non-frequent itemset,
//! * support ranges over arbitrary many-sorted selections, and
//! * duplicate caps on selected transaction shapes,
//!
//! the solver produces a dataset of a prescribed size satisfying all of
//! them, or reports which conditions fail. The search space of distinct
//! transactions is exponential, so the linear program is never written out
//! in full: a restricted master problem over a small column pool is solved
//! with a bounded-variable revised simplex, and new transaction columns are
//! priced in on demand. Arithmetic is exact rational by default; a float
//! mode trades exactness for speed.
//!
//! Modules follow the pipeline: [`model`] defines the vocabulary,
//! [`border`] computes negative borders, [`simplex`] solves restricted
//! programs, [`master`] lays out rows and columns, [`pricing`] searches for
//! improving transactions, [`driver`] runs the loop (and a brute-force
//! oracle), [`io`]/[`round`]/[`commands`] serve the command line.

pub mod border;
pub mod commands;
pub mod driver;
pub mod io;
pub mod master;
pub mod model;
pub mod pricing;
pub mod round;
pub mod scalar;
pub mod simplex;

pub use scalar::{Count, LpScalar};

/// Exact scalar used by the default arithmetic mode.
pub type Rational = num::BigRational;
/// Multiplicity type of rounded, integer datasets.
pub type Integer = num::BigInt;

/// Relaxed solution counts as produced by the exact solver.
pub type RationalDataset = model::Dataset<Rational>;
/// Final datasets after rounding.
pub type IntegerDataset = model::Dataset<Integer>;
