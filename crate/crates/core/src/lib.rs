//! Finite-model verification engine for generalized Cassels-Tate pairings.

pub mod cochain;
pub mod cohomology;
pub mod ctp;
pub mod error;
pub mod fixture;
pub mod group;
pub mod lattice;
pub mod module;
pub mod report;
pub mod scalar;
pub mod smod;
pub mod theta;

pub use error::{Error, Result};

/// Exact integer type used when machine words overflow.
pub type Exact = num_bigint::BigInt;
/// Smith form over machine words.
pub type WordSmith = lattice::Smith<i64>;
/// Smith form over big integers.
pub type ExactSmith = lattice::Smith<Exact>;
