//! Trace invariants of pairs of matrices, the relations among them on the
//! Calogero-Moser space and the commuting variety of 3x3 matrices, and
//! constructive orbit algorithms for the affine Cremona group action.
//!
//! Identity checks run in exact rational arithmetic; orbit algorithms run
//! over the complex numbers with an explicit [`TolerancePolicy`].

pub mod cremona;
pub mod error;
pub mod exec;
pub mod invariants;
pub mod json;
pub mod matrix;
pub mod orbits;
pub mod relations;
pub mod sampler;
pub mod scalar;

pub use cremona::{act_matrices, act_tuple, act_tuple_word, GroupWord, Move};
pub use error::{Error, Result};
pub use exec::Execution;
pub use invariants::{invariant_tuple, traceless_pair, InvariantTuple, ReducedTuple};
pub use matrix::{Matrix, Vector};
pub use orbits::{classify_d30, normalize_d3, NormalizationResult, OrbitLabel};
pub use relations::{classify_stratum, Stratum};
pub use scalar::{Complex, Domain, Rational, Scalar, TolerancePolicy};
