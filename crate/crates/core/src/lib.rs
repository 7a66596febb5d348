//! Simulation and solvers for the generalised phase kick-back (GPK) technique.
//!
//! * [`gf2`]: bit vectors and subspaces of F₂ʷ.
//! * [`boolfn`]: truth-table oracles, marker classification and generators.
//! * [`gpk`]: the GPK circuit on two independent backends.
//! * [`fbi`]: marker selection algorithms for the image dimension of a fully
//!   balanced function.
//! * [`simon`]: hidden subgroup recovery for generalized Simon functions.
//!
//! Binary strings are written most significant position first; position 0 is
//! the rightmost character.

pub mod boolfn;
pub mod error;
pub mod fbi;
pub mod gf2;
pub mod gpk;
pub mod simon;
pub mod walsh;

pub use boolfn::{BooleanOracle, MarkerClass};
pub use error::{GpkError, Result};
pub use gf2::{BitVector, SubspaceBasis};
pub use gpk::{Backend, GpkDistribution, GpkEngine};
