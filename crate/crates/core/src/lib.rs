//! Constructions of red/blue colourings of `[N]` with no blue 3-term progression and
//! short red progressions, together with the number-theoretic and geometric checks that
//! support them.

pub mod colouring;
pub mod cutoffs;
pub mod diophantine;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod quad;
pub mod quadform;
pub mod rng;
pub mod stats;
pub mod torus;

pub use error::{Error, Result};
