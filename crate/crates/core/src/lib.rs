//! Connective complex K-theory of the Eilenberg-MacLane space K(Z/p, 2).
//!
//! The crate builds the closed-form ku-cohomology charts, replays the Adams
//! spectral sequence that produces them, and carries the independent oracles
//! used to cross-check both: a brute-force Ext computation over E[Q0, Q1],
//! Margolis homology, free-part Poincaré series, and the k(1) Bockstein audit.
//!
//! Everything here is `no_std` with `alloc`; IO and rendering live in the
//! command-line crate.
#![no_std]
// degree bounds read `|x| + 1 <= top` to match the class degrees
#![allow(clippy::int_plus_one)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod ass;
pub mod audit;
pub mod chart;
pub mod error;
pub mod k1;
pub mod ku;
pub mod linalg;
pub mod margolis;
pub mod monomial;
pub mod padic;
pub mod series;
pub mod snf;

pub use error::{Error, Result};
pub use padic::Prime;
