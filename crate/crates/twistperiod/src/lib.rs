//! Rapid-decay twisted homology bases for real hyperplane arrangements
//! with exponential phase twists, regularized twisted cycles, and numerical
//! evaluation of the associated period integrals.
//!
//! The crate is organized in layers:
//!
//! - [`field`]: exact rationals, complex rationals, and the ordered field
//!   ℚ(R) used to realize "for sufficiently large R" symbolically;
//! - [`geometry`]: hyperplanes, sign vectors, exact LP feasibility and
//!   boundedness, slices, and flats;
//! - [`chambers`]: chamber enumeration, bounded/unbounded classification,
//!   closed-form counts, and log-potential critical points;
//! - [`connection`]: twist exponents/residues, flatness and genericity;
//! - [`rdbasis`]: the rapid-decay homology basis for linear and quadratic
//!   phases, with rank cross-checks;
//! - [`regularization`]: compact twisted chains representing chamber cycles;
//! - [`quadrature`]: contour quadrature of multivalued integrands with
//!   continuous branch tracking;
//! - [`validation`]: independent hypergeometric series and Gamma oracles,
//!   classical identity and ODE checks;
//! - [`cli`]: batch job execution, JSON reports, SVG chamber plots;
//! - [`suite`]: the built-in verification battery used by
//!   `twistperiod verify-suite` and the acceptance tests.
//!
//! See the crate examples for runnable entry points into each capability.

pub mod field;
pub mod util;
pub mod geometry;
pub mod chambers;
pub mod connection;
pub mod rdbasis;
pub mod regularization;
pub mod quadrature;
pub mod validation;
pub mod cli;
pub mod suite;

pub use field::{CRat, Rat, Sign};
pub use geometry::{Arrangement, Hyperplane, SignVector};
