//! Numerical laboratory for surrogate-loss calibration analysis.
//!
//! The crate computes, for binary margin-based losses and for multi-class
//! comp-sum and constrained losses:
//!
//! - the estimation-error transformation function `T(t)` by nested
//!   one-dimensional convex optimization ([`transform`]);
//! - the growth rate of `T` near zero, separating smooth losses (quadratic,
//!   i.e. square-root bounds) from polyhedral losses (linear) ([`growth`]);
//! - closed-form bound functions `Gamma` and their validity against sampled
//!   transformation curves ([`gamma`]);
//! - exact minimizability gaps, approximation errors, and pointwise-infimum
//!   differences on finite discrete instances ([`mingap`]);
//! - end-to-end estimation-error bound checks, randomized fuzzing, and
//!   empirical Rademacher-complexity generalization bounds ([`verifier`]).
//!
//! Everything is deterministic: fixed inputs and seeds produce byte-identical
//! outputs.

pub mod catalog;
pub mod error;
pub mod gamma;
pub mod growth;
pub mod instance;
pub mod mingap;
pub mod phi;
pub mod pointwise;
pub mod solve;
pub mod transform;
pub mod verifier;

pub use error::{Error, Result};
pub use phi::{eval_loss, verify_regularity, Family, Phi, SurrogateSpec};
