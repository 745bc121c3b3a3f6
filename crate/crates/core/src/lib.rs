//! Proof kernel and explanation analyzer.
//!
//! The crate is organized around a small statement language of integer
//! terms with bounded sums ([`lang`]), a trusted natural-deduction checker
//! with a rewrite engine for sum algebra ([`kernel`]), a library of
//! pre-built generic proofs ([`library`]), digit-level arithmetic trace
//! generators ([`numeral`]), univariate Diophantine non-solvability
//! provers ([`dioph`]), and the explanation analysis layer ([`explain`]):
//! universal-cut detection, (program, input) explanation objects with
//! size/run-cost metrics, and the three-category proof classifier.
//!
//! All arithmetic is exact: integers are arbitrary precision and the few
//! places that divide (explanation ratios, the centroid demo) use exact
//! rationals.

pub mod dioph;
pub mod explain;
pub mod kernel;
pub mod lang;
pub mod library;
pub mod numeral;

/// Arbitrary-precision signed integer used as the semantic domain of the
/// statement language.
pub type Int = num_bigint::BigInt;
/// Arbitrary-precision natural number used by the digit/trace machinery.
pub type Nat = num_bigint::BigUint;
/// Exact rational, used for explanation ratios and the centroid demo.
pub type Ratio = num_rational::BigRational;

pub use kernel::{check, CheckReport, Proof};
pub use lang::{Formula, Term};
