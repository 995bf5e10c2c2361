//! Robust certificates for predictions made from a hypothesis class.
//!
//! A *b-robust certificate* for a labeled test point `(x, y)` is a subsequence of the
//! training data that is explainable by some hypothesis with at most `b` mistakes, and on
//! which every hypothesis with at most `b` mistakes predicts `y` at `x`. This crate
//! extracts such certificates, checks them, computes the hollow-star quantities that bound
//! their size, and runs the sampling experiments that relate certificate size to sample
//! complexity.
//!
//! The linear-programming engine in [`conic`] is generic over the scalar type (see
//! [`Scalar`]); the aliases at the crate root fix it to `f64`, which is what the rest of the
//! crate uses.

pub mod adversary;
pub mod certify;
pub mod conic;
pub mod domain;
pub mod error;
pub mod hypoclasses;
pub mod oracles;
pub mod sampling;
pub mod scalar;
pub mod stars;

pub use domain::{Certificate, Dataset, Label, LabeledExample, Point, WeightedExample};
pub use error::{CertError, Result};
pub use hypoclasses::{Hypothesis, HypothesisFamily};
pub use oracles::{Oracle, OracleConfig};
pub use scalar::Scalar;
pub use stars::HollowStar;

/// Conic membership instance over `f64`.
pub type ConicInstance = conic::ConicInstance<f64>;
/// Conic membership result over `f64`.
pub type ConicSolution = conic::ConicSolution<f64>;
/// Halfspace consistency result over `f64`.
pub type Consistency = conic::Consistency<f64>;
/// LP engine settings over `f64`.
pub type LpSettings = conic::LpSettings<f64>;

/// Single-precision variants of the LP engine types.
pub type ConicInstance32 = conic::ConicInstance<f32>;
pub type ConicSolution32 = conic::ConicSolution<f32>;
