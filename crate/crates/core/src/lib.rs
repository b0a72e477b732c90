//! Exactly solvable smooth potential step `V = V0 + V1 / z(x)`, where z is
//! the real root of `(z + 2)^2 (z - 1) = 4 exp((x - x0) / sigma)`.
//!
//! The Schrödinger equation for this potential reduces to a general Heun
//! equation whose solutions terminate into two-term combinations of Gauss
//! hypergeometric functions. The crate evaluates the potential, the Heun
//! parameters and solutions, analytic wavefunctions and closed-form
//! transmission, and carries an independent numerical integrator used to
//! cross-check every analytic result.

// `!(a < b)` comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod heun;
pub mod oracle;
pub mod scattering;
pub mod special;

pub use error::{Error, Result};
pub use geometry::PhysicalConfig;

/// Complex scalar used for every special-function value and wavefunction.
pub type ComplexValue = num_complex::Complex64;
