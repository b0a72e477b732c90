//! Clausen's generalized hypergeometric function 3F2, series domain only.

use num_complex::Complex64;

use super::gamma::is_nonpositive_integer;
use super::hyp2f1::{BranchedArgument, SERIES_MAX_TERMS, SERIES_TOL};
use crate::error::{Error, Result};

/// 3F2(a1, a2, a3; b1, b2; y) by its power series. Only |y| < 1 is
/// accepted (any y when an upper parameter is a non-positive integer and
/// the series is a polynomial).
pub fn clausen_3f2(
    upper: [Complex64; 3],
    lower: [Complex64; 2],
    y: impl Into<BranchedArgument>,
) -> Result<Complex64> {
    let y = y.into().value;
    if let Some(b) = lower.iter().find(|b| is_nonpositive_integer(**b, 1e-10)) {
        return Err(Error::ParameterDegeneracy(format!(
            "lower 3F2 parameter {b} is a non-positive integer"
        )));
    }
    let polynomial = upper.iter().any(|a| is_nonpositive_integer(*a, 1e-14));
    if y.norm() >= 1.0 && !polynomial {
        return Err(Error::NonConvergence(format!(
            "3F2 series requested outside the unit disc (|y| = {})",
            y.norm()
        )));
    }
    series_3f2(upper, lower, y)
}

pub(crate) fn series_3f2(
    upper: [Complex64; 3],
    lower: [Complex64; 2],
    y: Complex64,
) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let mut sum = one;
    let mut term = one;
    let mut quiet = 0usize;
    for n in 0..SERIES_MAX_TERMS {
        let nf = n as f64;
        term *= (upper[0] + nf) * (upper[1] + nf) * (upper[2] + nf)
            / ((lower[0] + nf) * (lower[1] + nf) * (nf + 1.0))
            * y;
        sum += term;
        if term.norm() <= SERIES_TOL * sum.norm() {
            quiet += 1;
            if quiet >= 3 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence(format!(
        "3F2 series exceeded {SERIES_MAX_TERMS} terms at y = {y}"
    )))
}
