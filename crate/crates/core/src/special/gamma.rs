//! Complex gamma function.
//!
//! Lanczos approximation with g = 7 and nine coefficients on the right half
//! plane, reflection formula on the left. The logarithmic variant is used
//! wherever products of gamma values can over- or underflow.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const POLE_TOL: f64 = 1e-12;

/// Returns the non-positive integer `z` lies on, if it is within the pole tolerance.
fn nearest_pole(z: Complex64, tol: f64) -> Option<f64> {
    let n = z.re.round();
    if n <= 0.0 && (z.re - n).abs() < tol && z.im.abs() < tol {
        Some(n)
    } else {
        None
    }
}

/// True when `z` is within `tol` of 0, -1, -2, ...
pub fn is_nonpositive_integer(z: Complex64, tol: f64) -> bool {
    nearest_pole(z, tol).is_some()
}

fn lanczos_sum(zm1: Complex64) -> Complex64 {
    LANCZOS_COEFFS[1..]
        .iter()
        .enumerate()
        .fold(Complex64::new(LANCZOS_COEFFS[0], 0.0), |acc, (i, &p)| {
            acc + p / (zm1 + (i + 1) as f64)
        })
}

/// Euler gamma function of a complex argument.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if nearest_pole(z, POLE_TOL).is_some() {
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    Ok(gamma_unchecked(z))
}

fn gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        PI / (sin_pi(z) * gamma_unchecked(Complex64::new(1.0, 0.0) - z))
    } else {
        let zm1 = z - 1.0;
        let t = zm1 + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * ((zm1 + 0.5) * t.ln() - t).exp() * lanczos_sum(zm1)
    }
}

/// Reciprocal gamma function; entire, so it returns zero at the poles of gamma.
pub fn rgamma(z: Complex64) -> Complex64 {
    if nearest_pole(z, POLE_TOL).is_some() {
        Complex64::new(0.0, 0.0)
    } else {
        1.0 / gamma_unchecked(z)
    }
}

/// A logarithm of gamma(z). The imaginary part is not reduced to a fixed
/// branch; only `exp(ln_gamma(z)) == gamma(z)` is guaranteed.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if nearest_pole(z, POLE_TOL).is_some() {
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    Ok(ln_gamma_unchecked(z))
}

fn ln_gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        Complex64::new(PI.ln(), 0.0)
            - ln_sin_pi(z)
            - ln_gamma_unchecked(Complex64::new(1.0, 0.0) - z)
    } else {
        let zm1 = z - 1.0;
        let t = zm1 + LANCZOS_G + 0.5;
        0.5 * (2.0 * PI).ln() + (zm1 + 0.5) * t.ln() - t + lanczos_sum(zm1).ln()
    }
}

/// log sin(pi z) without overflow for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    let ln_2i = Complex64::new(2.0_f64.ln(), PI / 2.0);
    let ln_minus_2i = Complex64::new(2.0_f64.ln(), -PI / 2.0);
    if z.im > 0.0 {
        -i * PI * z + (1.0 - (2.0 * i * PI * z).exp()).ln() - ln_minus_2i
    } else if z.im < 0.0 {
        i * PI * z + (1.0 - (-2.0 * i * PI * z).exp()).ln() - ln_2i
    } else {
        sin_pi(z).ln()
    }
}

/// sin(pi z) with the integer part of Re z removed first, so it keeps full
/// relative accuracy next to the zeros.
fn sin_pi(z: Complex64) -> Complex64 {
    let n = z.re.round();
    let f = Complex64::new(z.re - n, z.im);
    let s = (PI * f).sin();
    if n.rem_euclid(2.0) == 0.0 {
        s
    } else {
        -s
    }
}
