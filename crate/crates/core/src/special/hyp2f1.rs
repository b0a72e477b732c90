//! Gauss hypergeometric function 2F1(a, b; c; y) for complex parameters.
//!
//! Inside |y| <= 1/2 the power series is summed directly. Elsewhere one of
//! the five linear fractional transformations that map y to 1-y, 1/y,
//! y/(y-1), 1/(1-y) or 1-1/y is chosen so that the transformed argument has
//! the smallest modulus. Near exp(+-i pi/3), where no transformation gets
//! below 0.8, the hypergeometric ODE is integrated by Taylor re-expansion
//! from |y| = 1/2 instead.
//!
//! On the cut [1, inf) the value is the limit from the side recorded in the
//! [`BranchedArgument`]. Differences c-a-b or a-b that are within 1e-8 of an
//! integer would make the connection coefficients singular; in that case `b`
//! is nudged by 1e-9(1+i), which costs roughly seven significant digits.

use num_complex::Complex64;

use super::continuation::PolynomialOde;
use super::gamma::{gamma, is_nonpositive_integer, rgamma};
use crate::error::{Error, Result};

pub(crate) const SERIES_TOL: f64 = 1e-16;
pub(crate) const SERIES_MAX_TERMS: usize = 20_000;
const C_POLE_TOL: f64 = 1e-10;
const DEGENERACY_TOL: f64 = 1e-8;
const NUDGE: f64 = 1e-9;
const DIRECT_RADIUS: f64 = 0.5;
const CONTINUATION_THRESHOLD: f64 = 0.8;
const GROWTH_LIMIT: f64 = 16.0;

/// Which side of the branch cut [1, inf) a real argument is approached from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutSide {
    /// y + i0
    #[default]
    Above,
    /// y - i0
    Below,
}

impl CutSide {
    /// Argument assigned to a negative real number `-|v|` obtained as
    /// `1 - y` or `-y` from a real `y` on this side of the cut.
    fn negated_arg(self) -> f64 {
        match self {
            CutSide::Above => -std::f64::consts::PI,
            CutSide::Below => std::f64::consts::PI,
        }
    }
}

/// A hypergeometric argument plus the side of the cut it is taken on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchedArgument {
    pub value: Complex64,
    pub cut_side: CutSide,
}

impl BranchedArgument {
    pub fn new(value: Complex64, cut_side: CutSide) -> Self {
        Self { value, cut_side }
    }

    pub fn above(value: impl Into<Complex64>) -> Self {
        Self::new(value.into(), CutSide::Above)
    }

    pub fn below(value: impl Into<Complex64>) -> Self {
        Self::new(value.into(), CutSide::Below)
    }

    /// Whether the value sits on [1, inf), where `cut_side` matters.
    pub fn on_cut(&self) -> bool {
        self.value.im == 0.0 && self.value.re > 1.0
    }

    /// log(1 - y) continued from the recorded side.
    fn ln_one_minus(&self) -> Complex64 {
        let v = Complex64::new(1.0, 0.0) - self.value;
        if self.value.im == 0.0 && v.re < 0.0 {
            Complex64::new((-v.re).ln(), self.cut_side.negated_arg())
        } else {
            v.ln()
        }
    }

    /// log(-y) continued from the recorded side.
    fn ln_neg(&self) -> Complex64 {
        let v = -self.value;
        if self.value.im == 0.0 && v.re < 0.0 {
            Complex64::new((-v.re).ln(), self.cut_side.negated_arg())
        } else {
            v.ln()
        }
    }
}

impl From<Complex64> for BranchedArgument {
    fn from(value: Complex64) -> Self {
        Self::above(value)
    }
}

impl From<f64> for BranchedArgument {
    fn from(value: f64) -> Self {
        Self::above(Complex64::new(value, 0.0))
    }
}

/// Evaluation strategies for 2F1. [`gauss_2f1`] picks one automatically;
/// [`gauss_2f1_via`] forces one, which is how the transformation formulas
/// are checked against each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Direct,
    /// y -> 1 - y
    OneMinus,
    /// y -> 1 / y
    Inverse,
    /// y -> y / (y - 1)
    Pfaff,
    /// y -> 1 / (1 - y)
    InverseOneMinus,
    /// y -> 1 - 1 / y
    OneMinusInverse,
    /// Taylor re-expansion of the ODE from |y| = 1/2.
    Continuation,
}

impl Route {
    fn transformed_modulus(self, y: Complex64) -> f64 {
        let one = Complex64::new(1.0, 0.0);
        match self {
            Route::Direct => y.norm(),
            Route::OneMinus => (one - y).norm(),
            Route::Inverse => 1.0 / y.norm(),
            Route::Pfaff => y.norm() / (y - one).norm(),
            Route::InverseOneMinus => 1.0 / (one - y).norm(),
            Route::OneMinusInverse => (one - one / y).norm(),
            Route::Continuation => f64::INFINITY,
        }
    }
}

/// The route [`gauss_2f1`] uses for argument `y`.
pub fn select_route(y: Complex64) -> Route {
    if y.norm() <= DIRECT_RADIUS {
        return Route::Direct;
    }
    let candidates = [
        Route::OneMinus,
        Route::Pfaff,
        Route::OneMinusInverse,
        Route::Inverse,
        Route::InverseOneMinus,
    ];
    let (best, modulus) = candidates
        .iter()
        .map(|&r| (r, r.transformed_modulus(y)))
        .fold((Route::Direct, y.norm()), |acc, cand| {
            if cand.1 < acc.1 {
                cand
            } else {
                acc
            }
        });
    if modulus > CONTINUATION_THRESHOLD {
        Route::Continuation
    } else {
        best
    }
}

/// Plain power series with term-ratio recurrence.
pub(crate) fn series_2f1(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    y: Complex64,
) -> Result<Complex64> {
    series_with_growth(a, b, c, y).map(|(sum, _)| sum)
}

/// Series value together with `max |term| / |sum|`, the factor by which
/// rounding errors are amplified.
fn series_with_growth(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    y: Complex64,
) -> Result<(Complex64, f64)> {
    let one = Complex64::new(1.0, 0.0);
    let mut largest = 1.0_f64;
    let mut sum = one;
    let mut term = one;
    let mut quiet = 0usize;
    for n in 0..SERIES_MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * y;
        sum += term;
        largest = largest.max(term.norm());
        if term.norm() <= SERIES_TOL * sum.norm() {
            quiet += 1;
            if quiet >= 3 {
                return Ok((sum, largest / sum.norm().max(f64::MIN_POSITIVE)));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence(format!(
        "2F1({a}, {b}; {c}; {y}) series exceeded {SERIES_MAX_TERMS} terms"
    )))
}

fn terminates(a: Complex64, b: Complex64) -> bool {
    is_nonpositive_integer(a, 1e-14) || is_nonpositive_integer(b, 1e-14)
}

fn direct(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    y: Complex64,
    strict: bool,
) -> Result<Complex64> {
    if y.norm() >= 1.0 && !terminates(a, b) {
        return Err(Error::NonConvergence(format!(
            "direct 2F1 series requested at |y| = {} >= 1",
            y.norm()
        )));
    }
    let (sum, growth) = series_with_growth(a, b, c, y)?;
    if strict && growth > GROWTH_LIMIT {
        return Err(Error::NonConvergence(format!(
            "2F1 series cancels by a factor {growth:e}"
        )));
    }
    Ok(sum)
}

fn near_integer(z: Complex64) -> bool {
    (z.re - z.re.round()).abs() < DEGENERACY_TOL && z.im.abs() < DEGENERACY_TOL
}

fn nudged(b: Complex64) -> Complex64 {
    b + Complex64::new(NUDGE, NUDGE)
}

/// Gauss hypergeometric function with automatic route selection. When the
/// selected series would lose more than three digits to cancellation
/// (large parameters), the value is obtained by continuation instead.
pub fn gauss_2f1(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    y: impl Into<BranchedArgument>,
) -> Result<Complex64> {
    let y = y.into();
    match evaluate(a, b, c, y, select_route(y.value), true) {
        Err(Error::NonConvergence(_)) => evaluate(a, b, c, y, Route::Continuation, false),
        other => other,
    }
}

/// Gauss hypergeometric function along a caller-chosen route. Routes whose
/// transformed argument lies outside the unit disc report `NonConvergence`.
pub fn gauss_2f1_via(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    y: impl Into<BranchedArgument>,
    route: Route,
) -> Result<Complex64> {
    evaluate(a, b, c, y.into(), route, false)
}

fn evaluate(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    y: BranchedArgument,
    route: Route,
    strict: bool,
) -> Result<Complex64> {
    // fixed parameter order makes the result exactly symmetric in (a, b)
    let (a, b) = if (b.re, b.im) < (a.re, a.im) {
        (b, a)
    } else {
        (a, b)
    };
    if is_nonpositive_integer(c, C_POLE_TOL) {
        return Err(Error::ParameterDegeneracy(format!(
            "c = {c} is a non-positive integer"
        )));
    }
    let z = y.value;
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if terminates(a, b) {
        return series_2f1(a, b, c, z);
    }
    if z == Complex64::new(1.0, 0.0) {
        return gauss_sum(a, b, c);
    }
    match route {
        Route::Direct => direct(a, b, c, z, strict),
        Route::Pfaff => pfaff(a, b, c, y, strict),
        Route::OneMinus | Route::OneMinusInverse => {
            let b = if near_integer(c - a - b) {
                nudged(b)
            } else {
                b
            };
            if route == Route::OneMinus {
                one_minus(a, b, c, y, strict)
            } else {
                one_minus_inverse(a, b, c, y, strict)
            }
        }
        Route::Inverse | Route::InverseOneMinus => {
            let b = if near_integer(a - b) { nudged(b) } else { b };
            if route == Route::Inverse {
                inverse(a, b, c, y, strict)
            } else {
                inverse_one_minus(a, b, c, y, strict)
            }
        }
        Route::Continuation => continuation(a, b, c, y),
    }
}

/// `t1 + t2`, refused in strict mode when the two connection terms cancel.
fn combine(t1: Complex64, t2: Complex64, strict: bool) -> Result<Complex64> {
    let sum = t1 + t2;
    if strict && t1.norm().max(t2.norm()) > GROWTH_LIMIT * sum.norm() {
        return Err(Error::NonConvergence("connection terms cancel".into()));
    }
    Ok(sum)
}

/// Gauss summation at y = 1, valid for Re(c - a - b) > 0.
fn gauss_sum(a: Complex64, b: Complex64, c: Complex64) -> Result<Complex64> {
    let s = c - a - b;
    if s.re <= 0.0 {
        return Err(Error::NonConvergence(format!(
            "2F1 at y = 1 diverges for Re(c - a - b) = {} <= 0",
            s.re
        )));
    }
    Ok(gamma(c)? * gamma(s)? * rgamma(c - a) * rgamma(c - b))
}

fn pfaff(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    y: BranchedArgument,
    strict: bool,
) -> Result<Complex64> {
    let z = y.value;
    let w = z / (z - 1.0);
    let pre = (-a * y.ln_one_minus()).exp();
    Ok(pre * direct(a, c - b, c, w, strict)?)
}

fn one_minus(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    y: BranchedArgument,
    strict: bool,
) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let w = one - y.value;
    let s = c - a - b;
    let gc = gamma(c)?;
    let t1 = gc * gamma(s)? * rgamma(c - a) * rgamma(c - b) * direct(a, b, one - s, w, strict)?;
    let t2 = gc
        * gamma(-s)?
        * rgamma(a)
        * rgamma(b)
        * (s * y.ln_one_minus()).exp()
        * direct(c - a, c - b, one + s, w, strict)?;
    combine(t1, t2, strict)
}

fn one_minus_inverse(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    y: BranchedArgument,
    strict: bool,
) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let z = y.value;
    let w = one - one / z;
    let s = c - a - b;
    let ln_y = z.ln();
    let gc = gamma(c)?;
    let t1 = gc
        * gamma(s)?
        * rgamma(c - a)
        * rgamma(c - b)
        * (-a * ln_y).exp()
        * direct(a, a - c + 1.0, one - s, w, strict)?;
    let t2 = gc
        * gamma(-s)?
        * rgamma(a)
        * rgamma(b)
        * (s * y.ln_one_minus() + (a - c) * ln_y).exp()
        * direct(c - a, one - a, one + s, w, strict)?;
    combine(t1, t2, strict)
}

fn inverse(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    y: BranchedArgument,
    strict: bool,
) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let w = one / y.value;
    let ln_neg = y.ln_neg();
    let gc = gamma(c)?;
    let t1 = gc
        * gamma(b - a)?
        * rgamma(b)
        * rgamma(c - a)
        * (-a * ln_neg).exp()
        * direct(a, a - c + 1.0, a - b + 1.0, w, strict)?;
    let t2 = gc
        * gamma(a - b)?
        * rgamma(a)
        * rgamma(c - b)
        * (-b * ln_neg).exp()
        * direct(b, b - c + 1.0, b - a + 1.0, w, strict)?;
    combine(t1, t2, strict)
}

fn inverse_one_minus(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    y: BranchedArgument,
    strict: bool,
) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let w = one / (one - y.value);
    let ln_om = y.ln_one_minus();
    let gc = gamma(c)?;
    let t1 = gc
        * gamma(b - a)?
        * rgamma(b)
        * rgamma(c - a)
        * (-a * ln_om).exp()
        * direct(a, c - b, a - b + 1.0, w, strict)?;
    let t2 = gc
        * gamma(a - b)?
        * rgamma(a)
        * rgamma(c - b)
        * (-b * ln_om).exp()
        * direct(b, c - a, b - a + 1.0, w, strict)?;
    combine(t1, t2, strict)
}

/// Integrates y(1-y)w'' + (c - (a+b+1)y)w' - ab w = 0 outward from a
/// point near the origin where the series is well conditioned. Off the cut
/// the path is the ray through y; on the cut it passes around y = 1 on the
/// requested side. Steps are capped at the inverse parameter size.
fn continuation(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    y: BranchedArgument,
) -> Result<Complex64> {
    let z = y.value;
    let scale = a.norm().max(b.norm()).max(c.norm()).max(1.0);
    let radius = DIRECT_RADIUS.min(1.0 / scale).min(0.5 * z.norm());
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut path = Vec::new();
    if y.on_cut() {
        path.push(Complex64::new(radius, 0.0));
        let turn = match y.cut_side {
            CutSide::Above => 1.0,
            CutSide::Below => -1.0,
        };
        let r = 0.5_f64.min(0.5 * (z.re - 1.0)).max(0.0);
        let r = if r > 0.0 { r } else { 0.5 };
        path.push(Complex64::new(1.0 - r, 0.0));
        for k in 1..=8 {
            let theta = std::f64::consts::PI * (1.0 - k as f64 / 8.0);
            path.push(one + r * Complex64::new(theta.cos(), turn * theta.sin()));
        }
        path.push(z);
    } else {
        path.push(z * (radius / z.norm()));
        path.push(z);
    }
    let start = path[0];
    let w0 = series_2f1(a, b, c, start)?;
    let w1 = a * b / c * series_2f1(a + 1.0, b + 1.0, c + 1.0, start)?;
    let ode = PolynomialOde::new(
        vec![vec![-a * b], vec![c, -(a + b + 1.0)], vec![zero, one, -one]],
        vec![zero, one],
    )
    .with_max_step(1.0 / scale);
    let out = ode.continue_along(&path, vec![w0, w1])?;
    Ok(out[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(x: f64) -> Complex64 {
        c(x, 0.0)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn trivial_values() {
        let v = gauss_2f1(c(0.3, 0.1), c(2.0, -1.0), c(1.5, 0.2), 0.0).unwrap();
        assert_eq!(v, r(1.0));
        let v = gauss_2f1(r(1.0), r(1.0), r(2.0), 0.5).unwrap();
        assert!(rel(v, r(2.0 * 2.0_f64.ln())) < 1e-14);
        let v = gauss_2f1(r(1.0), r(1.0), r(3.0), 1.0).unwrap();
        assert!(rel(v, r(2.0)) < 1e-13);
    }

    #[test]
    fn nonpositive_c_is_rejected() {
        let err = gauss_2f1(r(0.5), r(0.5), r(-2.0), 0.3).unwrap_err();
        assert!(matches!(err, Error::ParameterDegeneracy(_)));
    }

    #[test]
    fn terminating_series_is_a_polynomial_everywhere() {
        // 2F1(-2, b; c; y) = 1 - 2by/c + b(b+1)y^2/(c(c+1))
        let (b, cc, y) = (c(0.7, 0.2), c(1.3, -0.4), r(5.0));
        let expected = 1.0 - 2.0 * b * y / cc + b * (b + 1.0) * y * y / (cc * (cc + 1.0));
        let v = gauss_2f1(r(-2.0), b, cc, y).unwrap();
        assert!(rel(v, expected) < 1e-14);
    }

    #[test]
    fn route_selection_on_real_axis_never_needs_continuation() {
        for i in 0..2000 {
            let y = -50.0 + 0.05 * i as f64;
            assert_ne!(select_route(r(y)), Route::Continuation, "y = {y}");
        }
        assert_eq!(select_route(c(0.5, 0.866)), Route::Continuation);
        assert_eq!(select_route(r(0.3)), Route::Direct);
        assert_eq!(select_route(r(1.2)), Route::OneMinusInverse);
        assert_eq!(select_route(c(0.8, 0.1)), Route::OneMinus);
        assert_eq!(select_route(r(1.8)), Route::OneMinusInverse);
        assert_eq!(select_route(r(-0.9)), Route::Pfaff);
        assert_eq!(select_route(r(-40.0)), Route::InverseOneMinus);
        assert_eq!(select_route(c(3.0, 30.0)), Route::Inverse);
    }

    #[test]
    fn divergent_forced_route_reports_nonconvergence() {
        let err = gauss_2f1_via(c(0.3, 0.2), c(-0.7, 1.1), c(1.4, -0.5), 0.3, Route::Inverse)
            .unwrap_err();
        assert!(matches!(err, Error::NonConvergence(_)));
    }

    #[test]
    fn degenerate_difference_is_nudged() {
        // c - a - b = 1 exactly: 2F1(1/2, 1/2; 2; y), checked against the
        // direct series inside the disc and the elliptic-integral value at y -> 1 side.
        let (a, b, cc) = (r(0.5), r(0.5), r(2.0));
        let y = r(0.7);
        let direct = gauss_2f1_via(a, b, cc, y, Route::Direct).unwrap();
        let via = gauss_2f1_via(a, b, cc, y, Route::OneMinus).unwrap();
        assert!(rel(via, direct) < 1e-6, "{via} vs {direct}");
    }
}
