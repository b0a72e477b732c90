//! Heun reduction of the step-potential Schrödinger equation and its
//! terminating hypergeometric solutions.
//!
//! With `psi = (z + 2)^alpha1 (z - 1)^alpha2 u(z)` the Schrödinger equation
//! becomes the general Heun equation
//!
//! ```text
//! u'' + (gamma/(z+2) + delta/(z-1) + eps/z) u' + (ab z - q) u / ((z+2)(z-1)z) = 0
//! ```
//!
//! with singularities at -2, 1, 0 and `eps = -1`. The substitution
//! `z = 3y - 2` gives the canonical form with singularities 0, 1, a = 2/3
//! and accessory parameter `q0 = (q + 2 ab) / 3`. Expanding `u` in
//! `2F1(alpha, beta; gamma - n; y)` yields a three-term recurrence which
//! terminates after two terms because `eps = -1` and `q` satisfies
//! `q^2 + q(1 + gamma - 2 delta) - 2 ab = 0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::PhysicalConfig;
use crate::special::continuation::PolynomialOde;
use crate::special::{gauss_2f1, series_3f2, BranchedArgument, CutSide};

const COEFFICIENT_TOL: f64 = 1e-12;
const GAMMA_INTEGER_TOL: f64 = 1e-10;
const TERMINATION_TOL: f64 = 1e-10;

/// Branch choice for the pre-factor exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Parameters of the Heun equation with singularities at -2, 1, 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeunParameters {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub delta: Complex64,
    pub epsilon: Complex64,
    /// The product alpha * beta as given by the reduction; kept separately
    /// so it does not pick up rounding from the quadratic root split.
    pub alpha_beta: Complex64,
    /// Accessory parameter.
    pub q: Complex64,
    pub alpha1: Complex64,
    pub alpha2: Complex64,
    pub sign1: Sign,
    pub sign2: Sign,
}

/// Splits `alpha + beta = sum`, `alpha beta = product` into the two roots,
/// ordered by real part, then imaginary part.
pub fn split_exponents(sum: Complex64, product: Complex64) -> (Complex64, Complex64) {
    let disc = (sum * sum - 4.0 * product).sqrt();
    // pick the larger-modulus root from the stable formula, then divide
    let big = if (sum + disc).norm() >= (sum - disc).norm() {
        0.5 * (sum + disc)
    } else {
        0.5 * (sum - disc)
    };
    let small = if big.norm() > 0.0 {
        product / big
    } else {
        Complex64::new(0.0, 0.0)
    };
    if (big.re, big.im) <= (small.re, small.im) {
        (big, small)
    } else {
        (small, big)
    }
}

impl HeunParameters {
    /// Parameters from the exponents (gamma, delta, epsilon), the product
    /// alpha*beta and the accessory parameter; alpha and beta follow from
    /// the Fuchsian condition `1 + alpha + beta = gamma + delta + epsilon`.
    pub fn from_exponents(
        gamma: Complex64,
        delta: Complex64,
        epsilon: Complex64,
        alpha_beta: Complex64,
        q: Complex64,
    ) -> Self {
        let (alpha, beta) = split_exponents(gamma + delta + epsilon - 1.0, alpha_beta);
        Self {
            alpha,
            beta,
            gamma,
            delta,
            epsilon,
            alpha_beta,
            q,
            alpha1: 0.5 * (gamma - 1.0),
            alpha2: 0.5 * (delta - 1.0),
            sign1: Sign::Plus,
            sign2: Sign::Plus,
        }
    }

    /// `|1 + alpha + beta - gamma - delta - epsilon|`.
    pub fn fuchs_residual(&self) -> f64 {
        (1.0 + self.alpha + self.beta - self.gamma - self.delta - self.epsilon).norm()
    }

    /// Same parameters with a different accessory parameter.
    pub fn with_q(self, q: Complex64) -> Self {
        Self { q, ..self }
    }
}

/// Heun parameters for energy `energy`.
///
/// `alpha1 = +-2 i sigma sqrt(2m/hbar^2 (E - V0 + V1/2))`,
/// `alpha2 = +-i sigma sqrt(2m/hbar^2 (E - V0 - V1))`, `gamma = 1 + 2 alpha1`,
/// `delta = 1 + 2 alpha2`, `eps = -1`,
/// `ab = (alpha1 + alpha2)^2 + 18 m sigma^2 (E - V0) / hbar^2`,
/// `q = -alpha1 + 2 alpha2`. Complex square roots cover energies below the
/// thresholds.
pub fn build_heun_parameters(
    cfg: &PhysicalConfig,
    energy: f64,
    sign1: Sign,
    sign2: Sign,
) -> HeunParameters {
    let i = Complex64::i();
    let scale = cfg.kinetic_scale();
    let kh = Complex64::new(scale * (energy - cfg.v0 + 0.5 * cfg.v1), 0.0).sqrt();
    let k2 = Complex64::new(scale * (energy - cfg.v0 - cfg.v1), 0.0).sqrt();
    let alpha1 = sign1.factor() * 2.0 * i * cfg.sigma * kh;
    let alpha2 = sign2.factor() * i * cfg.sigma * k2;
    let gamma = 1.0 + 2.0 * alpha1;
    let delta = 1.0 + 2.0 * alpha2;
    let epsilon = Complex64::new(-1.0, 0.0);
    let alpha_beta = (alpha1 + alpha2).powi(2)
        + 18.0 * cfg.mass * cfg.sigma * cfg.sigma * (energy - cfg.v0) / (cfg.hbar * cfg.hbar);
    let q = -alpha1 + 2.0 * alpha2;
    let (alpha, beta) = split_exponents(gamma + delta + epsilon - 1.0, alpha_beta);
    HeunParameters {
        alpha,
        beta,
        gamma,
        delta,
        epsilon,
        alpha_beta,
        q,
        alpha1,
        alpha2,
        sign1,
        sign2,
    }
}

/// `q^2 + q(1 + gamma - 2 delta) - 2 ab`; zero exactly when the
/// hypergeometric expansion terminates after two terms.
pub fn termination_residual(p: &HeunParameters) -> Complex64 {
    p.q * p.q + p.q * (1.0 + p.gamma - 2.0 * p.delta) - 2.0 * p.alpha_beta
}

/// Heun equation in canonical form: singularities 0, 1, `a`, accessory
/// parameter `q0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalHeun {
    pub a: Complex64,
    pub q0: Complex64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub delta: Complex64,
    pub epsilon: Complex64,
    pub alpha_beta: Complex64,
}

/// Rewrites the equation under `z = 3y - 2`: `a = 2/3`, `q0 = (q + 2ab)/3`.
pub fn canonical_map(p: &HeunParameters) -> CanonicalHeun {
    CanonicalHeun {
        a: Complex64::new(2.0 / 3.0, 0.0),
        q0: (p.q + 2.0 * p.alpha_beta) / 3.0,
        alpha: p.alpha,
        beta: p.beta,
        gamma: p.gamma,
        delta: p.delta,
        epsilon: p.epsilon,
        alpha_beta: p.alpha_beta,
    }
}

impl CanonicalHeun {
    /// Accessory parameter of the (-2, 1, 0) form, `3 q0 - 2 ab`. Only
    /// meaningful for `a = 2/3`.
    pub fn physical_accessory(&self) -> Complex64 {
        3.0 * self.q0 - 2.0 * self.alpha_beta
    }

    pub fn with_q0(self, q0: Complex64) -> Self {
        Self { q0, ..self }
    }

    /// Left side of the quadratic for `q0` that makes the expansion stop
    /// after two terms when `eps = -1`:
    /// `q0^2 + q0(gamma - 1 - a(alpha + beta) - 2a ab) + a ab (a(1 + alpha + beta) - gamma + a ab)`.
    pub fn termination_residual(&self) -> Complex64 {
        let (a, ab) = (self.a, self.alpha_beta);
        let s = self.alpha + self.beta;
        self.q0 * self.q0
            + self.q0 * (self.gamma - 1.0 - a * s - 2.0 * a * ab)
            + a * ab * (a * (1.0 + s) - self.gamma + a * ab)
    }

    /// Both roots of the termination quadratic.
    pub fn terminating_accessories(&self) -> [Complex64; 2] {
        let (a, ab) = (self.a, self.alpha_beta);
        let s = self.alpha + self.beta;
        let lin = self.gamma - 1.0 - a * s - 2.0 * a * ab;
        let con = a * ab * (a * (1.0 + s) - self.gamma + a * ab);
        let disc = (lin * lin - 4.0 * con).sqrt();
        let big = if (-lin + disc).norm() >= (-lin - disc).norm() {
            0.5 * (-lin + disc)
        } else {
            0.5 * (-lin - disc)
        };
        let small = if big.norm() > 0.0 { con / big } else { big };
        [big, small]
    }
}

/// Recurrence coefficients `(R_n, Q_n, P_n)` of
/// `R_n c_n + Q_{n-1} c_{n-1} + P_{n-2} c_{n-2} = 0`:
///
/// ```text
/// R_n = a n (alpha - gamma + n)(beta - gamma + n) / (gamma - n)
/// Q_n = -P_n + a n (alpha + beta - gamma + n) + a ab - q0
/// P_n = (a - 1)(eps + n)(gamma - n - 1)
/// ```
pub fn recurrence_coefficients(
    n: usize,
    p: &CanonicalHeun,
) -> Result<(Complex64, Complex64, Complex64)> {
    let nf = n as f64;
    let g = p.gamma;
    let m = g.re.round();
    if m >= 0.0 && m <= nf && (g.re - m).abs() < GAMMA_INTEGER_TOL && g.im.abs() < GAMMA_INTEGER_TOL
    {
        return Err(Error::DegenerateGamma {
            re: g.re,
            im: g.im,
            n,
        });
    }
    let a = p.a;
    let r = a * nf * (p.alpha - g + nf) * (p.beta - g + nf) / (g - nf);
    let pp = (a - 1.0) * (p.epsilon + nf) * (g - nf - 1.0);
    let qq = -pp + a * nf * (p.alpha + p.beta - g + nf) + a * p.alpha_beta - p.q0;
    Ok((r, qq, pp))
}

/// Coefficients `c_n` of `u = sum c_n 2F1(alpha, beta; gamma - n; y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesExpansion {
    /// `c_0 = 1` gauge.
    pub coefficients: Vec<Complex64>,
    /// `N` such that `c_{N+1}` and `c_{N+2}` vanish.
    pub terminated_at: Option<usize>,
}

impl SeriesExpansion {
    pub fn max_abs(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Runs the recurrence up to `n_max`, stopping early once two consecutive
/// coefficients fall below `1e-10 max|c_n|`.
///
/// Index convention: at n = 1 only `c_1` and `c_0` appear, so
/// `c_1 = -Q_0 c_0 / R_1`; from n = 2 on `c_n = -(Q_{n-1} c_{n-1} + P_{n-2} c_{n-2}) / R_n`.
pub fn expand_series(p: &CanonicalHeun, n_max: usize) -> Result<SeriesExpansion> {
    let n_max = n_max.max(3);
    let mut c = vec![Complex64::new(1.0, 0.0)];
    let (r1, _, _) = recurrence_coefficients(1, p)?;
    let (_, q0, _) = recurrence_coefficients(0, p)?;
    if r1.norm() == 0.0 {
        return Err(Error::DegenerateRecurrence(1));
    }
    c.push(-q0 / r1);
    let mut largest = c.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for n in 2..=n_max {
        let (rn, _, _) = recurrence_coefficients(n, p)?;
        let (_, qm1, _) = recurrence_coefficients(n - 1, p)?;
        let (_, _, pm2) = recurrence_coefficients(n - 2, p)?;
        if rn.norm() == 0.0 {
            return Err(Error::DegenerateRecurrence(n));
        }
        let cn = -(qm1 * c[n - 1] + pm2 * c[n - 2]) / rn;
        c.push(cn);
        largest = largest.max(cn.norm());
        let tiny = |v: Complex64| v.norm() <= TERMINATION_TOL * largest;
        if tiny(c[n]) && tiny(c[n - 1]) {
            return Ok(SeriesExpansion {
                coefficients: c,
                terminated_at: Some(n - 2),
            });
        }
    }
    Ok(SeriesExpansion {
        coefficients: c,
        terminated_at: None,
    })
}

fn u1_argument(z: f64) -> BranchedArgument {
    BranchedArgument::new(Complex64::new((z + 2.0) / 3.0, 0.0), CutSide::Above)
}

fn u2_argument(z: f64) -> BranchedArgument {
    BranchedArgument::new(Complex64::new((1.0 - z) / 3.0, 0.0), CutSide::Above)
}

/// `(gamma - 1) / (q - 2(delta - 1))`, the weight of the second 2F1 in u1.
pub fn u1_coefficient(p: &HeunParameters) -> Result<Complex64> {
    let den = p.q - 2.0 * (p.delta - 1.0);
    if den.norm() < COEFFICIENT_TOL {
        return Err(Error::DegenerateCoefficient(format!(
            "q - 2(delta - 1) = {den}"
        )));
    }
    Ok((p.gamma - 1.0) / den)
}

/// `q(1 - delta) / (ab - q(1 - delta))`, the weight of the second 2F1 in u2.
pub fn u2_coefficient(p: &HeunParameters) -> Result<Complex64> {
    let num = p.q * (1.0 - p.delta);
    let den = p.alpha_beta - num;
    if den.norm() < COEFFICIENT_TOL {
        return Err(Error::DegenerateCoefficient(format!(
            "ab - q(1 - delta) = {den}"
        )));
    }
    Ok(num / den)
}

/// Second expansion coefficient in closed form,
/// `(gamma - 1)(q + gamma - 1) / (2(1 + alpha - gamma)(1 + beta - gamma))`.
///
/// `q` here is the accessory parameter of the (-2, 1, 0) equation, not the
/// canonical `q0`; with `q0` substituted the value no longer matches the
/// recurrence.
pub fn finite_sum_coefficient(p: &HeunParameters) -> Complex64 {
    (p.gamma - 1.0) * (p.q + p.gamma - 1.0)
        / (2.0 * (1.0 + p.alpha - p.gamma) * (1.0 + p.beta - p.gamma))
}

/// `u1 = 2F1(alpha, beta; gamma; (z+2)/3) + (gamma-1)/(q-2(delta-1)) 2F1(alpha, beta; gamma-1; (z+2)/3)`,
/// taken from above the cut for z > 1.
pub fn fundamental_u1(p: &HeunParameters, z: f64) -> Result<Complex64> {
    let coeff = u1_coefficient(p)?;
    let y = u1_argument(z);
    let f0 = gauss_2f1(p.alpha, p.beta, p.gamma, y)?;
    let f1 = gauss_2f1(p.alpha, p.beta, p.gamma - 1.0, y)?;
    Ok(f0 + coeff * f1)
}

/// `u2 = 2F1(alpha, beta; delta; (1-z)/3) + q(1-delta)/(ab-q(1-delta)) 2F1(alpha, beta; delta-1; (1-z)/3)`.
pub fn fundamental_u2(p: &HeunParameters, z: f64) -> Result<Complex64> {
    let coeff = u2_coefficient(p)?;
    let y = u2_argument(z);
    let f0 = gauss_2f1(p.alpha, p.beta, p.delta, y)?;
    let f1 = gauss_2f1(p.alpha, p.beta, p.delta - 1.0, y)?;
    Ok(f0 + coeff * f1)
}

/// u1 rebuilt from the canonical form: run the recurrence, require it to
/// terminate, and sum `c_n 2F1(alpha, beta; gamma - n; y)` at `y = (z+2)/3`.
pub fn fundamental_u1_finite_sum(p: &HeunParameters, z: f64) -> Result<Complex64> {
    let canonical = canonical_map(p);
    let expansion = expand_series(&canonical, 8)?;
    let n_terms = expansion.terminated_at.ok_or_else(|| {
        Error::NonConvergence("hypergeometric expansion does not terminate".into())
    })?;
    let y = u1_argument(z);
    let mut sum = Complex64::new(0.0, 0.0);
    for (n, cn) in expansion.coefficients.iter().take(n_terms + 1).enumerate() {
        sum += cn
            * gauss_2f1(
                canonical.alpha,
                canonical.beta,
                canonical.gamma - n as f64,
                y,
            )?;
    }
    // The two-term form is normalised to c_0 = 1 as well, so no rescaling.
    Ok(sum)
}

/// u1 from its single-3F2 form
/// `3F2(alpha, beta, 1 + 2ab/q; 2ab/q, gamma; (z+2)/3)`, scaled by the value
/// of the two-term form at the expansion point (`1 + (gamma-1)/(q-2(delta-1))`)
/// so that it is comparable with [`fundamental_u1`].
///
/// For z > 1 the argument lies on the cut beyond y = 1, so the 3F2 equation
/// is integrated around y = 1 through the upper half plane.
pub fn fundamental_u1_clausen(p: &HeunParameters, z: f64) -> Result<Complex64> {
    let e = 2.0 * p.alpha_beta / p.q;
    let upper = [p.alpha, p.beta, 1.0 + e];
    let lower = [e, p.gamma];
    let value = clausen_continued(upper, lower, u1_argument(z))?;
    Ok((1.0 + u1_coefficient(p)?) * value)
}

/// u2 from `3F2(alpha, beta, 1 - ab/q; -ab/q, delta; (1-z)/3)`, scaled by
/// `1 + q(1-delta)/(ab-q(1-delta))`.
pub fn fundamental_u2_clausen(p: &HeunParameters, z: f64) -> Result<Complex64> {
    let e = -p.alpha_beta / p.q;
    let upper = [p.alpha, p.beta, 1.0 + e];
    let lower = [e, p.delta];
    let value = clausen_continued(upper, lower, u2_argument(z))?;
    Ok((1.0 + u2_coefficient(p)?) * value)
}

/// 3F2 from its power series near the origin, continued by Taylor
/// re-expansion of
/// `y^2(1-y) w''' + [(b1+b2+1) - (e1+3) y] y w'' + [b1 b2 - (1+e1+e2) y] w' - e3 w = 0`
/// (e_k the elementary symmetric polynomials of the upper parameters).
/// The series is only summed within `1 / max|parameter|` of the origin, where
/// it does not cancel; arguments on the cut are reached around y = 1 on the
/// requested side.
fn clausen_continued(
    upper: [Complex64; 3],
    lower: [Complex64; 2],
    y: BranchedArgument,
) -> Result<Complex64> {
    let target = y.value;
    let scale = upper
        .iter()
        .chain(lower.iter())
        .map(|v| v.norm())
        .fold(1.0, f64::max);
    let radius = 0.5_f64.min(1.0 / scale);
    if target.norm() <= radius {
        return series_3f2(upper, lower, target);
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let [a1, a2, a3] = upper;
    let [b1, b2] = lower;
    let e1 = a1 + a2 + a3;
    let e2 = a1 * a2 + a1 * a3 + a2 * a3;
    let e3 = a1 * a2 * a3;

    let mut path = Vec::new();
    if y.on_cut() {
        let turn = match y.cut_side {
            CutSide::Above => 1.0,
            CutSide::Below => -1.0,
        };
        let r = if target.re > 1.0 {
            (0.5 * (target.re - 1.0)).min(0.5)
        } else {
            0.5
        };
        path.push(Complex64::new(radius, 0.0));
        path.push(Complex64::new(1.0 - r, 0.0));
        for k in 1..=8 {
            let theta = std::f64::consts::PI * (1.0 - k as f64 / 8.0);
            path.push(one + r * Complex64::new(theta.cos(), turn * theta.sin()));
        }
    } else {
        path.push(target * (radius / target.norm()));
    }
    path.push(target);

    let start = path[0];
    let w0 = series_3f2(upper, lower, start)?;
    let d1 = e3 / (b1 * b2);
    let w1 = d1 * series_3f2(upper.map(|a| a + 1.0), lower.map(|b| b + 1.0), start)?;
    let d2 = d1 * (a1 + 1.0) * (a2 + 1.0) * (a3 + 1.0) / ((b1 + 1.0) * (b2 + 1.0));
    let w2 = d2 * series_3f2(upper.map(|a| a + 2.0), lower.map(|b| b + 2.0), start)?;

    let ode = PolynomialOde::new(
        vec![
            vec![-e3],
            vec![b1 * b2, -(1.0 + e1 + e2)],
            vec![zero, b1 + b2 + 1.0, -(e1 + 3.0)],
            vec![zero, zero, one, -one],
        ],
        vec![zero, one],
    )
    .with_max_step(1.0 / scale);
    let out = ode.continue_along(&path, vec![w0, w1, w2])?;
    Ok(out[0])
}

/// Applies the Heun operator of the (-2, 1, 0) equation to `u` at `z` by
/// fourth-order central differences with step `h`. Returns the residual and
/// a scale for it: the largest of `|u|` and the three term magnitudes.
pub fn heun_operator_residual(
    p: &HeunParameters,
    z: f64,
    h: f64,
    u: impl Fn(f64) -> Result<Complex64>,
) -> Result<(Complex64, f64)> {
    let um2 = u(z - 2.0 * h)?;
    let um1 = u(z - h)?;
    let u0 = u(z)?;
    let up1 = u(z + h)?;
    let up2 = u(z + 2.0 * h)?;
    let d1 = (um2 - 8.0 * um1 + 8.0 * up1 - up2) / (12.0 * h);
    let d2 = (-um2 + 16.0 * um1 - 30.0 * u0 + 16.0 * up1 - up2) / (12.0 * h * h);
    let t1 = d2;
    let t2 = (p.gamma / (z + 2.0) + p.delta / (z - 1.0) + p.epsilon / z) * d1;
    let t3 = (p.alpha_beta * z - p.q) / ((z + 2.0) * (z - 1.0) * z) * u0;
    let scale = t1.norm().max(t2.norm()).max(t3.norm()).max(u0.norm());
    Ok((t1 + t2 + t3, scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn worked_parameter_example() {
        let cfg = PhysicalConfig::unit_step(-1.0);
        let p = build_heun_parameters(&cfg, 2.0, Sign::Plus, Sign::Plus);
        let (s5, s2, s10) = (5.0_f64.sqrt(), 2.0_f64.sqrt(), 10.0_f64.sqrt());
        assert!(close(p.alpha1, c(0.0, -2.0 * s5), 1e-14));
        assert!(close(p.alpha2, c(0.0, -s2), 1e-14));
        assert!(close(p.gamma, c(1.0, -4.0 * s5), 1e-14));
        assert!(close(p.delta, c(1.0, -2.0 * s2), 1e-14));
        assert_eq!(p.epsilon, c(-1.0, 0.0));
        assert!(close(p.alpha_beta, c(14.0 - 4.0 * s10, 0.0), 1e-14));
        assert!((p.alpha_beta.re - 1.35089).abs() < 1e-5);
        assert!(close(p.q, c(0.0, 2.0 * s5 - 2.0 * s2), 1e-14));
        assert!(close(p.alpha * p.beta, p.alpha_beta, 1e-13));
        assert!(p.fuchs_residual() <= 1e-12);
        assert!(termination_residual(&p).norm() <= 1e-10);
    }

    #[test]
    fn roots_are_ordered() {
        let (a, b) = split_exponents(c(1.0, 2.0), c(-3.0, 0.5));
        assert!((a.re, a.im) <= (b.re, b.im));
        assert!(close(a + b, c(1.0, 2.0), 1e-14));
        assert!(close(a * b, c(-3.0, 0.5), 1e-14));
    }

    #[test]
    fn termination_residual_arithmetic() {
        let p = HeunParameters::from_exponents(
            c(2.0, 0.0),
            c(2.0, 0.0),
            c(-1.0, 0.0),
            c(1.0, 0.0),
            c(1.0, 0.0),
        );
        assert_eq!(termination_residual(&p), c(-2.0, 0.0));
    }

    #[test]
    fn perturbed_accessory_breaks_termination() {
        let cfg = PhysicalConfig::unit_step(-0.4);
        let p = build_heun_parameters(&cfg, 2.7, Sign::Plus, Sign::Plus);
        let perturbed = p.with_q(p.q + 0.1);
        // the quadratic has derivative 2q + 1 + gamma - 2 delta at its root
        let slope = 2.0 * p.q + 1.0 + p.gamma - 2.0 * p.delta;
        let expected = slope * 0.1 + 0.01;
        assert!(close(termination_residual(&perturbed), expected, 1e-12));
        assert!(termination_residual(&perturbed).norm() > 1e-3);
    }

    #[test]
    fn canonical_map_values() {
        let p = HeunParameters::from_exponents(
            c(1.5, 0.2),
            c(0.7, -0.1),
            c(-1.0, 0.0),
            c(1.0, 0.0),
            c(1.0, 0.0),
        );
        let cm = canonical_map(&p);
        assert_eq!(cm.a, c(2.0 / 3.0, 0.0));
        assert!(close(cm.q0, c(1.0, 0.0), 1e-15));
        assert!(close(cm.physical_accessory(), p.q, 1e-14));
    }

    #[test]
    fn canonical_quadratic_reproduces_physical_condition() {
        for (sigma, e) in [(-0.25, 2.0), (-1.0, 1.3), (-2.2, 5.0), (0.6, 3.0)] {
            let p =
                build_heun_parameters(&PhysicalConfig::unit_step(sigma), e, Sign::Plus, Sign::Plus);
            let cm = canonical_map(&p);
            assert!(cm.termination_residual().norm() <= 1e-10 * (1.0 + cm.q0.norm_sqr()));
        }
    }

    #[test]
    fn recurrence_heads() {
        let cm = CanonicalHeun {
            a: c(2.0 / 3.0, 0.0),
            q0: c(0.3, 0.1),
            alpha: c(1.3, 0.4),
            beta: c(0.7, -0.9),
            gamma: c(1.2, 0.5),
            delta: c(0.5, 0.2),
            epsilon: c(-1.0, 0.0),
            alpha_beta: c(1.3, 0.4) * c(0.7, -0.9),
        };
        let (r0, _, _) = recurrence_coefficients(0, &cm).unwrap();
        assert_eq!(r0, c(0.0, 0.0));
        let (_, _, p1) = recurrence_coefficients(1, &cm).unwrap();
        assert_eq!(p1, c(0.0, 0.0));
    }

    #[test]
    fn recurrence_matches_hand_evaluation() {
        // a = 2/3, alpha = 13/10, beta = 7/10, gamma = 3/2 + i/2, eps = -1, ab = 91/100, q0 = 1/4
        let cm = CanonicalHeun {
            a: c(2.0 / 3.0, 0.0),
            q0: c(0.25, 0.0),
            alpha: c(1.3, 0.0),
            beta: c(0.7, 0.0),
            gamma: c(1.5, 0.5),
            delta: c(0.0, 0.0),
            epsilon: c(-1.0, 0.0),
            alpha_beta: c(0.91, 0.0),
        };
        let (r, q, p) = recurrence_coefficients(2, &cm).unwrap();
        // R_2 = (4/3)(1.8 - 0.5i)(1.2 - 0.5i)/(-0.5 + 0.5i)
        let r_hand = (4.0 / 3.0) * c(1.8, -0.5) * c(1.2, -0.5) / c(-0.5, 0.5);
        // P_2 = (-1/3)(1)(-1.5 + 0.5i)
        let p_hand = (-1.0 / 3.0) * c(-1.5, 0.5);
        // Q_2 = -P_2 + (4/3)(2.5 - 0.5i) + (2/3)(0.91) - 0.25
        let q_hand = -p_hand + (4.0 / 3.0) * c(2.5, -0.5) + (2.0 / 3.0) * 0.91 - 0.25;
        assert!(close(r, r_hand, 1e-15));
        assert!(close(p, p_hand, 1e-15));
        assert!(close(q, q_hand, 1e-15));
    }

    #[test]
    fn integer_gamma_is_degenerate() {
        let cm = CanonicalHeun {
            a: c(2.0 / 3.0, 0.0),
            q0: c(0.3, 0.0),
            alpha: c(1.3, 0.0),
            beta: c(0.7, 0.0),
            gamma: c(2.0, 0.0),
            delta: c(0.0, 0.0),
            epsilon: c(-1.0, 0.0),
            alpha_beta: c(0.91, 0.0),
        };
        assert!(recurrence_coefficients(1, &cm).is_ok());
        assert!(matches!(
            recurrence_coefficients(2, &cm),
            Err(Error::DegenerateGamma { n: 2, .. })
        ));
        assert!(expand_series(&cm, 5).is_err());
    }

    #[test]
    fn physical_expansion_terminates_after_two_terms() {
        let p = build_heun_parameters(
            &PhysicalConfig::unit_step(-0.25),
            2.0,
            Sign::Plus,
            Sign::Plus,
        );
        let cm = canonical_map(&p);
        let ex = expand_series(&cm, 10).unwrap();
        assert_eq!(ex.coefficients[0], c(1.0, 0.0));
        assert_eq!(ex.terminated_at, Some(1));
        assert!(close(ex.coefficients[1], finite_sum_coefficient(&p), 1e-12));
        assert!(close(
            ex.coefficients[1],
            u1_coefficient(&p).unwrap(),
            1e-12
        ));

        let off = expand_series(&cm.with_q0(cm.q0 + 0.1), 10).unwrap();
        assert_eq!(off.terminated_at, None);
        assert_eq!(off.coefficients.len(), 11);
    }

    #[test]
    fn u2_at_the_singular_point() {
        let p = build_heun_parameters(
            &PhysicalConfig::unit_step(-0.5),
            1.7,
            Sign::Plus,
            Sign::Plus,
        );
        let v = fundamental_u2(&p, 1.0).unwrap();
        assert!(close(v, 1.0 + u2_coefficient(&p).unwrap(), 1e-15));
    }

    #[test]
    fn degenerate_coefficients_are_errors() {
        let p = HeunParameters::from_exponents(
            c(1.5, 0.2),
            c(1.0, 0.0),
            c(-1.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
        );
        assert!(matches!(
            fundamental_u1(&p, 2.0),
            Err(Error::DegenerateCoefficient(_))
        ));
        let p = HeunParameters::from_exponents(
            c(1.5, 0.2),
            c(0.5, 0.0),
            c(-1.0, 0.0),
            c(0.5, 0.0),
            c(1.0, 0.0),
        );
        assert!(matches!(
            fundamental_u2(&p, 2.0),
            Err(Error::DegenerateCoefficient(_))
        ));
    }
}
