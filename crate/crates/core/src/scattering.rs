//! Physical wavefunctions and closed-form scattering data above the step.
//!
//! For sigma < 0 the potential rises from `V0` at x -> -inf to `V0 + V1` at
//! x -> +inf. With `c1 = 0` the solution is a pure transmitted wave
//! `C exp(i k2 x)` on the right and `A exp(i k1 x) + B exp(-i k1 x)` on the
//! left.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{potential_v, transform_point, PhysicalConfig};
use crate::heun::{
    build_heun_parameters, fundamental_u1, fundamental_u2, u2_coefficient, HeunParameters, Sign,
};
use crate::special::ln_gamma;

/// Asymptotic wavenumbers. `k1` on the `V0` side, `k2` on the `V0 + V1`
/// side, and `kh = sqrt(2m/hbar^2 (E - V0 + V1/2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveNumbers {
    pub k1: f64,
    pub k2: f64,
    pub kh: f64,
}

impl WaveNumbers {
    /// `3 k1^2 - 2 kh^2 - k2^2`, zero up to rounding.
    pub fn identity_residual(&self) -> f64 {
        3.0 * self.k1 * self.k1 - 2.0 * self.kh * self.kh - self.k2 * self.k2
    }
}

/// Lowest energy for which all three wavenumbers are real and positive.
pub fn regime_threshold(cfg: &PhysicalConfig) -> f64 {
    cfg.v0 + cfg.v1.max(0.0).max(-0.5 * cfg.v1)
}

pub fn wavenumbers(cfg: &PhysicalConfig, energy: f64) -> Result<WaveNumbers> {
    let threshold = regime_threshold(cfg);
    if !(energy > threshold) {
        return Err(Error::Regime(format!(
            "E = {energy} is not above the barrier top {threshold}"
        )));
    }
    let scale = cfg.kinetic_scale();
    Ok(WaveNumbers {
        k1: (scale * (energy - cfg.v0)).sqrt(),
        k2: (scale * (energy - cfg.v0 - cfg.v1)).sqrt(),
        kh: (scale * (energy - cfg.v0 + 0.5 * cfg.v1)).sqrt(),
    })
}

/// `psi = (z+2)^alpha1 (z-1)^alpha2 (c1 u1 + c2 u2)` with both exponents on
/// the plus branch. Built once per energy and evaluated at many points.
#[derive(Debug, Clone)]
pub struct Wavefunction {
    cfg: PhysicalConfig,
    energy: f64,
    params: HeunParameters,
    c1: Complex64,
    c2: Complex64,
}

impl Wavefunction {
    pub fn new(cfg: &PhysicalConfig, energy: f64, c1: Complex64, c2: Complex64) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg: *cfg,
            energy,
            params: build_heun_parameters(cfg, energy, Sign::Plus, Sign::Plus),
            c1,
            c2,
        })
    }

    pub fn parameters(&self) -> &HeunParameters {
        &self.params
    }

    pub fn eval(&self, x: f64) -> Result<Complex64> {
        let tp = transform_point(x, &self.cfg);
        let p = &self.params;
        let ln_z_plus_two = 3.0_f64.ln() + (tp.z_minus_one / 3.0).ln_1p();
        let prefactor = (p.alpha1 * ln_z_plus_two + p.alpha2 * tp.ln_z_minus_one).exp();
        let zero = Complex64::new(0.0, 0.0);
        let mut u = zero;
        if self.c1 != zero {
            u += self.c1 * fundamental_u1(p, tp.z)?;
        }
        if self.c2 != zero {
            u += self.c2 * fundamental_u2(p, tp.z)?;
        }
        Ok(prefactor * u)
    }

    /// `psi'' + (2m/hbar^2)(E - V) psi` by fourth-order central differences,
    /// with the scale `|psi| (2m/hbar^2) |E - V|`.
    pub fn schrodinger_residual(&self, x: f64, h: f64) -> Result<(Complex64, f64)> {
        let f = |t: f64| self.eval(t);
        let (m2, m1, c, p1, p2) = (
            f(x - 2.0 * h)?,
            f(x - h)?,
            f(x)?,
            f(x + h)?,
            f(x + 2.0 * h)?,
        );
        let d2 = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
        let w = self.cfg.kinetic_scale() * (self.energy - potential_v(x, &self.cfg));
        Ok((d2 + w * c, c.norm() * w.abs()))
    }
}

/// Single evaluation of the general solution at `x`.
pub fn wavefunction_psi(
    x: f64,
    cfg: &PhysicalConfig,
    energy: f64,
    c1: Complex64,
    c2: Complex64,
) -> Result<Complex64> {
    Wavefunction::new(cfg, energy, c1, c2)?.eval(x)
}

/// Asymptotic coefficients of the `c1 = 0` solution:
/// `psi ~ A exp(i k1 x) + B exp(-i k1 x)` on the left,
/// `psi ~ C exp(i k2 x)` on the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringAmplitudes {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub t: f64,
    pub r: f64,
    pub k: WaveNumbers,
}

impl ScatteringAmplitudes {
    /// `k1(|A|^2 - |B|^2) - k2|C|^2` relative to `k1 |A|^2`.
    pub fn flux_defect(&self) -> f64 {
        let k = &self.k;
        let incoming = k.k1 * self.a.norm_sqr();
        (incoming - k.k1 * self.b.norm_sqr() - k.k2 * self.c.norm_sqr()).abs() / incoming
    }
}

/// Closed-form amplitudes for `sigma < 0`, `V1 != 0`, `E` above the barrier.
///
/// With `lim = ab / (ab - q(1 - delta))` the value of `u2` at z = 1,
/// ```text
/// C = 2^(2 alpha2) 3^(alpha1 - 2 alpha2) lim c2
/// A = 2^(2 i k1 sigma) 3^(alpha1 + alpha2 - 3 i k1 sigma) (2 k2/(k1 + k2))
///     G(2 alpha2) G(6 i sigma k1) / (G(3 i sigma k1 - alpha1 + alpha2) G(3 i sigma k1 + alpha1 + alpha2)) lim c2
/// ```
/// and `B` is `A` with `k1 -> -k1`, where the middle factor becomes
/// `-2 k2/(k1 - k2)`. Phases `exp(-+i k x0)` move the asymptotes to x0.
pub fn amplitudes(
    cfg: &PhysicalConfig,
    energy: f64,
    c2: Complex64,
) -> Result<ScatteringAmplitudes> {
    cfg.validate()?;
    if cfg.sigma >= 0.0 {
        return Err(Error::Regime(
            "closed-form amplitudes are derived for sigma < 0".into(),
        ));
    }
    if cfg.v1 == 0.0 {
        return Err(Error::InvalidConfig(
            "amplitudes need a nonzero step V1".into(),
        ));
    }
    let k = wavenumbers(cfg, energy)?;
    let p = build_heun_parameters(cfg, energy, Sign::Plus, Sign::Plus);
    let i = Complex64::i();
    let (ln2, ln3) = (2.0_f64.ln(), 3.0_f64.ln());
    let s = cfg.sigma;
    let lim = 1.0 + u2_coefficient(&p)?;

    let ln_c = 2.0 * p.alpha2 * ln2 + (p.alpha1 - 2.0 * p.alpha2) * ln3;
    let c = ln_c.exp() * lim * c2 * (-i * k.k2 * cfg.x0).exp();

    let incoming = |k1: f64, middle: f64| -> Result<Complex64> {
        let t = i * s * k1;
        let ln = 2.0 * t * ln2
            + (p.alpha1 + p.alpha2 - 3.0 * t) * ln3
            + ln_gamma(2.0 * p.alpha2)?
            + ln_gamma(6.0 * t)?
            - ln_gamma(3.0 * t - p.alpha1 + p.alpha2)?
            - ln_gamma(3.0 * t + p.alpha1 + p.alpha2)?;
        Ok(ln.exp() * middle * lim * c2 * (-i * k1 * cfg.x0).exp())
    };
    let a = incoming(k.k1, 2.0 * k.k2 / (k.k1 + k.k2))?;
    let b = incoming(-k.k1, -2.0 * k.k2 / (k.k1 - k.k2))?;
    let t = transmission(cfg, energy)?;
    Ok(ScatteringAmplitudes {
        a,
        b,
        c,
        t,
        r: 1.0 - t,
        k,
    })
}

/// `ln sinh(u)` for `u > 0`.
fn ln_sinh(u: f64) -> f64 {
    u + (-(-2.0 * u).exp_m1()).ln() - std::f64::consts::LN_2
}

/// Transmission coefficient
/// `sinh(6 pi s k1) sinh(2 pi s k2) / (sinh(pi s (3k1 + k2 - 2kh)) sinh(pi s (3k1 + k2 + 2kh)))`
/// with `s = |sigma|`, summed in log space. `3k1 + k2 - 2kh` is computed as
/// `3(k1 + k2)^2 / (3k1 + k2 + 2kh)` to avoid cancellation.
pub fn transmission(cfg: &PhysicalConfig, energy: f64) -> Result<f64> {
    cfg.validate()?;
    let k = wavenumbers(cfg, energy)?;
    let s = std::f64::consts::PI * cfg.sigma.abs();
    let plus = 3.0 * k.k1 + k.k2 + 2.0 * k.kh;
    let minus = 3.0 * (k.k1 + k.k2).powi(2) / plus;
    let ln_t =
        ln_sinh(6.0 * s * k.k1) + ln_sinh(2.0 * s * k.k2) - ln_sinh(s * minus) - ln_sinh(s * plus);
    Ok(ln_t.exp().min(1.0))
}

pub fn reflection(cfg: &PhysicalConfig, energy: f64) -> Result<f64> {
    Ok(1.0 - transmission(cfg, energy)?)
}

/// Transmission of the discontinuous step, `4 k1 k2 / (k1 + k2)^2`.
pub fn abrupt_step_t(k1: f64, k2: f64) -> f64 {
    4.0 * k1 * k2 / (k1 + k2).powi(2)
}
