//! The step potential `V(x) = V0 + V1 / z(x)` and its coordinate map.
//!
//! `z(x)` is the real root above 1 of `(z + 2)^2 (z - 1) = 4 exp(s)` with
//! `s = (x - x0) / sigma`. For |s| <= 600 it is evaluated by the closed
//! form with real cube roots; beyond that `exp(s)` leaves double range and
//! a safeguarded Newton iteration on `ln(z - 1)` takes over, started from the
//! two asymptotes `z ~ 2^(2/3) exp(s/3)` and `z ~ 1 + (4/9) exp(s)`.

use crate::error::{Error, Result};

/// Past this |s| the closed form over/underflows.
pub const CLOSED_FORM_LIMIT: f64 = 600.0;

/// Potential and particle parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConfig {
    /// Energy origin.
    pub v0: f64,
    /// Step height.
    pub v1: f64,
    /// Steepness; its sign sets the step direction.
    pub sigma: f64,
    /// Step position.
    pub x0: f64,
    pub mass: f64,
    pub hbar: f64,
}

impl PhysicalConfig {
    pub fn new(v0: f64, v1: f64, sigma: f64, x0: f64, mass: f64, hbar: f64) -> Result<Self> {
        let cfg = Self {
            v0,
            v1,
            sigma,
            x0,
            mass,
            hbar,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `V0 = 0`, `V1 = 1`, `x0 = 0`, `m = hbar = 1`.
    pub fn unit_step(sigma: f64) -> Self {
        Self {
            v0: 0.0,
            v1: 1.0,
            sigma,
            x0: 0.0,
            mass: 1.0,
            hbar: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.v0, self.v1, self.sigma, self.x0, self.mass, self.hbar];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("all parameters must be finite".into()));
        }
        if self.mass <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "mass must be positive, got {}",
                self.mass
            )));
        }
        if self.hbar <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "hbar must be positive, got {}",
                self.hbar
            )));
        }
        if self.sigma == 0.0 {
            return Err(Error::InvalidConfig("sigma must be nonzero".into()));
        }
        Ok(())
    }

    /// `2m / hbar^2`.
    pub fn kinetic_scale(&self) -> f64 {
        2.0 * self.mass / (self.hbar * self.hbar)
    }

    pub fn with_x0(self, x0: f64) -> Self {
        Self { x0, ..self }
    }

    pub fn with_sigma(self, sigma: f64) -> Self {
        Self { sigma, ..self }
    }

    /// Reduced exponent `(x - x0) / sigma`.
    pub fn exponent(&self, x: f64) -> f64 {
        (x - self.x0) / self.sigma
    }
}

/// A point of the coordinate map, carrying `z - 1` and its logarithm
/// separately because `z` rounds to 1 long before `z - 1` underflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformPoint {
    pub x: f64,
    pub z: f64,
    pub z_minus_one: f64,
    pub ln_z_minus_one: f64,
    /// dz/dx
    pub rho: f64,
}

/// Closed form `z = -1 + W^(-2/3) + W^(2/3)` with `W = e^(s/2) + sqrt(1 + e^s)`.
pub fn z_closed_form(s: f64) -> f64 {
    let w = (0.5 * s).exp() + (1.0 + s.exp()).sqrt();
    let cr = w.cbrt();
    let cr2 = cr * cr;
    -1.0 + 1.0 / cr2 + cr2
}

/// `z - 1 = 4 sinh^2(asinh(e^(s/2)) / 3)`, the closed form rewritten
/// without the cancellation near z = 1.
fn z_minus_one_closed_form(s: f64) -> f64 {
    let th = (0.5 * s).exp().asinh() / 3.0;
    let sh = th.sinh();
    4.0 * sh * sh
}

/// Newton iteration for `u = ln(z - 1)` on
/// `g(u) = 2 ln(e^u + 3) + u - ln 4 - s`, which is increasing and convex, so
/// Newton started to the right of the root converges monotonically.
pub fn ln_z_minus_one_newton(s: f64) -> f64 {
    let ln4 = 4.0_f64.ln();
    let g = |u: f64| 2.0 * ln_exp_plus_three(u) + u - ln4 - s;
    let dg = |u: f64| 2.0 / (1.0 + 3.0 * (-u).exp()) + 1.0;
    // upper bounds for the root: from (z+2)^2 (z-1) >= max(9(z-1), (z-1)^3)
    let mut u = ((s + ln4) / 3.0).max(s + ln4 - 9.0_f64.ln()) + 1e-3;
    // bisection bracket as a safeguard
    let mut lo = f64::NEG_INFINITY;
    let mut hi = u;
    for _ in 0..200 {
        let gu = g(u);
        if gu > 0.0 {
            hi = hi.min(u);
        } else {
            lo = lo.max(u);
        }
        let mut next = u - gu / dg(u);
        if !(next < hi && (lo == f64::NEG_INFINITY || next > lo)) {
            next = if lo.is_finite() {
                0.5 * (lo + hi)
            } else {
                hi - 1.0
            };
        }
        if (next - u).abs() <= 1e-15 * u.abs().max(1.0) {
            return next;
        }
        u = next;
    }
    u
}

/// ln(e^u + 3) without overflow.
fn ln_exp_plus_three(u: f64) -> f64 {
    if u > 0.0 {
        u + (3.0 * (-u).exp()).ln_1p()
    } else {
        3.0_f64.ln() + (u.exp() / 3.0).ln_1p()
    }
}

/// Transformed coordinate `z(x) > 1`.
pub fn coordinate_z(x: f64, cfg: &PhysicalConfig) -> f64 {
    z_of_exponent(cfg.exponent(x))
}

pub fn z_of_exponent(s: f64) -> f64 {
    if s.abs() <= CLOSED_FORM_LIMIT {
        z_closed_form(s)
    } else {
        1.0 + ln_z_minus_one_newton(s).exp()
    }
}

/// `rho = dz/dx = (z + 2)(z - 1) / (3 sigma z)`.
pub fn jacobian_rho(z: f64, cfg: &PhysicalConfig) -> f64 {
    rho_from_parts(z, z - 1.0, cfg.sigma)
}

fn rho_from_parts(z: f64, z_minus_one: f64, sigma: f64) -> f64 {
    if z.is_infinite() {
        // (z + 2)(z - 1) / z grows like z
        return f64::INFINITY.copysign(sigma);
    }
    (z + 2.0) * z_minus_one / (3.0 * sigma * z)
}

/// Full transform data at `x`.
pub fn transform_point(x: f64, cfg: &PhysicalConfig) -> TransformPoint {
    let s = cfg.exponent(x);
    let (z, z_minus_one, ln_z_minus_one) = if s.abs() <= CLOSED_FORM_LIMIT {
        let zm1 = z_minus_one_closed_form(s);
        (1.0 + zm1, zm1, zm1.ln())
    } else {
        let u = ln_z_minus_one_newton(s);
        let zm1 = u.exp();
        (1.0 + zm1, zm1, u)
    };
    TransformPoint {
        x,
        z,
        z_minus_one,
        ln_z_minus_one,
        rho: rho_from_parts(z, z_minus_one, cfg.sigma),
    }
}

/// `V(x) = V0 + V1 / z(x)`.
pub fn potential_v(x: f64, cfg: &PhysicalConfig) -> f64 {
    cfg.v0 + cfg.v1 / coordinate_z(x, cfg)
}

/// Potential limits `(V(x -> -inf), V(x -> +inf))`.
pub fn asymptotic_levels(cfg: &PhysicalConfig) -> (f64, f64) {
    if cfg.sigma < 0.0 {
        (cfg.v0, cfg.v0 + cfg.v1)
    } else {
        (cfg.v0 + cfg.v1, cfg.v0)
    }
}

/// `count` evenly spaced points from `min` to `max`, both included. A single
/// point sits at `min`.
pub fn uniform_grid(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let last = (count - 1) as f64;
            (0..count)
                .map(|j| {
                    if j == count - 1 {
                        max
                    } else {
                        min + (max - min) * j as f64 / last
                    }
                })
                .collect()
        }
    }
}
