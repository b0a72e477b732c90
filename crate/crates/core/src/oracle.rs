//! Direct numerical integration of `psi'' = -(2m/hbar^2)(E - V(x)) psi`.
//!
//! A unit transmitted wave is imposed on the right and the classical
//! fourth-order Runge-Kutta scheme runs backward to the left end, where the
//! solution is split into incident and reflected plane waves. The wave is
//! always incident from the left; for sigma > 0 the left level is the upper
//! one.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{asymptotic_levels, potential_v, PhysicalConfig};

/// Potential must match its limit to this fraction of `max(|V0|, |V1|, 1)`
/// at both ends of the domain.
pub const FLATNESS_TOL: f64 = 1e-12;
/// Largest allowed `step * max(|k_left|, |k_right|, 1/|sigma|)`; a little
/// under 0.01 so the phase error over the default domain stays below 1e-8.
pub const STEP_FACTOR: f64 = 0.008;
/// Largest allowed change of T under step halving.
pub const HALVING_TOL: f64 = 1e-6;
/// Largest allowed relative drift of A or B between the two leftmost samples.
pub const DECOMPOSITION_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub x: f64,
    pub psi: Complex64,
    pub dpsi: Complex64,
}

/// Uniform grid from `x_left` to `x_right`; filled by
/// [`integrate_schrodinger`] in order of increasing x.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationGrid {
    pub x_left: f64,
    pub x_right: f64,
    pub step: f64,
    pub samples: Vec<Sample>,
}

impl IntegrationGrid {
    /// Grid with the largest step not exceeding `max_step` that divides
    /// the interval evenly.
    pub fn new(x_left: f64, x_right: f64, max_step: f64) -> Result<Self> {
        if !(x_left < x_right) || !(max_step > 0.0) || !x_left.is_finite() || !x_right.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "bad grid [{x_left}, {x_right}] with step {max_step}"
            )));
        }
        let n = ((x_right - x_left) / max_step).ceil().max(1.0);
        Ok(Self {
            x_left,
            x_right,
            step: (x_right - x_left) / n,
            samples: Vec::new(),
        })
    }

    /// Default domain: `x0 -+ 40|sigma|`, widened in steps of `5|sigma|`
    /// until the potential is flat at both ends, with the step rule
    /// `h <= STEP_FACTOR / max(|k_left|, |k_right|, 1/|sigma|)`.
    pub fn for_config(cfg: &PhysicalConfig, energy: f64) -> Result<Self> {
        let width = cfg.sigma.abs();
        let (low, high) = flat_extent(cfg);
        let ch = channels(cfg, energy);
        let scale = ch.k_left.norm().max(ch.k_right.norm()).max(1.0 / width);
        Self::new(cfg.x0 - low, cfg.x0 + high, STEP_FACTOR / scale)
    }

    pub fn with_step(&self, max_step: f64) -> Result<Self> {
        Self::new(self.x_left, self.x_right, max_step)
    }

    pub fn intervals(&self) -> usize {
        ((self.x_right - self.x_left) / self.step).round() as usize
    }

    /// Conserved current `Im(conj(psi) psi')` along the filled grid, as
    /// `(min, max)`.
    pub fn current_range(&self) -> (f64, f64) {
        self.samples
            .iter()
            .map(|s| (s.psi.conj() * s.dpsi).im)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), j| {
                (lo.min(j), hi.max(j))
            })
    }
}

/// Distances from x0 to the left and right domain ends.
pub fn flat_extent(cfg: &PhysicalConfig) -> (f64, f64) {
    let width = cfg.sigma.abs();
    let (left_level, right_level) = asymptotic_levels(cfg);
    let tol = FLATNESS_TOL * cfg.v0.abs().max(cfg.v1.abs()).max(1.0);
    let reach = |level: f64, dir: f64| {
        let mut d = 40.0 * width;
        while (potential_v(cfg.x0 + dir * d, cfg) - level).abs() > tol {
            d += 5.0 * width;
        }
        d
    };
    (reach(left_level, -1.0), reach(right_level, 1.0))
}

/// Principal square roots of `(2m/hbar^2)(E - V)` at the two ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channels {
    pub k_left: Complex64,
    pub k_right: Complex64,
}

pub fn channels(cfg: &PhysicalConfig, energy: f64) -> Channels {
    let (left, right) = asymptotic_levels(cfg);
    let scale = cfg.kinetic_scale();
    Channels {
        k_left: Complex64::new(scale * (energy - left), 0.0).sqrt(),
        k_right: Complex64::new(scale * (energy - right), 0.0).sqrt(),
    }
}

fn open(k: Complex64) -> bool {
    k.im == 0.0 && k.re > 0.0
}

/// Fills `grid` with the solution that is `exp(i k_right x)` at `x_right`
/// (a decaying exponential normalised to 1 there when the right channel is
/// closed).
pub fn integrate_schrodinger(
    cfg: &PhysicalConfig,
    energy: f64,
    grid: &IntegrationGrid,
) -> Result<IntegrationGrid> {
    cfg.validate()?;
    let k = channels(cfg, energy).k_right;
    let i = Complex64::i();
    let x_end = grid.x_right;
    let psi0 = if open(k) {
        (i * k * x_end).exp()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut state = (psi0, i * k * psi0);
    let scale = cfg.kinetic_scale();
    let w = |x: f64| -scale * (energy - potential_v(x, cfg));

    let n = grid.intervals();
    let h = -grid.step;
    let mut samples = Vec::with_capacity(n + 1);
    let mut x = x_end;
    samples.push(Sample {
        x,
        psi: state.0,
        dpsi: state.1,
    });
    let mut w_here = w(x);
    for j in 1..=n {
        let w_mid = w(x + 0.5 * h);
        let x_next = if j == n {
            grid.x_left
        } else {
            x_end + h * j as f64
        };
        let w_next = w(x_next);
        let (p, d) = state;
        let k1 = (d, w_here * p);
        let k2 = (d + 0.5 * h * k1.1, w_mid * (p + 0.5 * h * k1.0));
        let k3 = (d + 0.5 * h * k2.1, w_mid * (p + 0.5 * h * k2.0));
        let k4 = (d + h * k3.1, w_next * (p + h * k3.0));
        state = (
            p + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            d + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        );
        x = x_next;
        w_here = w_next;
        samples.push(Sample {
            x,
            psi: state.0,
            dpsi: state.1,
        });
    }
    samples.reverse();
    Ok(IntegrationGrid {
        samples,
        ..grid.clone()
    })
}

/// Reflection and transmission read off a filled grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub r: f64,
    pub t: f64,
    /// Incident amplitude at the left end.
    pub a: Complex64,
    /// Reflected amplitude at the left end.
    pub b: Complex64,
    pub step: f64,
}

fn split(s: &Sample, k: Complex64) -> (Complex64, Complex64) {
    let i = Complex64::i();
    let a = (-i * k * s.x).exp() * (s.psi + s.dpsi / (i * k)) / 2.0;
    let b = (i * k * s.x).exp() * (s.psi - s.dpsi / (i * k)) / 2.0;
    (a, b)
}

/// `A = exp(-ikx)(psi + psi'/(ik))/2`, `B = exp(ikx)(psi - psi'/(ik))/2` at
/// the left end; `T = Re(k_right) / (k_left |A|^2)`, `R = |B|^2 / |A|^2`.
pub fn extract_rt(grid: &IntegrationGrid, ch: &Channels) -> Result<OracleResult> {
    if !open(ch.k_left) {
        return Err(Error::Regime(format!(
            "no incident wave: left channel k = {} is closed",
            ch.k_left
        )));
    }
    if grid.samples.len() < 2 {
        return Err(Error::InvalidConfig("grid has not been integrated".into()));
    }
    let (a, b) = split(&grid.samples[0], ch.k_left);
    let (a2, b2) = split(&grid.samples[1], ch.k_left);
    let variation = (a - a2).norm().max((b - b2).norm()) / a.norm();
    if variation > DECOMPOSITION_TOL {
        return Err(Error::DecompositionUnstable { variation });
    }
    let t = if open(ch.k_right) {
        ch.k_right.re / (ch.k_left.re * a.norm_sqr())
    } else {
        0.0
    };
    Ok(OracleResult {
        r: b.norm_sqr() / a.norm_sqr(),
        t,
        a,
        b,
        step: grid.step,
    })
}

/// R and T on `grid`, confirmed by repeating the run with half the step.
pub fn transmission_oracle_on(
    cfg: &PhysicalConfig,
    energy: f64,
    grid: &IntegrationGrid,
) -> Result<OracleResult> {
    let ch = channels(cfg, energy);
    let coarse = extract_rt(&integrate_schrodinger(cfg, energy, grid)?, &ch)?;
    let fine_grid = grid.with_step(0.5 * grid.step)?;
    let fine = extract_rt(&integrate_schrodinger(cfg, energy, &fine_grid)?, &ch)?;
    let change = (fine.t - coarse.t).abs().max((fine.r - coarse.r).abs());
    if change > HALVING_TOL {
        return Err(Error::StepTooLarge { change });
    }
    Ok(fine)
}

/// [`transmission_oracle_on`] over the default grid.
pub fn transmission_oracle(cfg: &PhysicalConfig, energy: f64) -> Result<OracleResult> {
    transmission_oracle_on(cfg, energy, &IntegrationGrid::for_config(cfg, energy)?)
}
