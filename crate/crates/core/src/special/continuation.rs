//! Analytic continuation of solutions of linear ODEs with polynomial
//! coefficients by Taylor re-expansion.
//!
//! The equation is `sum_k P_k(y) w^(k)(y) = 0` with `k = 0..=K`. Around a
//! regular point `y0` the Taylor coefficients of `w` obey a recurrence read
//! off from the shifted polynomials; each step stays inside half the
//! distance to the nearest singular point so the re-expansion converges
//! at least geometrically with ratio 1/2.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_TERMS: usize = 4000;
const TERM_TOL: f64 = 1e-17;

#[derive(Debug, Clone)]
pub(crate) struct PolynomialOde {
    /// `coeffs[k]` holds the ascending-power coefficients of `P_k`.
    coeffs: Vec<Vec<Complex64>>,
    singular_points: Vec<Complex64>,
    max_step: f64,
}

/// Coefficients of `p(y0 + t)` in powers of `t`.
fn taylor_shift(p: &[Complex64], y0: Complex64) -> Vec<Complex64> {
    let mut out = p.to_vec();
    let n = out.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            let hi = out[j + 1];
            out[j] += y0 * hi;
        }
    }
    out
}

impl PolynomialOde {
    pub(crate) fn new(coeffs: Vec<Vec<Complex64>>, singular_points: Vec<Complex64>) -> Self {
        assert!(coeffs.len() >= 2, "need at least a first-order equation");
        Self {
            coeffs,
            singular_points,
            max_step: f64::INFINITY,
        }
    }

    /// Caps the step length; needed when large parameters make the local
    /// Taylor terms grow before they decay.
    pub(crate) fn with_max_step(mut self, max_step: f64) -> Self {
        self.max_step = max_step;
        self
    }

    fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn distance_to_singularity(&self, y: Complex64) -> f64 {
        self.singular_points
            .iter()
            .map(|s| (y - s).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Advances `state = [w, w', ..., w^(K-1)]` from `y0` to `y0 + h`.
    /// `h` must lie inside the disc of convergence around `y0`.
    fn step(&self, y0: Complex64, state: &[Complex64], h: Complex64) -> Result<Vec<Complex64>> {
        let order = self.order();
        let shifted: Vec<Vec<Complex64>> =
            self.coeffs.iter().map(|p| taylor_shift(p, y0)).collect();
        let lead = shifted[order][0];
        if lead.norm() == 0.0 {
            return Err(Error::NonConvergence(format!(
                "continuation step starts at a singular point {y0}"
            )));
        }

        // t[n] = w^(n)(y0) / n!
        let mut t: Vec<Complex64> = Vec::with_capacity(64);
        let mut fact = 1.0;
        for (n, &s) in state.iter().enumerate() {
            if n > 0 {
                fact *= n as f64;
            }
            t.push(s / fact);
        }

        let mut out = vec![Complex64::new(0.0, 0.0); order];
        // powers h^(n-m) accumulate per derivative
        let mut quiet = 0usize;
        let mut n = 0usize;
        loop {
            if n >= t.len() {
                // t[n] with n = m + order, from the coefficient of t^m
                let m = n - order;
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, poly) in shifted.iter().enumerate() {
                    for (j, &pj) in poly.iter().enumerate() {
                        if j > m || (k == order && j == 0) {
                            continue;
                        }
                        let idx = m - j + k;
                        let falling: f64 = (1..=k).map(|i| (m - j + i) as f64).product();
                        acc += pj * falling * t[idx];
                    }
                }
                let falling_lead: f64 = (1..=order).map(|i| (m + i) as f64).product();
                t.push(-acc / (lead * falling_lead));
            }

            let mut largest = 0.0_f64;
            for (d, slot) in out.iter_mut().enumerate() {
                if n < d {
                    continue;
                }
                let falling: f64 = ((n - d + 1)..=n).map(|i| i as f64).product();
                let term = t[n] * falling * h.powu((n - d) as u32);
                *slot += term;
                largest = largest.max(term.norm() / slot.norm().max(f64::MIN_POSITIVE));
            }

            if n >= order && largest <= TERM_TOL {
                quiet += 1;
                if quiet >= 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
            n += 1;
            if n > MAX_TERMS {
                return Err(Error::NonConvergence(
                    "Taylor re-expansion exceeded its term cap".into(),
                ));
            }
        }
        Ok(out)
    }

    /// Continues `state` along the polyline `path`, sub-stepping so that
    /// every step covers at most half the distance to a singular point.
    pub(crate) fn continue_along(
        &self,
        path: &[Complex64],
        state: Vec<Complex64>,
    ) -> Result<Vec<Complex64>> {
        let mut state = state;
        for seg in path.windows(2) {
            let (mut y, end) = (seg[0], seg[1]);
            while (end - y).norm() > 0.0 {
                let remaining = end - y;
                let max_len = (0.5 * self.distance_to_singularity(y)).min(self.max_step);
                let h = if remaining.norm() <= max_len {
                    remaining
                } else {
                    remaining * (max_len / remaining.norm())
                };
                state = self.step(y, &state, h)?;
                y = if h == remaining { end } else { y + h };
            }
        }
        Ok(state)
    }
}
