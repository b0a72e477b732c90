//! Self-check run by `heunstep verify`.

use heunstep::geometry::uniform_grid;
use heunstep::heun::{
    build_heun_parameters, expand_series, fundamental_u1, fundamental_u1_clausen,
    fundamental_u1_finite_sum, fundamental_u2, fundamental_u2_clausen, termination_residual,
    CanonicalHeun, Sign,
};
use heunstep::oracle::transmission_oracle;
use heunstep::scattering::{
    abrupt_step_t, amplitudes, regime_threshold, transmission, wavenumbers, Wavefunction,
};
use heunstep::{PhysicalConfig, Result};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde_json::json;

use crate::table::Table;
use crate::CliError;

pub const CHECK_NAMES: &[&str] = &[
    "termination_identity",
    "series_termination",
    "solution_equivalence",
    "schrodinger_residual",
    "flux_identity",
    "oracle_comparison",
    "abrupt_limit",
    "smooth_limit",
];

const DEFAULT_TOLERANCES: [f64; 8] = [1e-10, 1e-10, 1e-8, 1e-6, 1e-8, 1e-4, 1e-3, 1e-3];

/// Shift applied to the accessory parameter by `--inject-fault`.
const FAULT_SHIFT: f64 = 1e-3;

pub struct Check {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.residual.is_finite() && self.residual <= self.tolerance
    }
}

pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed()).count()
    }

    pub fn all_passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn to_json(&self) -> String {
        let checks: Vec<_> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "residual": if c.residual.is_finite() { json!(c.residual) } else { json!(null) },
                    "tolerance": c.tolerance,
                    "passed": c.passed(),
                    "detail": c.detail,
                })
            })
            .collect();
        let doc = json!({ "passed": self.all_passed(), "checks": checks });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["name", "residual", "tolerance", "passed"]);
        for c in &self.checks {
            t.push(vec![
                c.name.into(),
                c.residual.into(),
                c.tolerance.into(),
                if c.passed() { "true" } else { "false" }.into(),
            ]);
        }
        t
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

fn random_config(rng: &mut StdRng) -> (PhysicalConfig, f64) {
    let v0 = rng.gen_range(-2.0..2.0);
    let v1 = if rng.gen_bool(0.5) {
        rng.gen_range(0.1..3.0)
    } else {
        -rng.gen_range(0.1..3.0)
    };
    let sigma = -rng.gen_range(0.05..3.0);
    let cfg = PhysicalConfig::new(v0, v1, sigma, 0.0, 1.0, 1.0).expect("valid random config");
    let e = regime_threshold(&cfg) + rng.gen_range(0.01..5.0);
    (cfg, e)
}

fn termination_identity(fault: bool) -> (f64, String) {
    let mut rng = StdRng::seed_from_u64(11);
    let shift = if fault { FAULT_SHIFT } else { 0.0 };
    let mut worst = 0.0_f64;
    for _ in 0..200 {
        let (cfg, e) = random_config(&mut rng);
        let p = build_heun_parameters(&cfg, e, Sign::Plus, Sign::Plus);
        let p = p.with_q(p.q + shift);
        worst = worst.max(termination_residual(&p).norm() / (1.0 + p.alpha_beta.norm()));
    }
    (
        worst,
        "max |q^2 + q(1+gamma-2delta) - 2ab| / (1+|ab|), 200 tuples".into(),
    )
}

fn series_termination() -> Result<(f64, String)> {
    let mut rng = StdRng::seed_from_u64(12);
    let mut worst = 0.0_f64;
    let mut still_terminating = 0;
    for _ in 0..50 {
        let mut c = |lo: f64, hi: f64| Complex64::new(rng.gen_range(lo..hi), rng.gen_range(lo..hi));
        let alpha = c(-2.0, 2.0);
        let beta = c(-2.0, 2.0);
        let gamma = Complex64::new(rng.gen_range(0.1..3.0), rng.gen_range(0.3..4.0));
        let eps = Complex64::new(-1.0, 0.0);
        let base = CanonicalHeun {
            a: Complex64::new(2.0 / 3.0, 0.0),
            q0: Complex64::new(0.0, 0.0),
            alpha,
            beta,
            gamma,
            delta: 1.0 + alpha + beta - gamma - eps,
            epsilon: eps,
            alpha_beta: alpha * beta,
        };
        let root = base.terminating_accessories()[rng.gen_range(0..2)];
        let ex = expand_series(&base.with_q0(root), 10)?;
        worst = worst.max(ex.coefficients[2].norm().max(ex.coefficients[3].norm()) / ex.max_abs());
        if expand_series(&base.with_q0(root + 0.1), 10)?
            .terminated_at
            .is_some()
        {
            still_terminating += 1;
        }
    }
    if still_terminating > 0 {
        worst = f64::INFINITY;
    }
    Ok((
        worst,
        format!(
            "max max(|c2|,|c3|)/max|cn|, 50 sets; perturbed sets terminating: {still_terminating}"
        ),
    ))
}

fn solution_equivalence() -> Result<(f64, String)> {
    let mut rng = StdRng::seed_from_u64(13);
    let mut worst = 0.0_f64;
    for _ in 0..5 {
        let (cfg, e) = random_config(&mut rng);
        let p = build_heun_parameters(&cfg, e, Sign::Plus, Sign::Plus);
        for _ in 0..8 {
            let z = rng.gen_range(1.0..3.0);
            let u1 = fundamental_u1(&p, z)?;
            let u2 = fundamental_u2(&p, z)?;
            worst = worst
                .max(rel(fundamental_u1_finite_sum(&p, z)?, u1))
                .max(rel(fundamental_u1_clausen(&p, z)?, u1))
                .max(rel(fundamental_u2_clausen(&p, z)?, u2));
        }
    }
    Ok((
        worst,
        "max relative difference between solution forms, 5 sets x 8 points".into(),
    ))
}

fn schrodinger_residual() -> Result<(f64, String)> {
    let mut worst = 0.0_f64;
    for &(s, e) in &[(-0.25, 2.0), (-1.0, 1.5)] {
        let cfg = PhysicalConfig::unit_step(s);
        let wf = Wavefunction::new(&cfg, e, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))?;
        let mut res = 0.0_f64;
        let mut scale = 0.0_f64;
        for x in uniform_grid(-10.0 * s.abs(), 10.0 * s.abs(), 101) {
            let (r, sc) = wf.schrodinger_residual(x, 1e-3)?;
            res = res.max(r.norm());
            scale = scale.max(sc);
        }
        worst = worst.max(res / scale);
    }
    Ok((
        worst,
        "scaled finite-difference residual of psi, h = 1e-3".into(),
    ))
}

fn flux_identity() -> Result<(f64, String)> {
    let mut worst = 0.0_f64;
    for &s in &[-0.1, -0.25, -0.6, -1.0] {
        for &e in &[1.1, 2.0, 5.0] {
            let amp = amplitudes(&PhysicalConfig::unit_step(s), e, Complex64::new(1.0, 0.0))?;
            worst = worst.max(amp.flux_defect());
        }
    }
    Ok((worst, "max |k1(|A|^2-|B|^2) - k2|C|^2| / (k1|A|^2)".into()))
}

fn oracle_comparison() -> Result<(f64, String)> {
    let jobs: Vec<(f64, f64)> = [-0.1, -0.6]
        .iter()
        .flat_map(|&s| [1.5, 3.0].into_iter().map(move |e| (s, e)))
        .collect();
    let diffs = jobs
        .par_iter()
        .map(|&(s, e)| {
            let cfg = PhysicalConfig::unit_step(s);
            Ok((transmission(&cfg, e)? - transmission_oracle(&cfg, e)?.t).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = diffs.into_iter().fold(0.0, f64::max);
    Ok((
        worst,
        "max |T_closed - T_numerical|, 2 sigmas x 2 energies".into(),
    ))
}

fn abrupt_limit() -> Result<(f64, String)> {
    let cfg = PhysicalConfig::unit_step(-1e-4);
    let k = wavenumbers(&cfg, 2.0)?;
    let d = (transmission(&cfg, 2.0)? - abrupt_step_t(k.k1, k.k2)).abs();
    Ok((d, "|T(sigma = -1e-4) - 4 k1 k2/(k1+k2)^2| at E = 2".into()))
}

fn smooth_limit() -> Result<(f64, String)> {
    let d = 1.0 - transmission(&PhysicalConfig::unit_step(-10.0), 2.0)?;
    Ok((d, "1 - T(sigma = -10) at E = 2".into()))
}

pub fn run(
    overrides: &[(String, f64)],
    fault: Option<&str>,
) -> std::result::Result<Report, CliError> {
    match fault {
        None | Some("termination_identity") => {}
        Some(other) => {
            return Err(CliError::Usage(format!("no fault hook for `{other}`")));
        }
    }
    let measured: Vec<(f64, String)> = vec![
        termination_identity(fault.is_some()),
        series_termination()?,
        solution_equivalence()?,
        schrodinger_residual()?,
        flux_identity()?,
        oracle_comparison()?,
        abrupt_limit()?,
        smooth_limit()?,
    ];
    let checks = CHECK_NAMES
        .iter()
        .zip(DEFAULT_TOLERANCES)
        .zip(measured)
        .map(|((&name, default), (residual, detail))| Check {
            name,
            residual,
            tolerance: overrides
                .iter()
                .rev()
                .find(|(n, _)| n == name)
                .map_or(default, |o| o.1),
            detail,
        })
        .collect();
    Ok(Report { checks })
}
