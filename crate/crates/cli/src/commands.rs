use heunstep::geometry::{potential_v, transform_point};
use heunstep::oracle::transmission_oracle;
use heunstep::scattering::{regime_threshold, transmission, Wavefunction};
use heunstep::{Error, PhysicalConfig};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::table::{Cell, Table};
use crate::CliError;

pub const ORACLE_TOLERANCE: f64 = 1e-4;
/// Finite-difference step for the residual column.
const RESIDUAL_STEP: f64 = 1e-3;

pub fn potential(cfgs: &[PhysicalConfig], xs: &[f64]) -> Table {
    let several = cfgs.len() > 1;
    let mut table = if several {
        Table::new(&["sigma", "x", "z", "rho", "V"])
    } else {
        Table::new(&["x", "z", "rho", "V"])
    };
    for cfg in cfgs {
        for &x in xs {
            let tp = transform_point(x, cfg);
            let mut row: Vec<Cell> = Vec::with_capacity(5);
            if several {
                row.push(cfg.sigma.into());
            }
            row.extend([
                tp.x.into(),
                tp.z.into(),
                tp.rho.into(),
                potential_v(x, cfg).into(),
            ]);
            table.push(row);
        }
    }
    table
}

/// psi on the grid with the Schrodinger residual scaled by the largest
/// `|psi| (2m/hbar^2) |E - V|` on the grid.
pub fn wavefunction(
    cfg: &PhysicalConfig,
    energy: f64,
    c1: Complex64,
    c2: Complex64,
    xs: &[f64],
) -> Result<Table, CliError> {
    let wf = Wavefunction::new(cfg, energy, c1, c2)?;
    let rows: Vec<(f64, Complex64, f64, f64)> = xs
        .par_iter()
        .map(|&x| {
            let psi = wf.eval(x)?;
            let (res, scale) = wf.schrodinger_residual(x, RESIDUAL_STEP)?;
            Ok((x, psi, res.norm(), scale))
        })
        .collect::<Result<_, Error>>()?;
    let scale = rows.iter().map(|r| r.3).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let mut table = Table::new(&["x", "re_psi", "im_psi", "abs_psi2", "residual"]);
    for (x, psi, res, _) in rows {
        table.push(vec![
            x.into(),
            psi.re.into(),
            psi.im.into(),
            (psi.re * psi.re + psi.im * psi.im).into(),
            (res / scale).into(),
        ]);
    }
    Ok(table)
}

pub struct Sweep {
    pub table: Table,
    pub worst_difference: f64,
}

struct Row {
    sigma: f64,
    energy: f64,
    analytic: Option<f64>,
    oracle: Option<f64>,
}

pub fn transmission_sweep(
    cfgs: &[PhysicalConfig],
    energies: &[f64],
    with_oracle: bool,
) -> Result<Sweep, CliError> {
    let jobs: Vec<(PhysicalConfig, f64)> = cfgs
        .iter()
        .flat_map(|c| energies.iter().map(move |&e| (*c, e)))
        .collect();
    let rows: Vec<Row> = jobs
        .par_iter()
        .map(|&(cfg, e)| {
            let analytic = if e > regime_threshold(&cfg) {
                Some(transmission(&cfg, e)?)
            } else {
                None
            };
            let oracle = if with_oracle && analytic.is_some() {
                Some(transmission_oracle(&cfg, e)?.t)
            } else {
                None
            };
            Ok(Row {
                sigma: cfg.sigma,
                energy: e,
                analytic,
                oracle,
            })
        })
        .collect::<Result<_, Error>>()?;

    let mut columns = vec!["sigma", "E", "T", "R", "regime"];
    if with_oracle {
        columns.extend(["T_oracle", "dT"]);
    }
    let mut table = Table::new(&columns);
    let mut worst: f64 = 0.0;
    for row in rows {
        let regime = if row.analytic.is_some() {
            "above"
        } else {
            "below_barrier"
        };
        let mut cells = vec![
            row.sigma.into(),
            row.energy.into(),
            row.analytic.into(),
            row.analytic.map(|t| 1.0 - t).into(),
            regime.into(),
        ];
        if with_oracle {
            let diff = row.analytic.zip(row.oracle).map(|(a, o)| (a - o).abs());
            if let Some(d) = diff {
                worst = worst.max(d);
            }
            cells.push(row.oracle.into());
            cells.push(diff.into());
        }
        table.push(cells);
    }
    Ok(Sweep {
        table,
        worst_difference: worst,
    })
}
