use num_complex::Complex64;
use rayon::prelude::*;

use super::{FigureData, RunConfig, Table};
use crate::error::{Error, Result};
use crate::paa_cs::PaaCsLabel;

/// Evaluates `f` on every `(a, b)` of the product grid, rows in `a`-major
/// order regardless of how the outer loop is scheduled.
fn sweep<F>(outer: &[f64], inner: &[f64], f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64, f64) -> Result<Vec<f64>> + Sync,
{
    let blocks: Vec<Result<Vec<Vec<f64>>>> = outer
        .par_iter()
        .map(|&a| inner.iter().map(|&b| f(a, b)).collect())
        .collect();
    let mut rows = Vec::with_capacity(outer.len() * inner.len());
    for b in blocks {
        rows.extend(b?);
    }
    Ok(rows)
}

fn finite(v: f64, what: &'static str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what))
    }
}

/// `|psi_Z(tau; x)|^2` over `(tau, x)` plus the classical trajectory.
pub fn run_fig1(config: &RunConfig) -> Result<FigureData> {
    config.validate()?;
    let state = config.linear_state()?;
    let taus = config.grids[0].points();
    let xs = config.grids[1].points();
    let rows = sweep(&taus, &xs, |t, x| {
        Ok(vec![t, x, finite(state.wavefunction(t, x).norm_sqr(), "fig1 density")?])
    })?;
    let trajectory = taus
        .iter()
        .map(|&t| {
            let (x, p) = state.classical_trajectory(t);
            vec![t, x, p]
        })
        .collect();
    Ok(FigureData {
        config: config.clone(),
        tables: vec![
            Table::new("density", &["tau", "x", "density"], rows),
            Table::new("trajectory", &["tau", "x", "p"], trajectory),
        ],
    })
}

/// `N(J) |<J', gamma' | J, gamma>|^2` over `(J', gamma')`.
pub fn run_fig2(config: &RunConfig) -> Result<FigureData> {
    config.validate()?;
    let model = config.normal_law()?;
    let reference = config.paa_label();
    let js = config.grids[0].points();
    let gs = config.grids[1].points();
    let rows = sweep(&js, &gs, |j, g| {
        let d = model.phase_space_density(&reference, &PaaCsLabel::new(j, g))?;
        Ok(vec![j, g, finite(d, "fig2 density")?])
    })?;
    Ok(FigureData {
        config: config.clone(),
        tables: vec![Table::new("density", &["Jp", "gammap", "density"], rows)],
    })
}

/// `|<x | J, gamma>|^2` over `x` for each configured `gamma`.
pub fn run_fig3(config: &RunConfig) -> Result<FigureData> {
    config.validate()?;
    let model = config.normal_law()?;
    let xs = config.grids[0].points();
    let rows = sweep(&config.gammas, &xs, |g, x| {
        let d = model.line_density(&PaaCsLabel::new(config.j, g), x)?;
        Ok(vec![g, x, finite(d, "fig3 density")?])
    })?;
    Ok(FigureData {
        config: config.clone(),
        tables: vec![Table::new("density", &["gamma", "x", "density"], rows)],
    })
}

fn amplitude_row(head: &[f64], v: Complex64, what: &'static str) -> Result<Vec<f64>> {
    let mut row = head.to_vec();
    row.extend([finite(v.re, what)?, finite(v.im, what)?, v.norm_sqr()]);
    Ok(row)
}

/// Complex `psi_Z(tau; x)` over `(tau, x)`.
pub fn linear_eval(config: &RunConfig) -> Result<FigureData> {
    config.validate()?;
    let state = config.linear_state()?;
    let rows = sweep(&config.grids[0].points(), &config.grids[1].points(), |t, x| {
        amplitude_row(&[t, x], state.wavefunction(t, x), "linear amplitude")
    })?;
    Ok(FigureData {
        config: config.clone(),
        tables: vec![Table::new("amplitude", &["tau", "x", "re", "im", "density"], rows)],
    })
}

/// Complex `<x | J, gamma>` over `x`.
pub fn paa_eval(config: &RunConfig) -> Result<FigureData> {
    config.validate()?;
    let model = config.normal_law()?;
    let label = config.paa_label();
    let xs = config.grids[0].points();
    let rows: Vec<Result<Vec<f64>>> = xs
        .par_iter()
        .map(|&x| amplitude_row(&[x], model.position_amplitude(&label, x)?, "position amplitude"))
        .collect();
    Ok(FigureData {
        config: config.clone(),
        tables: vec![Table::new(
            "amplitude",
            &["x", "re", "im", "density"],
            rows.into_iter().collect::<Result<_>>()?,
        )],
    })
}
