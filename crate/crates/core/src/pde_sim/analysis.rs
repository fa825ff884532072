//! Diagnostics on simulated fields: energy, front tracking, speed and
//! grid-refinement order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{integrate, Boundary, Grid1D, Scheme, SimConfig, SimError};
use crate::solutions::SolutionSpec;
use crate::verifier::log_log_slope;

/// `Σ h·(½((u_{i+1}−u_i)/h)² − ½u_i² + ¼u_i⁴)` over the grid intervals. For
/// periodic fields the last value duplicates the first, so the sum is over one
/// period.
pub fn energy(field: &[f64], grid: &Grid1D, boundary: Boundary) -> f64 {
    let h = grid.h();
    let _ = boundary;
    (0..field.len() - 1)
        .map(|i| {
            let (u, next) = (field[i], field[i + 1]);
            let g = (next - u) / h;
            h * (0.5 * g * g - 0.5 * u * u + 0.25 * u * u * u * u)
        })
        .sum()
}

/// Leftmost crossing of `level`, linearly interpolated.
pub fn front_position(field: &[f64], grid: &Grid1D, level: f64) -> Result<f64, SimError> {
    for i in 0..field.len().saturating_sub(1) {
        let (a, b) = (field[i] - level, field[i + 1] - level);
        if a == 0.0 {
            return Ok(grid.x(i));
        }
        if (a < 0.0) != (b < 0.0) || b == 0.0 {
            let theta = a / (a - b);
            return Ok(grid.x(i) + theta * grid.h());
        }
    }
    Err(SimError::NoCrossing { level })
}

/// Least-squares slope of `x_front` against `t`.
pub fn least_squares_speed(trajectory: &[(f64, f64)]) -> Result<f64, SimError> {
    if trajectory.len() < 3 {
        return Err(SimError::InsufficientData(trajectory.len()));
    }
    let n = trajectory.len() as f64;
    let tm = trajectory.iter().map(|p| p.0).sum::<f64>() / n;
    let xm = trajectory.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, x) in trajectory {
        sxy += (t - tm) * (x - xm);
        sxx += (t - tm) * (t - tm);
    }
    Ok(sxy / sxx)
}

pub fn measure_speed(result: &super::SimResult) -> Result<f64, SimError> {
    least_squares_speed(&result.front_trajectory)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub dt: f64,
    pub linf_error: f64,
    pub l2_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub spec_id: String,
    pub scheme: Scheme,
    pub rows: Vec<ConvergenceRow>,
    /// `log₂(e_i / e_{i+1})` for consecutive halvings.
    pub pairwise_orders: Vec<f64>,
    /// Log-log least-squares slope of `linf_error` against `h`.
    pub observed_order: Option<f64>,
}

/// Runs every grid with `dt` shrunk by `(h/h₀)²` from the template and reports
/// the spatial order from the final-time errors.
pub fn convergence_study(
    spec: &SolutionSpec,
    grids: &[Grid1D],
    template: &SimConfig,
) -> Result<ConvergenceTable, SimError> {
    if grids.len() < 3 {
        return Err(SimError::ConfigError(format!("need at least 3 grids, got {}", grids.len())));
    }
    let h0 = grids[0].h();
    let rows = grids
        .par_iter()
        .map(|g| {
            let ratio = g.h() / h0;
            let config = SimConfig { dt: template.dt * ratio * ratio, snapshot_count: 2, ..*template };
            let r = integrate(spec, g, &config)?;
            Ok(ConvergenceRow {
                n: g.n,
                h: g.h(),
                dt: config.steps().1,
                linf_error: *r.linf_error.last().unwrap(),
                l2_error: *r.l2_error.last().unwrap(),
            })
        })
        .collect::<Result<Vec<_>, SimError>>()?;
    let pairwise_orders = rows
        .windows(2)
        .map(|w| (w[0].linf_error / w[1].linf_error).ln() / (w[0].h / w[1].h).ln())
        .collect();
    let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let es: Vec<f64> = rows.iter().map(|r| r.linf_error).collect();
    let observed_order = if es.iter().all(|e| *e > 0.0) { log_log_slope(&hs, &es) } else { None };
    Ok(ConvergenceTable { spec_id: spec.id.clone(), scheme: template.scheme, rows, pairwise_orders, observed_order })
}
