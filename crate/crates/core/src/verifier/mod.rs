//! Numerical certification of catalog entries: PDE and ODE residuals,
//! finite-difference cross-checks of the analytic partials, and the audit
//! of sign tuples and readings.

mod audit;

pub use audit::{classify_branches, Audit, AuditRow, EquivalenceRow, FamilyGroup, FAMILY_GROUPS};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::solutions::{SingularZone, SolutionError, SolutionSpec};

/// PDE residual threshold separating exact solutions from wrong pairings.
pub const DEFAULT_THRESHOLD: f64 = 1e-8;
/// ODE residual threshold at the standard ξ points.
pub const ODE_THRESHOLD: f64 = 1e-10;
/// ξ points for the ODE residual; points inside singular zones are skipped.
pub const STANDARD_XI: [f64; 13] = [-7.0, -5.0, -3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 7.0];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Solution(#[from] SolutionError),
}

/// Tensor grid in `(x, t)` with ξ-zones removed before any statistic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_range: (f64, f64),
    pub t_range: (f64, f64),
    pub nx: usize,
    pub nt: usize,
    pub excluded: Vec<SingularZone>,
}

impl GridSpec {
    pub fn new(x_range: (f64, f64), t_range: (f64, f64), nx: usize, nt: usize) -> Result<Self, VerifyError> {
        if nx < 2 || nt < 1 {
            return Err(VerifyError::InvalidGrid(format!("need nx >= 2 and nt >= 1, got {nx}, {nt}")));
        }
        let ordered = |(a, b): (f64, f64)| a.is_finite() && b.is_finite() && a <= b;
        if !ordered(x_range) || !ordered(t_range) || x_range.0 == x_range.1 {
            return Err(VerifyError::InvalidGrid(format!("bad ranges {x_range:?}, {t_range:?}")));
        }
        Ok(GridSpec { x_range, t_range, nx, nt, excluded: Vec::new() })
    }

    /// `x ∈ [−10, 10]` (201 points) × `t ∈ [0, 1]` (11 points).
    pub fn standard() -> Self {
        GridSpec { x_range: (-10.0, 10.0), t_range: (0.0, 1.0), nx: 201, nt: 11, excluded: Vec::new() }
    }

    /// This grid with the spec's singular zones excluded.
    pub fn for_spec(&self, spec: &SolutionSpec) -> GridSpec {
        let mut g = self.clone();
        g.excluded.extend(spec.singular_zones());
        g
    }

    pub fn x_at(&self, i: usize) -> f64 {
        let (a, b) = self.x_range;
        a + (b - a) * i as f64 / (self.nx - 1) as f64
    }

    pub fn t_at(&self, j: usize) -> f64 {
        let (a, b) = self.t_range;
        if self.nt == 1 {
            a
        } else {
            a + (b - a) * j as f64 / (self.nt - 1) as f64
        }
    }

    /// All `(x, t)` in row-major order (t outer).
    pub fn points(&self) -> Vec<(f64, f64)> {
        (0..self.nt).flat_map(|j| (0..self.nx).map(move |i| (self.x_at(i), self.t_at(j)))).collect()
    }

    /// Points whose ξ avoids every excluded zone.
    pub fn retained(&self, spec: &SolutionSpec) -> Vec<(f64, f64)> {
        self.points()
            .into_iter()
            .filter(|&(x, t)| {
                let xi = spec.xi(x, t);
                !self.excluded.iter().any(|z| z.contains(xi))
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Valid,
    Invalid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResidualKind {
    Pde,
    Ode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub spec_id: String,
    pub kind: ResidualKind,
    pub grid: Option<GridSpec>,
    pub points: usize,
    pub excluded_points: usize,
    pub max_abs: f64,
    pub mean_abs: f64,
    /// `(x, t)` for the PDE residual, `(ξ, 0)` for the ODE residual.
    pub argmax: (f64, f64),
    pub threshold: f64,
    pub verdict: Verdict,
}

/// Kahan-compensated sum.
fn compensated_sum(values: &[f64]) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

fn report(
    spec: &SolutionSpec,
    kind: ResidualKind,
    grid: Option<GridSpec>,
    located: &[((f64, f64), f64)],
    excluded_points: usize,
    threshold: f64,
) -> ResidualReport {
    let mut max_abs = 0.0;
    let mut argmax = (f64::NAN, f64::NAN);
    let mut abs = Vec::with_capacity(located.len());
    for &(p, r) in located {
        // non-finite residuals count as unbounded
        let a = if r.is_finite() { r.abs() } else { f64::INFINITY };
        if a > max_abs || argmax.0.is_nan() {
            max_abs = a;
            argmax = p;
        }
        abs.push(a);
    }
    let mean_abs = if abs.is_empty() { 0.0 } else { compensated_sum(&abs) / abs.len() as f64 };
    ResidualReport {
        spec_id: spec.id.clone(),
        kind,
        grid,
        points: located.len(),
        excluded_points,
        max_abs,
        mean_abs: mean_abs.min(max_abs),
        argmax,
        threshold,
        verdict: if max_abs < threshold { Verdict::Valid } else { Verdict::Invalid },
    }
}

/// `u_t − u_xx + u³ − u` from the analytic partials at every retained point.
pub fn pde_residual(spec: &SolutionSpec, grid: &GridSpec, threshold: f64) -> Result<ResidualReport, VerifyError> {
    let pts = grid.retained(spec);
    let excluded = grid.nx * grid.nt - pts.len();
    let located = pts
        .par_iter()
        .map(|&(x, t)| {
            let u = spec.eval(x, t)?;
            let p = spec.partials(x, t)?;
            Ok(((x, t), p.u_t - p.u_xx + u * u * u - u))
        })
        .collect::<Result<Vec<_>, SolutionError>>()?;
    Ok(report(spec, ResidualKind::Pde, Some(grid.clone()), &located, excluded, threshold))
}

/// `wU' − k²U'' + U³ − U` at the given ξ, skipping singular zones.
pub fn ode_residual(spec: &SolutionSpec, xi_points: &[f64], threshold: f64) -> Result<ResidualReport, VerifyError> {
    let (w, k) = (spec.w(), spec.k);
    let mut located = Vec::new();
    let mut excluded = 0;
    for &xi in xi_points {
        if spec.is_singular_at(xi) {
            excluded += 1;
            continue;
        }
        let p = spec.profile(xi)?;
        located.push(((xi, 0.0), w * p.du - k * k * p.d2u + p.u.powi(3) - p.u));
    }
    Ok(report(spec, ResidualKind::Ode, None, &located, excluded, threshold))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stencil {
    /// 3-point central differences.
    Second,
    /// 5-point central differences.
    Fourth,
}

/// Max |finite difference − analytic| at one step size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdRow {
    pub h: f64,
    pub err_ut: f64,
    pub err_ux: f64,
    pub err_uxx: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdTable {
    pub spec_id: String,
    pub stencil: Stencil,
    pub rows: Vec<FdRow>,
    pub points: usize,
    /// Least-squares slope of log(error) against log(h); `None` when an
    /// error is exactly zero.
    pub order_ut: Option<f64>,
    pub order_ux: Option<f64>,
    pub order_uxx: Option<f64>,
}

fn first_difference(f: &dyn Fn(f64) -> f64, h: f64, stencil: Stencil) -> f64 {
    match stencil {
        Stencil::Second => (f(h) - f(-h)) / (2.0 * h),
        Stencil::Fourth => (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h),
    }
}

fn second_difference(f: &dyn Fn(f64) -> f64, h: f64, stencil: Stencil) -> f64 {
    match stencil {
        Stencil::Second => (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h),
        Stencil::Fourth => {
            (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h)
        }
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || ys.iter().any(|y| !(*y > 0.0) || !y.is_finite()) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Compares analytic partials with central differences in t and x. Points
/// whose widest stencil reaches a singular zone are dropped for every h, so
/// all rows use the same point set.
pub fn fd_crosscheck(
    spec: &SolutionSpec,
    grid: &GridSpec,
    h_list: &[f64],
    stencil: Stencil,
) -> Result<FdTable, VerifyError> {
    if h_list.is_empty() || h_list.iter().any(|h| !(*h > 0.0)) {
        return Err(VerifyError::InvalidGrid("step sizes must be positive".into()));
    }
    let reach = match stencil {
        Stencil::Second => 1.0,
        Stencil::Fourth => 2.0,
    } * h_list.iter().cloned().fold(0.0, f64::max);
    let margin = reach * (spec.k.abs() + spec.w().abs());
    let zones = spec.singular_zones();
    let pts: Vec<(f64, f64)> = grid
        .retained(spec)
        .into_iter()
        .filter(|&(x, t)| {
            let xi = spec.xi(x, t);
            !zones.iter().any(|z| (xi - z.center).abs() < z.half_width + margin)
        })
        .collect();
    let mut rows = Vec::new();
    for &h in h_list {
        let errs = pts
            .par_iter()
            .map(|&(x, t)| {
                let p = spec.partials(x, t)?;
                let in_t = |d: f64| spec.eval(x, t + d).unwrap_or(f64::NAN);
                let in_x = |d: f64| spec.eval(x + d, t).unwrap_or(f64::NAN);
                Ok((
                    (first_difference(&in_t, h, stencil) - p.u_t).abs(),
                    (first_difference(&in_x, h, stencil) - p.u_x).abs(),
                    (second_difference(&in_x, h, stencil) - p.u_xx).abs(),
                ))
            })
            .collect::<Result<Vec<_>, SolutionError>>()?;
        let max = |f: fn(&(f64, f64, f64)) -> f64| errs.iter().map(f).fold(0.0, f64::max);
        rows.push(FdRow { h, err_ut: max(|e| e.0), err_ux: max(|e| e.1), err_uxx: max(|e| e.2) });
    }
    let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let order = |f: fn(&FdRow) -> f64| log_log_slope(&hs, &rows.iter().map(f).collect::<Vec<_>>());
    Ok(FdTable {
        spec_id: spec.id.clone(),
        stencil,
        order_ut: order(|r| r.err_ut),
        order_ux: order(|r| r.err_ux),
        order_uxx: order(|r| r.err_uxx),
        points: pts.len(),
        rows,
    })
}
