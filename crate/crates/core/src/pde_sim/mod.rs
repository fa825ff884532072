//! Finite-difference integration of `u_t = u_xx − u³ + u` from exact initial
//! data, with front tracking and a grid-refinement study.

mod analysis;
mod linalg;

pub use analysis::{convergence_study, energy, front_position, least_squares_speed, measure_speed, ConvergenceRow, ConvergenceTable};
pub use linalg::{solve_cyclic, solve_tridiagonal};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::solutions::{SolutionError, SolutionSpec};

pub const BLOW_UP: f64 = 1e6;
/// Explicit steps must satisfy `dt ≤ STABILITY_FACTOR·h²`.
pub const STABILITY_FACTOR: f64 = 0.2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    ConfigError(String),
    #[error("field exceeded {BLOW_UP:e} at t = {t} (step {step})")]
    UnstableStep { t: f64, step: usize },
    #[error("field never crosses level {level}")]
    NoCrossing { level: f64 },
    #[error("need at least 3 trajectory points, have {0}")]
    InsufficientData(usize),
    #[error(transparent)]
    Solution(#[from] SolutionError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self, SimError> {
        if n < 8 {
            return Err(SimError::ConfigError(format!("grid needs at least 8 points, got {n}")));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(SimError::ConfigError(format!("empty interval [{x_min}, {x_max}]")));
        }
        Ok(Grid1D { x_min, x_max, n })
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (self.x_max - self.x_min) * i as f64 / (self.n - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Same interval, spacing halved.
    pub fn refined(&self) -> Grid1D {
        Grid1D { n: 2 * self.n - 1, ..*self }
    }

    pub fn refinement_sequence(&self, levels: usize) -> Vec<Grid1D> {
        std::iter::successors(Some(*self), |g| Some(g.refined())).take(levels).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Endpoint values taken from the exact solution at the current time.
    ExactDirichlet,
    /// Period `x_max − x_min`; the last grid point duplicates the first.
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ExplicitRk4Mol,
    /// Crank-Nicolson diffusion with a Heun predictor-corrector on the reaction.
    ImexCn,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub t_final: f64,
    pub boundary: Boundary,
    pub scheme: Scheme,
    /// Evenly spaced in time, both ends included.
    pub snapshot_count: usize,
}

impl SimConfig {
    /// Largest stable explicit step for `grid`, with `T` and snapshots defaulted.
    pub fn explicit_default(grid: &Grid1D, t_final: f64) -> SimConfig {
        SimConfig {
            dt: STABILITY_FACTOR * grid.h() * grid.h(),
            t_final,
            boundary: Boundary::ExactDirichlet,
            scheme: Scheme::ExplicitRk4Mol,
            snapshot_count: 11,
        }
    }

    fn validate(&self, grid: &Grid1D) -> Result<(), SimError> {
        if !(self.t_final > 0.0) {
            return Err(SimError::ConfigError(format!("T must be positive, got {}", self.t_final)));
        }
        if !(self.dt > 0.0) {
            return Err(SimError::ConfigError(format!("dt must be positive, got {}", self.dt)));
        }
        if self.snapshot_count < 2 {
            return Err(SimError::ConfigError("need at least 2 snapshots".into()));
        }
        let limit = STABILITY_FACTOR * grid.h() * grid.h();
        if self.scheme == Scheme::ExplicitRk4Mol && self.dt > limit * (1.0 + 1e-12) {
            return Err(SimError::ConfigError(format!(
                "explicit dt = {} exceeds 0.4·h²/2 = {limit}",
                self.dt
            )));
        }
        Ok(())
    }

    /// Step count and the adjusted step that lands exactly on `T`.
    pub fn steps(&self) -> (usize, f64) {
        let steps = (self.t_final / self.dt - 1e-9).ceil().max(1.0) as usize;
        (steps, self.t_final / steps as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub run_id: String,
    pub grid: Grid1D,
    pub config: SimConfig,
    pub steps: usize,
    pub snapshots: Vec<Snapshot>,
    /// Per snapshot; empty without a reference solution.
    pub linf_error: Vec<f64>,
    pub l2_error: Vec<f64>,
    pub front_trajectory: Vec<(f64, f64)>,
    pub measured_speed: Option<f64>,
    pub energy_series: Vec<f64>,
    /// Largest single-step increase of the discrete energy (≤ 0 when dissipative).
    pub max_energy_increase: f64,
}

impl SimResult {
    pub fn final_field(&self) -> &[f64] {
        &self.snapshots.last().expect("at least two snapshots").u
    }
}

/// Integrates from `spec` at `t = 0`, comparing against it at each snapshot.
pub fn integrate(spec: &SolutionSpec, grid: &Grid1D, config: &SimConfig) -> Result<SimResult, SimError> {
    config.validate(grid)?;
    reject_singular(spec, grid, config)?;
    let u0 = grid
        .points()
        .iter()
        .map(|&x| spec.eval(x, 0.0))
        .collect::<Result<Vec<_>, _>>()?;
    let (lo, hi) = spec.asymptotes();
    let level = 0.5 * (lo + hi);
    let level = if lo != hi { Some(level) } else { None };
    run(&spec.id, u0, grid, config, Some(spec), level)
}

/// Integrates arbitrary initial data; Dirichlet runs need `reference` for boundary values.
pub fn integrate_from(
    run_id: &str,
    u0: Vec<f64>,
    grid: &Grid1D,
    config: &SimConfig,
    reference: Option<&SolutionSpec>,
    front_level: Option<f64>,
) -> Result<SimResult, SimError> {
    config.validate(grid)?;
    if u0.len() != grid.n {
        return Err(SimError::ConfigError(format!("initial field has {} values, grid has {}", u0.len(), grid.n)));
    }
    if let Some(spec) = reference {
        reject_singular(spec, grid, config)?;
    }
    run(run_id, u0, grid, config, reference, front_level)
}

/// A singular zone swept by any grid point during `[0, T]` makes the run meaningless.
fn reject_singular(spec: &SolutionSpec, grid: &Grid1D, config: &SimConfig) -> Result<(), SimError> {
    let corners = [
        spec.xi(grid.x_min, 0.0),
        spec.xi(grid.x_max, 0.0),
        spec.xi(grid.x_min, config.t_final),
        spec.xi(grid.x_max, config.t_final),
    ];
    let lo = corners.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = corners.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for z in spec.singular_zones() {
        if z.center + z.half_width >= lo && z.center - z.half_width <= hi {
            return Err(SimError::ConfigError(format!(
                "{} is singular near ξ = {} inside the simulated range [{lo}, {hi}]",
                spec.id, z.center
            )));
        }
    }
    Ok(())
}

fn reaction(u: f64) -> f64 {
    u - u * u * u
}

struct Stepper<'a> {
    grid: &'a Grid1D,
    boundary: Boundary,
    reference: Option<&'a SolutionSpec>,
    inv_h2: f64,
}

impl Stepper<'_> {
    /// Number of independent unknowns.
    fn len(&self) -> usize {
        match self.boundary {
            Boundary::Periodic => self.grid.n - 1,
            Boundary::ExactDirichlet => self.grid.n,
        }
    }

    fn boundary_values(&self, t: f64) -> Result<(f64, f64), SimError> {
        let spec = self.reference.expect("checked before stepping");
        Ok((spec.eval(self.grid.x_min, t)?, spec.eval(self.grid.x_max, t)?))
    }

    fn impose(&self, u: &mut [f64], t: f64) -> Result<(), SimError> {
        if self.boundary == Boundary::ExactDirichlet {
            let (a, b) = self.boundary_values(t)?;
            u[0] = a;
            *u.last_mut().unwrap() = b;
        }
        Ok(())
    }

    /// `u_xx + u − u³` on the unknowns; zero at Dirichlet endpoints.
    fn rhs(&self, u: &[f64], out: &mut [f64]) {
        let m = u.len();
        match self.boundary {
            Boundary::Periodic => {
                for i in 0..m {
                    let l = u[(i + m - 1) % m];
                    let r = u[(i + 1) % m];
                    out[i] = (l - 2.0 * u[i] + r) * self.inv_h2 + reaction(u[i]);
                }
            }
            Boundary::ExactDirichlet => {
                out[0] = 0.0;
                out[m - 1] = 0.0;
                for i in 1..m - 1 {
                    out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * self.inv_h2 + reaction(u[i]);
                }
            }
        }
    }

    fn rk4(&self, u: &mut [f64], t: f64, dt: f64) -> Result<(), SimError> {
        let m = u.len();
        let mut k1 = vec![0.0; m];
        self.rhs(u, &mut k1);
        let stage = |from: &[f64], frac: f64| -> Result<Vec<f64>, SimError> {
            let mut s: Vec<f64> = u.iter().zip(from).map(|(ui, ki)| ui + frac * dt * ki).collect();
            self.impose(&mut s, t + frac * dt)?;
            let mut k = vec![0.0; m];
            self.rhs(&s, &mut k);
            Ok(k)
        };
        let k2 = stage(&k1, 0.5)?;
        let k3 = stage(&k2, 0.5)?;
        let k4 = stage(&k3, 1.0)?;
        for i in 0..m {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        self.impose(u, t + dt)
    }

    /// Solves `(I − r·D) y = rhs` where `D` is the second-difference operator
    /// and `r = dt/(2h²)`; Dirichlet endpoints `rhs[0]`, `rhs[m−1]` are the
    /// prescribed values.
    fn implicit_solve(&self, r: f64, rhs: &[f64]) -> Vec<f64> {
        let (sub, diag) = (-r, 1.0 + 2.0 * r);
        match self.boundary {
            Boundary::Periodic => solve_cyclic(sub, diag, sub, rhs),
            Boundary::ExactDirichlet => {
                let m = rhs.len();
                let mut inner = rhs[1..m - 1].to_vec();
                inner[0] += r * rhs[0];
                *inner.last_mut().unwrap() += r * rhs[m - 1];
                let mut y = Vec::with_capacity(m);
                y.push(rhs[0]);
                y.extend(solve_tridiagonal(sub, diag, sub, &inner));
                y.push(rhs[m - 1]);
                y
            }
        }
    }

    /// `(I + r·D) u` on the unknowns; endpoints left for the caller.
    fn explicit_half(&self, r: f64, u: &[f64]) -> Vec<f64> {
        let m = u.len();
        let mut out = u.to_vec();
        match self.boundary {
            Boundary::Periodic => {
                for i in 0..m {
                    out[i] = u[i] + r * (u[(i + m - 1) % m] - 2.0 * u[i] + u[(i + 1) % m]);
                }
            }
            Boundary::ExactDirichlet => {
                for i in 1..m - 1 {
                    out[i] = u[i] + r * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
                }
            }
        }
        out
    }

    fn imex(&self, u: &mut Vec<f64>, t: f64, dt: f64) -> Result<(), SimError> {
        let r = 0.5 * dt * self.inv_h2;
        let base = self.explicit_half(r, u);
        let react0: Vec<f64> = u.iter().map(|&v| reaction(v)).collect();
        let ends = match self.boundary {
            Boundary::ExactDirichlet => Some(self.boundary_values(t + dt)?),
            Boundary::Periodic => None,
        };
        let assemble = |react: &dyn Fn(usize) -> f64| {
            let mut rhs: Vec<f64> = (0..u.len()).map(|i| base[i] + dt * react(i)).collect();
            if let Some((a, b)) = ends {
                rhs[0] = a;
                *rhs.last_mut().unwrap() = b;
            }
            rhs
        };
        let predictor = self.implicit_solve(r, &assemble(&|i| react0[i]));
        let corrected = self.implicit_solve(r, &assemble(&|i| 0.5 * (react0[i] + reaction(predictor[i]))));
        *u = corrected;
        Ok(())
    }
}

fn run(
    run_id: &str,
    u0: Vec<f64>,
    grid: &Grid1D,
    config: &SimConfig,
    reference: Option<&SolutionSpec>,
    front_level: Option<f64>,
) -> Result<SimResult, SimError> {
    if config.boundary == Boundary::ExactDirichlet && reference.is_none() {
        return Err(SimError::ConfigError("exact Dirichlet boundaries need a reference solution".into()));
    }
    let stepper = Stepper { grid, boundary: config.boundary, reference, inv_h2: 1.0 / (grid.h() * grid.h()) };
    let (steps, dt) = config.steps();
    let snap_steps: Vec<usize> = (0..config.snapshot_count)
        .map(|j| ((j * steps) as f64 / (config.snapshot_count - 1) as f64).round() as usize)
        .collect();

    let mut u = match config.boundary {
        Boundary::Periodic => u0[..stepper.len()].to_vec(),
        Boundary::ExactDirichlet => u0,
    };
    let full = |u: &[f64]| -> Vec<f64> {
        let mut f = u.to_vec();
        if config.boundary == Boundary::Periodic {
            f.push(u[0]);
        }
        f
    };

    let mut result = SimResult {
        run_id: run_id.to_string(),
        grid: *grid,
        config: *config,
        steps,
        snapshots: Vec::new(),
        linf_error: Vec::new(),
        l2_error: Vec::new(),
        front_trajectory: Vec::new(),
        measured_speed: None,
        energy_series: Vec::new(),
        max_energy_increase: f64::NEG_INFINITY,
    };
    let record = |u: &[f64], t: f64, result: &mut SimResult| -> Result<(), SimError> {
        let field = full(u);
        if let Some(spec) = reference {
            let (mut linf, mut sq) = (0.0f64, 0.0);
            for (i, v) in field.iter().enumerate() {
                let e = (v - spec.eval(grid.x(i), t)?).abs();
                linf = linf.max(e);
                sq += e * e;
            }
            result.linf_error.push(linf);
            result.l2_error.push((sq * grid.h()).sqrt());
        }
        if let Some(level) = front_level {
            if let Ok(x) = front_position(&field, grid, level) {
                result.front_trajectory.push((t, x));
            }
        }
        result.energy_series.push(energy(&field, grid, config.boundary));
        result.snapshots.push(Snapshot { t, u: field });
        Ok(())
    };

    record(&u, 0.0, &mut result)?;
    let mut next_snap = 1;
    let mut e_prev = energy(&full(&u), grid, config.boundary);
    for step in 0..steps {
        let t = step as f64 * dt;
        match config.scheme {
            Scheme::ExplicitRk4Mol => stepper.rk4(&mut u, t, dt)?,
            Scheme::ImexCn => stepper.imex(&mut u, t, dt)?,
        }
        if u.iter().any(|v| !(v.abs() <= BLOW_UP)) {
            return Err(SimError::UnstableStep { t: t + dt, step: step + 1 });
        }
        let e = energy(&full(&u), grid, config.boundary);
        result.max_energy_increase = result.max_energy_increase.max(e - e_prev);
        e_prev = e;
        while next_snap < snap_steps.len() && snap_steps[next_snap] == step + 1 {
            let t_snap = if step + 1 == steps { config.t_final } else { (step + 1) as f64 * dt };
            record(&u, t_snap, &mut result)?;
            next_snap += 1;
        }
    }
    result.measured_speed = least_squares_speed(&result.front_trajectory).ok();
    Ok(result)
}

/// `x,u` rows for one snapshot.
pub fn snapshot_csv(grid: &Grid1D, snapshot: &Snapshot) -> String {
    let mut out = String::from("x,u\n");
    for (i, v) in snapshot.u.iter().enumerate() {
        out.push_str(&format!("{:.16e},{:.16e}\n", grid.x(i), v));
    }
    out
}

/// `t,x_front` rows.
pub fn trajectory_csv(trajectory: &[(f64, f64)]) -> String {
    let mut out = String::from("t,x_front\n");
    for (t, x) in trajectory {
        out.push_str(&format!("{t:.16e},{x:.16e}\n"));
    }
    out
}
