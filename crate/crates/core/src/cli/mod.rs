//! The `mse` command line: derivation trace, catalog table, audit, profile
//! data, simulation and refinement study. Exit codes: 0 when every check
//! passes, 1 when a check fails, 2 for usage errors.

mod output;
mod table;

pub use output::{write_atomic, RunManifest};
pub use table::{read_rows, write_rows, CatalogRow};

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::json;

use crate::mse_engine::{derivation_trace, TraceK};
use crate::pde_sim::{self, Boundary, Grid1D, Scheme, SimConfig, SimError};
use crate::solutions::{enumerate_catalog, lookup, SolutionError, SolutionSpec};
use crate::symkernel::Rational;
use crate::verifier::{classify_branches, GridSpec, DEFAULT_THRESHOLD};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "mse", version, about = "Cahn-Allen traveling waves: exact derivation, catalog, verification and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    Rk4,
    Imex,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::Rk4 => Scheme::ExplicitRk4Mol,
            SchemeArg::Imex => Scheme::ImexCn,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BoundaryArg {
    Dirichlet,
    Periodic,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the symbolic derivation; exit 1 if a structural check fails.
    Derive {
        /// `symbolic`, or an exact value such as `1`, `0.5` or `3/2`.
        #[arg(long, default_value = "symbolic", allow_hyphen_values = true)]
        k: String,
        /// Also write the trace to `<out>/derive_trace.txt`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write `<out>/catalog.csv`, validity from the standard-grid audit.
    Catalog {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        k: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Audit every entry; exit 1 unless each equation family has a valid entry.
    Verify {
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        /// xmin,xmax,nx,tmin,tmax,nt
        #[arg(long, default_value = "-10,10,201,0,1,11", allow_hyphen_values = true)]
        grid: String,
        /// Audit the rows of a catalog CSV instead of the built-in catalog;
        /// rows flagged valid must still verify.
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Wave number of the built-in catalog.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        k: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Write profile CSVs `<entry>_t<index>.csv` ("x,u") for each time.
    Eval {
        /// Catalog id, e.g. eq20+ or eq20++k1.
        #[arg(long)]
        entry: String,
        /// Comma-separated times.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        t: String,
        /// xmin,xmax,n
        #[arg(long, default_value = "-10,10,201", allow_hyphen_values = true)]
        x: String,
        /// Wave number when the id has no k suffix.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        k: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Integrate the PDE from the entry at t = 0 and export snapshots,
    /// front trajectory and error norms.
    Simulate {
        #[arg(long)]
        entry: String,
        /// xmin,xmax,n
        #[arg(long, default_value = "-20,20,801", allow_hyphen_values = true)]
        grid: String,
        #[arg(long, value_enum, default_value = "rk4")]
        scheme: SchemeArg,
        #[arg(long = "T", default_value_t = 1.0)]
        t_final: f64,
        /// Time step; defaults to 0.2·h² (rk4) or h/10 (imex).
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, value_enum, default_value = "dirichlet")]
        boundary: BoundaryArg,
        #[arg(long, default_value_t = 11)]
        snapshots: usize,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        k: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Grid-refinement study; exit 1 if the observed order leaves 2 ± 0.3.
    Convergence {
        #[arg(long)]
        entry: String,
        /// Number of grids, each halving the spacing.
        #[arg(long, default_value_t = 4)]
        levels: usize,
        /// Coarsest grid: xmin,xmax,n
        #[arg(long, default_value = "-20,20,101", allow_hyphen_values = true)]
        grid: String,
        #[arg(long, value_enum, default_value = "rk4")]
        scheme: SchemeArg,
        #[arg(long = "T", default_value_t = 1.0)]
        t_final: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        k: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Check(String),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Check(format!("i/o error: {e}"))
    }
}

impl From<SolutionError> for Failure {
    fn from(e: SolutionError) -> Failure {
        Failure::Usage(e.to_string())
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Failure {
        match e {
            SimError::ConfigError(_) | SimError::Solution(_) => Failure::Usage(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

/// Runs one invocation and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            EXIT_CHECK_FAILED
        }
    }
}

fn dispatch(command: Command) -> Result<bool, Failure> {
    match command {
        Command::Derive { k, out } => derive(&k, out.as_deref()),
        Command::Catalog { k, out } => catalog(k, &out),
        Command::Verify { threshold, grid, catalog, k, out } => verify(threshold, &grid, catalog.as_deref(), k, &out),
        Command::Eval { entry, t, x, k, out } => eval(&entry, &t, &x, k, &out),
        Command::Simulate { entry, grid, scheme, t_final, dt, boundary, snapshots, k, out } => {
            simulate(&entry, &grid, scheme.into(), t_final, dt, boundary, snapshots, k, &out)
        }
        Command::Convergence { entry, levels, grid, scheme, t_final, k, out } => {
            convergence(&entry, levels, &grid, scheme.into(), t_final, k, &out)
        }
    }
}

/// Parses `p/q`, an integer, or a decimal with optional exponent, exactly.
pub fn parse_exact_rational(text: &str) -> Option<Rational> {
    let s = text.trim();
    if s.contains('/') {
        return Rational::from_str(s).ok();
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Some(value)
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("{what}: '{p}' is not a number"))))
        .collect()
}

fn parse_count(v: f64, what: &str) -> Result<usize, Failure> {
    if v >= 1.0 && v.fract() == 0.0 {
        Ok(v as usize)
    } else {
        Err(Failure::Usage(format!("{what}: point count {v} must be a positive integer")))
    }
}

fn parse_line(text: &str) -> Result<Grid1D, Failure> {
    match parse_list(text, "grid")?.as_slice() {
        &[a, b, n] => Grid1D::new(a, b, parse_count(n, "grid")?).map_err(Failure::from),
        _ => Err(Failure::Usage(format!("grid '{text}' must be xmin,xmax,n"))),
    }
}

fn parse_grid(text: &str) -> Result<GridSpec, Failure> {
    match parse_list(text, "grid")?.as_slice() {
        &[x0, x1, nx, t0, t1, nt] => {
            GridSpec::new((x0, x1), (t0, t1), parse_count(nx, "grid")?, parse_count(nt, "grid")?)
                .map_err(|e| Failure::Usage(e.to_string()))
        }
        _ => Err(Failure::Usage(format!("grid '{text}' must be xmin,xmax,nx,tmin,tmax,nt"))),
    }
}

fn entry(id: &str, k: f64) -> Result<SolutionSpec, Failure> {
    if !(k.is_finite() && k != 0.0) {
        return Err(Failure::Usage(format!("k = {k} must be finite and nonzero")));
    }
    Ok(lookup(id, k)?)
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn derive(k: &str, out: Option<&Path>) -> Result<bool, Failure> {
    let trace_k = if k == "symbolic" {
        TraceK::Symbolic
    } else {
        let v = parse_exact_rational(k).ok_or_else(|| Failure::Usage(format!("--k '{k}' is neither 'symbolic' nor a number")))?;
        if v.is_zero() {
            return Err(Failure::Usage("--k must be nonzero".into()));
        }
        TraceK::Value(v)
    };
    let trace = derivation_trace(&trace_k).map_err(|e| Failure::Check(e.to_string()))?;
    print!("{}", trace.text());
    if let Some(dir) = out {
        write_atomic(dir, "derive_trace.txt", &trace.text())?;
        let mut m = RunManifest::new("derive");
        m.parameter("k", json!(k));
        m.output("derive_trace.txt");
        m.result("checks_passed", json!(trace.passed()));
        m.write(dir)?;
    }
    for c in trace.checks.iter().filter(|c| !c.passed) {
        eprintln!("check failed: {}", c.name);
    }
    Ok(trace.passed())
}

fn catalog(k: f64, out: &Path) -> Result<bool, Failure> {
    if !(k.is_finite() && k != 0.0) {
        return Err(Failure::Usage(format!("k = {k} must be finite and nonzero")));
    }
    let cat = enumerate_catalog(k);
    let audit =
        classify_branches(&cat, &GridSpec::standard(), DEFAULT_THRESHOLD).map_err(|e| Failure::Check(e.to_string()))?;
    let rows: Vec<CatalogRow> = cat.iter().zip(&audit.rows).map(|(s, r)| CatalogRow::from_spec(s, r.valid)).collect();
    let text = write_rows(&rows).map_err(|e| Failure::Check(e.to_string()))?;
    write_atomic(out, "catalog.csv", &text)?;
    let mut m = RunManifest::new("catalog");
    m.parameter("k", json!(k));
    m.parameter("grid", json!(GridSpec::standard()));
    m.parameter("threshold", json!(DEFAULT_THRESHOLD));
    m.output("catalog.csv");
    m.result("entries", json!(rows.len()));
    m.result("valid_entries", json!(rows.iter().filter(|r| r.valid).count()));
    m.write(out)?;
    println!("{} entries, {} valid", rows.len(), rows.iter().filter(|r| r.valid).count());
    Ok(true)
}

fn verify(threshold: f64, grid: &str, catalog: Option<&Path>, k: f64, out: &Path) -> Result<bool, Failure> {
    if !(threshold > 0.0) {
        return Err(Failure::Usage(format!("threshold {threshold} must be positive")));
    }
    let grid = parse_grid(grid)?;
    let (specs, flagged) = match catalog {
        None => (enumerate_catalog(k), Vec::new()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            let rows = read_rows(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let specs = rows.iter().map(|r| r.to_spec()).collect::<Result<Vec<_>, _>>()?;
            let flagged = rows.iter().filter(|r| r.valid).map(|r| r.id.clone()).collect();
            (specs, flagged)
        }
    };
    let audit = classify_branches(&specs, &grid, threshold).map_err(|e| Failure::Check(e.to_string()))?;
    let json = serde_json::to_string_pretty(&audit).expect("audit serializes") + "\n";
    write_atomic(out, "audit.json", &json)?;

    let mut ok = true;
    for g in &audit.groups {
        println!("{:<10} {:>3}/{:<3} valid  {}", g.label, g.valid, g.entries, if g.certified { "certified" } else { "NOT certified" });
        if !g.certified {
            eprintln!("family {}: no valid entry", g.label);
            ok = false;
        }
    }
    let mut broken = Vec::new();
    for id in &flagged {
        let row = audit.row(id).expect("every catalog row is audited");
        if !row.valid {
            eprintln!(
                "{id}: flagged valid but PDE residual {:.3e}, ODE residual {:.3e} (threshold {threshold:e})",
                row.pde_max_abs, row.ode_max_abs
            );
            broken.push(id.clone());
            ok = false;
        }
    }
    let mut m = RunManifest::new("verify");
    m.parameter("threshold", json!(threshold));
    m.parameter("grid", json!(grid));
    match catalog {
        Some(p) => m.parameter("catalog", json!(p.display().to_string())),
        None => m.parameter("k", json!(k)),
    }
    m.output("audit.json");
    m.result("all_groups_certified", json!(audit.all_groups_certified()));
    m.result("flagged_valid_failures", json!(broken));
    m.write(out)?;
    Ok(ok)
}

fn eval(id: &str, times: &str, x: &str, k: f64, out: &Path) -> Result<bool, Failure> {
    let spec = entry(id, k)?;
    let times = parse_list(times, "--t")?;
    let xs = parse_line(x)?;
    let mut m = RunManifest::new("eval");
    m.parameter("entry", json!(spec.id));
    m.parameter("k", json!(spec.k));
    m.parameter("t", json!(times));
    m.parameter("x", json!(xs));
    for (j, &t) in times.iter().enumerate() {
        let mut csv = String::from("x,u\n");
        let mut omitted = Vec::new();
        for xv in xs.points() {
            match spec.eval(xv, t) {
                Ok(u) if u.is_finite() => csv.push_str(&format!("{},{}\n", num(xv), num(u))),
                Ok(_) | Err(SolutionError::SingularEvaluation { .. }) => omitted.push(xv),
                Err(e) => return Err(e.into()),
            }
        }
        let name = format!("{}_t{j}.csv", spec.id);
        write_atomic(out, &name, &csv)?;
        m.output(&name);
        if let (Some(first), Some(last)) = (omitted.first(), omitted.last()) {
            m.note(&format!(
                "{name}: omitted {} rows in the singular zone, x in [{}, {}]",
                omitted.len(),
                num(*first),
                num(*last)
            ));
        }
    }
    m.write(out)?;
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    id: &str,
    grid: &str,
    scheme: Scheme,
    t_final: f64,
    dt: Option<f64>,
    boundary: BoundaryArg,
    snapshots: usize,
    k: f64,
    out: &Path,
) -> Result<bool, Failure> {
    let spec = entry(id, k)?;
    let g = parse_line(grid)?;
    let dt = dt.unwrap_or(match scheme {
        Scheme::ExplicitRk4Mol => pde_sim::STABILITY_FACTOR * g.h() * g.h(),
        Scheme::ImexCn => 0.1 * g.h(),
    });
    let boundary = match boundary {
        BoundaryArg::Dirichlet => Boundary::ExactDirichlet,
        BoundaryArg::Periodic => Boundary::Periodic,
    };
    let config = SimConfig { dt, t_final, boundary, scheme, snapshot_count: snapshots };
    let r = pde_sim::integrate(&spec, &g, &config)?;

    let mut m = RunManifest::new("simulate");
    m.parameter("entry", json!(spec.id));
    m.parameter("k", json!(spec.k));
    m.parameter("grid", json!(g));
    m.parameter("config", json!(config));
    for (j, s) in r.snapshots.iter().enumerate() {
        let name = format!("{}_t{j}.csv", r.run_id);
        write_atomic(out, &name, &pde_sim::snapshot_csv(&g, s))?;
        m.output(&name);
    }
    let front = format!("{}_front.csv", r.run_id);
    write_atomic(out, &front, &pde_sim::trajectory_csv(&r.front_trajectory))?;
    m.output(&front);
    let mut norms = String::from("t,linf_error,l2_error,energy\n");
    for (j, s) in r.snapshots.iter().enumerate() {
        norms.push_str(&format!("{},{},{},{}\n", num(s.t), num(r.linf_error[j]), num(r.l2_error[j]), num(r.energy_series[j])));
    }
    let errors = format!("{}_errors.csv", r.run_id);
    write_atomic(out, &errors, &norms)?;
    m.output(&errors);
    m.result("steps", json!(r.steps));
    m.result("dt", json!(config.steps().1));
    m.result("measured_speed", json!(r.measured_speed));
    m.result("expected_speed", json!(-spec.w() / spec.k));
    m.result("final_linf_error", json!(r.linf_error.last()));
    m.write(out)?;
    println!(
        "{}: {} steps, final linf error {:.3e}, speed {} (expected {:.7})",
        r.run_id,
        r.steps,
        r.linf_error.last().unwrap(),
        r.measured_speed.map(|s| format!("{s:.7}")).unwrap_or_else(|| "n/a".into()),
        -spec.w() / spec.k
    );
    Ok(true)
}

fn convergence(
    id: &str,
    levels: usize,
    grid: &str,
    scheme: Scheme,
    t_final: f64,
    k: f64,
    out: &Path,
) -> Result<bool, Failure> {
    if levels < 3 {
        return Err(Failure::Usage(format!("--levels {levels}: need at least 3")));
    }
    let spec = entry(id, k)?;
    let base = parse_line(grid)?;
    let template = SimConfig { scheme, ..SimConfig::explicit_default(&base, t_final) };
    let table = pde_sim::convergence_study(&spec, &base.refinement_sequence(levels), &template)?;
    let mut csv = String::from("n,h,dt,linf_error,l2_error,order\n");
    for (i, row) in table.rows.iter().enumerate() {
        let order = if i == 0 { String::new() } else { num(table.pairwise_orders[i - 1]) };
        csv.push_str(&format!("{},{},{},{},{},{order}\n", row.n, num(row.h), num(row.dt), num(row.linf_error), num(row.l2_error)));
    }
    let name = format!("{}_convergence.csv", spec.id);
    write_atomic(out, &name, &csv)?;
    let in_band = table.observed_order.map(|p| (p - 2.0).abs() <= 0.3).unwrap_or(true);
    let mut m = RunManifest::new("convergence");
    m.parameter("entry", json!(spec.id));
    m.parameter("k", json!(spec.k));
    m.parameter("levels", json!(levels));
    m.parameter("grid", json!(base));
    m.parameter("config", json!(template));
    m.output(&name);
    m.result("observed_order", json!(table.observed_order));
    m.write(out)?;
    match table.observed_order {
        Some(p) => println!("{}: observed order {p:.3}", spec.id),
        None => println!("{}: zero error at every resolution", spec.id),
    }
    if !in_band {
        eprintln!("{}: observed order outside 2 ± 0.3", spec.id);
    }
    Ok(in_band)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn exact_decimal_parsing() {
        let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
        assert_eq!(parse_exact_rational("1"), Some(Rational::one()));
        assert_eq!(parse_exact_rational("0.5"), Some(r(1, 2)));
        assert_eq!(parse_exact_rational("-1.25"), Some(r(-5, 4)));
        assert_eq!(parse_exact_rational("3/2"), Some(r(3, 2)));
        assert_eq!(parse_exact_rational("2.5e-1"), Some(r(1, 4)));
        assert_eq!(parse_exact_rational("1e2"), Some(r(100, 1)));
        assert_eq!(parse_exact_rational(".5"), Some(r(1, 2)));
        for bad in ["", ".", "abc", "1..2", "1e", "--1"] {
            assert_eq!(parse_exact_rational(bad), None, "{bad}");
        }
    }

    #[test]
    fn grid_arguments() {
        assert_eq!(parse_grid("-10,10,201,0,1,11").unwrap(), GridSpec::standard());
        assert!(matches!(parse_grid("1,2,3"), Err(Failure::Usage(_))));
        assert!(matches!(parse_line("0,1,2.5"), Err(Failure::Usage(_))));
        assert!(matches!(parse_line("0,1,4"), Err(Failure::Usage(_))));
        assert_eq!(parse_line("-20,20,801").unwrap().h(), 0.05);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["mse", "bogus"]), EXIT_USAGE);
        assert_eq!(run(["mse", "eval"]), EXIT_USAGE);
        assert_eq!(run(["mse", "derive", "--k", "zero"]), EXIT_USAGE);
        assert_eq!(run(["mse", "--help"]), EXIT_OK);
    }
}
