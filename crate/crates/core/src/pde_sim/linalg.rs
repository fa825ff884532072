//! Constant-coefficient tridiagonal solves.

/// Solves `sub·y[i−1] + diag·y[i] + sup·y[i+1] = rhs[i]` with `y[−1] = y[n] = 0`
/// (Thomas algorithm).
pub fn solve_tridiagonal(sub: f64, diag: f64, sup: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    if n == 0 {
        return d;
    }
    c[0] = sup / diag;
    d[0] = rhs[0] / diag;
    for i in 1..n {
        let m = diag - sub * c[i - 1];
        c[i] = sup / m;
        d[i] = (rhs[i] - sub * d[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    d
}

/// The cyclic version: additionally `sub` at (0, n−1) and `sup` at (n−1, 0).
/// Solved by Sherman-Morrison on top of two Thomas sweeps.
pub fn solve_cyclic(sub: f64, diag: f64, sup: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    assert!(n >= 3, "cyclic system needs at least 3 unknowns");
    // A = T + u vᵀ with u = (γ, 0, …, 0, sup), v = (1, 0, …, 0, sub/γ)
    let gamma = -diag;
    let mut b = vec![diag; n];
    b[0] = diag - gamma;
    b[n - 1] = diag - sup * sub / gamma;
    let solve = |r: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        c[0] = sup / b[0];
        d[0] = r[0] / b[0];
        for i in 1..n {
            let m = b[i] - sub * c[i - 1];
            c[i] = sup / m;
            d[i] = (r[i] - sub * d[i - 1]) / m;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        d
    };
    let y = solve(rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = sup;
    let z = solve(&u);
    let fact = (y[0] + sub * y[n - 1] / gamma) / (1.0 + z[0] + sub * z[n - 1] / gamma);
    y.iter().zip(&z).map(|(yi, zi)| yi - fact * zi).collect()
}
