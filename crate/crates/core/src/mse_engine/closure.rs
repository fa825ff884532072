//! Closure of the grade equations for `n = 1`: the A₀ and A₁ roots, the
//! exponent ratios `λ = S''/S'` (grade 2) and `μ = S'''/S''` (grade 1), the
//! speed roots of `λ = μ`, and the integrated forms of S.

use std::collections::BTreeMap;
use std::fmt;

use super::{CoefficientSystem, EngineError};
use crate::symkernel::{bind, Atom, Bindings, Radical2, Ratio, SymExpr, Var};
use crate::Sign;

/// One nondegenerate solution `(A₀, A₁ = (a1_over_k)·k, w = (w_over_k)·k)`.
///
/// `λ = lambda_k / k` and `μ = mu_k / k`; the branch invariant is
/// `lambda_k == mu_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureBranch {
    pub a0: Radical2,
    pub s1: Sign,
    pub a1_over_k: Radical2,
    pub w_over_k: Radical2,
    pub lambda_k: Radical2,
    pub mu_k: Radical2,
    /// `N / k²` with `N = 3k²(3A₀² − 1) + w(w − 3A₀A₁)`.
    pub n_over_k2: Radical2,
}

fn k() -> SymExpr {
    SymExpr::atom(Atom::K)
}

fn scaled_k(c: &Radical2) -> SymExpr {
    k().scale(c)
}

impl ClosureBranch {
    pub fn sw(&self) -> Sign {
        if self.w_over_k.signum() < 0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn a1(&self) -> SymExpr {
        scaled_k(&self.a1_over_k)
    }

    pub fn w(&self) -> SymExpr {
        scaled_k(&self.w_over_k)
    }

    /// `(w − 3A₀A₁)/k`.
    pub fn drift_over_k(&self) -> Radical2 {
        &self.w_over_k - &(&(&Radical2::from_int(3) * &self.a0) * &self.a1_over_k)
    }

    pub fn bindings(&self) -> Bindings {
        bind([
            (Atom::A(0), SymExpr::constant(self.a0.clone())),
            (Atom::A(1), self.a1()),
            (Atom::W, self.w()),
        ])
    }

    /// Each grade equation after substituting the branch values and
    /// eliminating `S''' = μS''`, `S'' = λS'`. All vanish for a true branch.
    pub fn residuals(&self, system: &CoefficientSystem) -> Result<BTreeMap<u32, SymExpr>, EngineError> {
        residuals_at(system, &self.bindings(), &self.lambda_k, &self.mu_k)
    }

    pub fn label(&self) -> String {
        format!("A0 = {}, A1 = {}, w = {}", self.a0, self.a1(), self.w())
    }
}

fn residuals_at(
    system: &CoefficientSystem,
    b: &Bindings,
    lambda_k: &Radical2,
    mu_k: &Radical2,
) -> Result<BTreeMap<u32, SymExpr>, EngineError> {
    let s1 = SymExpr::sderiv(1);
    let s2 = SymExpr::sderiv(2);
    let mut out = BTreeMap::new();
    for (g, e) in &system.equations {
        let r = e
            .substitute(b)?
            .replace_sderiv(3, &s2.scale(mu_k), &k())
            .replace_sderiv(2, &s1.scale(lambda_k), &k());
        out.insert(*g, r);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegeneracyReason {
    /// `w = 0`: a standing profile, outside the traveling-wave catalog.
    StationaryFrame,
    /// `w − 3A₀A₁ = 0`
    VanishingDrift,
    /// `λ = 0`
    VanishingRate,
    /// `3k²(3A₀² − 1) + w(w − 3A₀A₁) = 0`
    VanishingDenominator,
}

impl fmt::Display for DegeneracyReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DegeneracyReason::StationaryFrame => "stationary frame",
            DegeneracyReason::VanishingDrift => "w - 3*A0*A1 = 0",
            DegeneracyReason::VanishingRate => "lambda = 0",
            DegeneracyReason::VanishingDenominator => "3*k^2*(3*A0^2 - 1) + w*(w - 3*A0*A1) = 0",
        })
    }
}

/// A root of `λ = μ` that fails nondegeneracy; kept for the trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegenerateRoot {
    pub a0: Radical2,
    pub s1: Sign,
    pub a1_over_k: Radical2,
    pub w_over_k: Radical2,
    pub reason: DegeneracyReason,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureSolution {
    /// Roots of the grade-0 equation, in solve order.
    pub a0_roots: Vec<Radical2>,
    /// Nonzero roots of the grade-3 equation, as multiples of k.
    pub a1_over_k_roots: Vec<Radical2>,
    /// Whether the grade-3 equation also admits the trivial `A₁ = 0`.
    pub trivial_a1: bool,
    pub lambda: Ratio,
    pub mu: Ratio,
    /// Numerator of `λ − μ`.
    pub constraint: SymExpr,
    /// The constraint per `(A₀, A₁)`, as a polynomial in `w, k`.
    pub speed_polynomials: Vec<(Radical2, Radical2, SymExpr)>,
    pub branches: Vec<ClosureBranch>,
    pub degenerate: Vec<DegenerateRoot>,
}

fn atoms_other_than(e: &SymExpr, allowed: &[Var]) -> bool {
    e.terms().any(|(key, _)| {
        key.sym_powers().iter().any(|(a, _)| !allowed.contains(&Var::Atom(*a)))
            || key.deriv_powers().iter().any(|(j, _)| !allowed.contains(&Var::SDeriv(*j)))
            || key.s_grade() > 0
    })
}

/// Real roots of a univariate polynomial of degree ≤ 2 after removing
/// monomial content: `0` first (if the content carries the atom), then the
/// remaining roots in descending order.
fn univariate_roots(e: &SymExpr, atom: Atom) -> Result<Vec<Radical2>, EngineError> {
    let (content, rest) = e.split_content();
    let mut roots = Vec::new();
    if content.power(Var::Atom(atom)) > 0 {
        roots.push(Radical2::zero());
    }
    let c = rest
        .univariate_coeffs(atom)
        .ok_or_else(|| EngineError::Unsupported(format!("{rest} is not univariate in {atom}")))?;
    match c.len() - 1 {
        0 => {}
        1 => roots.push(-&(&c[0] / &c[1])),
        2 => {
            let disc = &(&c[1] * &c[1]) - &(&(&Radical2::from_int(4) * &c[2]) * &c[0]);
            if disc.signum() >= 0 {
                let sq = disc
                    .sqrt()
                    .ok_or_else(|| EngineError::NoExactRoot(format!("{rest} = 0")))?;
                let two_a = &Radical2::from_int(2) * &c[2];
                let mut pair = [&(&-&c[1] + &sq) / &two_a, &(&-&c[1] - &sq) / &two_a];
                pair.sort_by(|a, b| b.cmp(a));
                roots.push(pair[0].clone());
                if pair[1] != pair[0] {
                    roots.push(pair[1].clone());
                }
            }
        }
        d => return Err(EngineError::Unsupported(format!("degree {d} in {atom}: {rest}"))),
    }
    Ok(roots)
}

/// Roots of `atom/k` for a polynomial homogeneous in `(atom, k)`.
fn ratio_roots(e: &SymExpr, atom: Atom) -> Result<Vec<Radical2>, EngineError> {
    if e.homogeneous_degree(&[atom, Atom::K]).is_none() {
        return Err(EngineError::Unsupported(format!("{e} is not homogeneous in {atom}, k")));
    }
    let dehom = e.substitute(&bind([(Atom::K, SymExpr::one())]))?;
    univariate_roots(&dehom, atom)
}

/// Solves a grade equation linear in `S⁽ʲ⁾` for `S⁽ʲ⁾ / S⁽ʲ⁻¹⁾`.
fn linear_ratio(e: &SymExpr, j: u32) -> Result<Ratio, EngineError> {
    let var = Var::SDeriv(j);
    if e.degree_in(var) != 1 {
        return Err(EngineError::Unsupported(format!("{e} is not linear in S^({j})")));
    }
    let alpha = e.coefficient(var, 1);
    let beta = e.coefficient(var, 0);
    Ok(Ratio::new(beta.neg(), alpha.mul(&SymExpr::sderiv(j - 1)))?)
}

fn free_of_s(r: &Ratio) -> bool {
    let s_free = |e: &SymExpr| e.terms().all(|(key, _)| key.deriv_powers().is_empty() && key.s_grade() == 0);
    s_free(&r.num) && s_free(&r.den)
}

/// `r` with `A₀, A₁, w, k` bound to numbers and `k = 1`, i.e. `r·k` for a
/// ratio homogeneous of degree −1.
fn value_times_k(r: &Ratio, a0: &Radical2, a1_over_k: &Radical2, w_over_k: &Radical2) -> Option<Radical2> {
    let b = bind([
        (Atom::A(0), a0.clone()),
        (Atom::A(1), a1_over_k.clone()),
        (Atom::W, w_over_k.clone()),
        (Atom::K, Radical2::one()),
    ]);
    let num = r.num.substitute(&b).ok()?.as_constant()?;
    let den = r.den.substitute(&b).ok()?.as_constant()?;
    num.checked_div(&den)
}

fn degree_minus_one(r: &Ratio) -> bool {
    let scale = [Atom::K, Atom::W, Atom::A(1)];
    match (r.num.homogeneous_degree(&scale), r.den.homogeneous_degree(&scale)) {
        (Some(n), Some(d)) => d == n + 1,
        _ => false,
    }
}

pub fn solve_closure(system: &CoefficientSystem) -> Result<ClosureSolution, EngineError> {
    if system.n != 1 {
        return Err(EngineError::Unsupported(format!("closure requires n = 1, got n = {}", system.n)));
    }
    let grades: Vec<u32> = system.equations.keys().copied().collect();
    if grades != [0, 1, 2, 3] {
        return Err(EngineError::Unsupported(format!("expected grades 0..=3, got {grades:?}")));
    }
    let eq = |g: u32| &system.equations[&g];

    // grade 0: pure condition on A0
    if atoms_other_than(eq(0), &[Var::Atom(Atom::A(0))]) {
        return Err(EngineError::Unsupported(format!("grade 0 is not a condition on A0: {}", eq(0))));
    }
    let a0_roots = univariate_roots(eq(0), Atom::A(0))?;

    // grade 3: A1 times a homogeneous condition in (A1, k), times S'^3
    let allowed3 = [Var::Atom(Atom::A(1)), Var::Atom(Atom::K), Var::SDeriv(1)];
    if atoms_other_than(eq(3), &allowed3) {
        return Err(EngineError::Unsupported(format!("grade 3 depends on more than A1, k: {}", eq(3))));
    }
    let (content3, rest3) = eq(3).split_content();
    let trivial_a1 = content3.power(Var::Atom(Atom::A(1))) > 0;
    let a1_over_k_roots: Vec<Radical2> =
        ratio_roots(&rest3, Atom::A(1))?.into_iter().filter(|r| !r.is_zero()).collect();

    let lambda = linear_ratio(eq(2), 2)?;
    let mu_raw = linear_ratio(eq(1), 3)?;
    if !free_of_s(&lambda) {
        return Err(EngineError::Unsupported(format!("S''/S' is not constant: {lambda}")));
    }
    let mu = mu_raw.replace_sderiv(1, &SymExpr::sderiv(2).mul(&lambda.den), &lambda.num);
    if !free_of_s(&mu) {
        return Err(EngineError::Unsupported(format!("S'''/S'' is not constant: {mu}")));
    }
    if !degree_minus_one(&lambda) || !degree_minus_one(&mu) {
        return Err(EngineError::Unsupported("exponent ratios do not scale as 1/k".into()));
    }
    let constraint = lambda.sub(&mu).num;

    let mut speed_polynomials = Vec::new();
    let mut branches = Vec::new();
    let mut degenerate = Vec::new();
    for a0 in &a0_roots {
        for a1 in &a1_over_k_roots {
            let b = bind([(Atom::A(0), SymExpr::constant(a0.clone())), (Atom::A(1), scaled_k(a1))]);
            let poly = constraint.substitute(&b)?;
            if poly.is_zero() {
                return Err(EngineError::Unsupported(format!("speed undetermined at A0 = {a0}")));
            }
            let s1 = if a1.signum() < 0 { Sign::Minus } else { Sign::Plus };
            for w in ratio_roots(&poly, Atom::W)? {
                let three = Radical2::from_int(3);
                let drift = &w - &(&(&three * a0) * a1);
                let lambda_k = value_times_k(&lambda, a0, a1, &w);
                let mu_k = value_times_k(&mu, a0, a1, &w);
                let reason = if w.is_zero() {
                    Some(DegeneracyReason::StationaryFrame)
                } else if drift.is_zero() {
                    Some(DegeneracyReason::VanishingDrift)
                } else if lambda_k.as_ref().map(|l| l.is_zero()).unwrap_or(true) {
                    Some(DegeneracyReason::VanishingRate)
                } else if mu_k.as_ref().map(|m| m.is_zero()).unwrap_or(true) {
                    Some(DegeneracyReason::VanishingDenominator)
                } else {
                    None
                };
                if let Some(reason) = reason {
                    degenerate.push(DegenerateRoot {
                        a0: a0.clone(),
                        s1,
                        a1_over_k: a1.clone(),
                        w_over_k: w,
                        reason,
                    });
                    continue;
                }
                let (lambda_k, mu_k) = (lambda_k.unwrap(), mu_k.unwrap());
                let n_over_k2 = &(&three * &lambda_k) * &mu_k;
                let branch = ClosureBranch {
                    a0: a0.clone(),
                    s1,
                    a1_over_k: a1.clone(),
                    w_over_k: w,
                    lambda_k,
                    mu_k,
                    n_over_k2,
                };
                if branch.lambda_k != branch.mu_k {
                    return Err(EngineError::InconsistentBranch(format!("{}: lambda != mu", branch.label())));
                }
                if let Some((g, r)) = branch.residuals(system)?.into_iter().find(|(_, r)| !r.is_zero()) {
                    return Err(EngineError::InconsistentBranch(format!(
                        "{}: grade {g} leaves {r}",
                        branch.label()
                    )));
                }
                branches.push(branch);
            }
            speed_polynomials.push((a0.clone(), a1.clone(), poly));
        }
    }
    Ok(ClosureSolution {
        a0_roots,
        a1_over_k_roots,
        trivial_a1,
        lambda,
        mu,
        constraint,
        speed_polynomials,
        branches,
        degenerate,
    })
}

/// `amplitude · exp(rate_k · ξ / k) + offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpForm {
    pub amplitude: SymExpr,
    pub rate_k: Radical2,
    pub offset: SymExpr,
}

impl ExpForm {
    /// ξ-derivative, or `None` when the amplitude is not divisible by k.
    pub fn diff_xi(&self) -> Option<ExpForm> {
        let amplitude = self.amplitude.scale(&self.rate_k).div_exact(&k())?;
        Some(ExpForm { amplitude, rate_k: self.rate_k.clone(), offset: SymExpr::zero() })
    }

    pub fn substitute(&self, b: &Bindings) -> Result<ExpForm, EngineError> {
        Ok(ExpForm {
            amplitude: self.amplitude.substitute(b)?,
            rate_k: self.rate_k.clone(),
            offset: self.offset.substitute(b)?,
        })
    }

    pub fn eval_f64(&self, k: f64, c1: f64, c2: f64, xi: f64) -> Option<f64> {
        let v = |a: Atom| match a {
            Atom::K => Some(k),
            Atom::C1 => Some(c1),
            Atom::C2 => Some(c2),
            _ => None,
        };
        Some(self.amplitude.eval_f64(&v)? * (self.rate_k.to_f64() * xi / k).exp() + self.offset.eval_f64(&v)?)
    }
}

impl fmt::Display for ExpForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let amp = if self.amplitude.len() > 1 { format!("({})", self.amplitude) } else { self.amplitude.to_string() };
        write!(f, "{amp}*exp({}*xi/k)", self.rate_k)?;
        if !self.offset.is_zero() {
            write!(f, " + {}", self.offset)?;
        }
        Ok(())
    }
}

/// `S''`, `S'` and `S` for one branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureForms {
    pub s_second: ExpForm,
    pub s_prime: ExpForm,
    pub s: ExpForm,
}

pub fn integrate_closure(branch: &ClosureBranch) -> Result<ClosureForms, EngineError> {
    let inv = |r: &Radical2, what: &str| {
        r.inv().ok_or_else(|| EngineError::DegenerateBranch(format!("{}: {what} = 0", branch.label())))
    };
    let inv_lambda = inv(&branch.lambda_k, "lambda")?;
    let inv_mu = inv(&branch.mu_k, "mu")?;
    let c1 = SymExpr::atom(Atom::C1);
    let rate = branch.mu_k.clone();
    let s_second = ExpForm { amplitude: c1.clone(), rate_k: rate.clone(), offset: SymExpr::zero() };
    let s_prime = ExpForm { amplitude: c1.mul(&k()).scale(&inv_lambda), rate_k: rate.clone(), offset: SymExpr::zero() };
    let s = ExpForm {
        amplitude: c1.mul(&k().pow(2)).scale(&(&inv_lambda * &inv_mu)),
        rate_k: rate,
        offset: SymExpr::atom(Atom::C2),
    };
    let consistent = s.diff_xi().as_ref() == Some(&s_prime)
        && s_prime.diff_xi().as_ref() == Some(&s_second);
    if !consistent {
        return Err(EngineError::InconsistentBranch(format!("{}: antiderivatives disagree", branch.label())));
    }
    Ok(ClosureForms { s_second, s_prime, s })
}

/// `u = A₀ + A₁·S'/S` with the integrated forms inserted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralSolution {
    pub a0: Radical2,
    pub a1: SymExpr,
    pub s_prime: ExpForm,
    pub s: ExpForm,
}

pub fn assemble_general_solution(branch: &ClosureBranch) -> Result<GeneralSolution, EngineError> {
    let forms = integrate_closure(branch)?;
    Ok(GeneralSolution { a0: branch.a0.clone(), a1: branch.a1(), s_prime: forms.s_prime, s: forms.s })
}

impl GeneralSolution {
    pub fn bind_constants(&self, c1: SymExpr, c2: SymExpr) -> Result<GeneralSolution, EngineError> {
        let b: Bindings = [(Var::Atom(Atom::C1), c1), (Var::Atom(Atom::C2), c2)].into_iter().collect();
        Ok(GeneralSolution {
            a0: self.a0.clone(),
            a1: self.a1.clone(),
            s_prime: self.s_prime.substitute(&b)?,
            s: self.s.substitute(&b)?,
        })
    }

    /// `Some(A₀)` when the ξ-dependent part has vanished.
    pub fn constant_value(&self) -> Option<Radical2> {
        (self.a1.is_zero() || self.s_prime.amplitude.is_zero()).then(|| self.a0.clone())
    }

    pub fn eval_f64(&self, k: f64, c1: f64, c2: f64, xi: f64) -> Option<f64> {
        let a1 = self.a1.eval_f64(&|a| (a == Atom::K).then_some(k))?;
        let sp = self.s_prime.eval_f64(k, c1, c2, xi)?;
        let s = self.s.eval_f64(k, c1, c2, xi)?;
        Some(self.a0.to_f64() + a1 * sp / s)
    }
}

impl fmt::Display for GeneralSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.constant_value() {
            return write!(f, "u = {c}");
        }
        write!(f, "u = ")?;
        if !self.a0.is_zero() {
            write!(f, "{} + ", self.a0)?;
        }
        write!(f, "({})*({}) / ({})", self.a1, self.s_prime, self.s)
    }
}

/// The closure left symbolic in `A₀, A₁, w, k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericClosure {
    pub lambda: Ratio,
    pub mu: Ratio,
    /// `S' = s_prime_coeff · exp(μξ)`
    pub s_prime_coeff: Ratio,
    /// `S = s_coeff · exp(μξ) + c₂`
    pub s_coeff: Ratio,
    /// `A₁ · s_prime_coeff`, the numerator coefficient of `u − A₀`.
    pub u_numerator_coeff: Ratio,
}

pub fn generic_closure(solution: &ClosureSolution) -> Result<GenericClosure, EngineError> {
    let c1 = SymExpr::atom(Atom::C1);
    let (lambda, mu) = (&solution.lambda, &solution.mu);
    let s_prime_coeff = Ratio::new(c1.mul(&lambda.den), lambda.num.clone())?;
    let s_raw = Ratio::new(c1.mul(&lambda.den).mul(&mu.den), lambda.num.mul(&mu.num))?;
    let s_coeff = s_raw.cancel(&lambda.num).unwrap_or(s_raw);
    let u_numerator_coeff = s_prime_coeff.mul(&Ratio::from_expr(SymExpr::atom(Atom::A(1))));
    Ok(GenericClosure { lambda: lambda.clone(), mu: mu.clone(), s_prime_coeff, s_coeff, u_numerator_coeff })
}
