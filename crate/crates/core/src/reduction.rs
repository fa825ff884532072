//! The evolution family `u_t = u_xx - u^m + u`, its traveling-wave reduction in
//! the frame `ξ = kx + wt`, and the homogeneous-balance degree.

use thiserror::Error;

use crate::symkernel::{Atom, MonoKey, Radical2, SymExpr};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("nonlinearity exponent m = {0} must be at least 2")]
    LinearEquation(u32),
    #[error("wave number must be nonzero")]
    ZeroWaveNumber,
    #[error("balance {nonlinear} = {derivative} has no positive integer solution")]
    NonIntegerBalance { nonlinear: String, derivative: String },
    #[error("ODE lacks a {0} term to balance")]
    MissingBalanceTerm(&'static str),
}

/// `u_t = u_xx - u^m + u` with `m ≥ 2`; `m = 3` is the Cahn-Allen equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvolutionEquation {
    m: u32,
}

impl EvolutionEquation {
    pub fn new(m: u32) -> Result<Self, ReductionError> {
        if m < 2 {
            return Err(ReductionError::LinearEquation(m));
        }
        Ok(EvolutionEquation { m })
    }

    pub fn cahn_allen() -> Self {
        EvolutionEquation { m: 3 }
    }

    pub fn exponent(&self) -> u32 {
        self.m
    }
}

/// A frame parameter: either left symbolic or bound to an exact value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameParam {
    Symbolic,
    Value(Radical2),
}

/// `ξ = kx + wt`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaveFrame {
    k: FrameParam,
    w: FrameParam,
}

impl WaveFrame {
    pub fn symbolic() -> Self {
        WaveFrame { k: FrameParam::Symbolic, w: FrameParam::Symbolic }
    }

    pub fn new(k: FrameParam, w: FrameParam) -> Result<Self, ReductionError> {
        if let FrameParam::Value(v) = &k {
            if v.is_zero() {
                return Err(ReductionError::ZeroWaveNumber);
            }
        }
        Ok(WaveFrame { k, w })
    }

    pub fn numeric(k: Radical2, w: Radical2) -> Result<Self, ReductionError> {
        WaveFrame::new(FrameParam::Value(k), FrameParam::Value(w))
    }

    fn param(p: &FrameParam, atom: Atom) -> SymExpr {
        match p {
            FrameParam::Symbolic => SymExpr::atom(atom),
            FrameParam::Value(v) => SymExpr::constant(v.clone()),
        }
    }

    pub fn k_expr(&self) -> SymExpr {
        WaveFrame::param(&self.k, Atom::K)
    }

    pub fn w_expr(&self) -> SymExpr {
        WaveFrame::param(&self.w, Atom::W)
    }
}

/// The reduced ODE `G(u, u', u'') = 0` as a polynomial in the atoms
/// `u = U(0)`, `u' = U(1)`, `u'' = U(2)` with coefficients over `k, w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TravelingWaveODE {
    expression: SymExpr,
}

pub fn u_atom(order: u8) -> Atom {
    Atom::U(order)
}

impl TravelingWaveODE {
    pub fn expression(&self) -> &SymExpr {
        &self.expression
    }

    /// Highest u-derivative order present.
    pub fn order(&self) -> u8 {
        self.expression
            .terms()
            .flat_map(|(k, _)| k.sym_powers().iter().filter_map(|(a, _)| match a {
                Atom::U(j) => Some(*j),
                _ => None,
            }))
            .max()
            .unwrap_or(0)
    }
}

/// Substitutes `u_t → w·u'` and `u_xx → k²·u''` into `u_t - u_xx + u^m - u = 0`.
pub fn reduce_to_ode(eq: &EvolutionEquation, frame: &WaveFrame) -> TravelingWaveODE {
    let u = SymExpr::atom(u_atom(0));
    let u_t = frame.w_expr().mul(&SymExpr::atom(u_atom(1)));
    let u_xx = frame.k_expr().pow(2).mul(&SymExpr::atom(u_atom(2)));
    let expression = u_t.sub(&u_xx).add(&u.pow(eq.exponent())).sub(&u);
    TravelingWaveODE { expression }
}

/// Formal degree of a product `Π (d^q u)^s` under `D(u) = n`:
/// each factor contributes `s·(n + q)`.
pub fn formal_degree(key: &MonoKey, n: i64) -> i64 {
    key.sym_powers()
        .iter()
        .filter_map(|(a, s)| match a {
            Atom::U(q) => Some(*s as i64 * (n + *q as i64)),
            _ => None,
        })
        .sum()
}

/// Linear coefficients `(a, b)` of the formal degree `a·n + b`.
fn degree_line(key: &MonoKey) -> (i64, i64) {
    (formal_degree(key, 1) - formal_degree(key, 0), formal_degree(key, 0))
}

fn describe(key: &MonoKey) -> String {
    SymExpr::term(Radical2::one(), key.clone()).to_string()
}

/// Smallest positive integer `n` that balances the highest-order linear
/// derivative term against the dominant nonlinear term.
pub fn balance_degree(ode: &TravelingWaveODE) -> Result<u32, ReductionError> {
    let mut derivative: Option<(i64, &MonoKey)> = None;
    let mut nonlinear: Option<((i64, i64), &MonoKey)> = None;
    for (key, _) in ode.expression.terms() {
        let (a, b) = degree_line(key);
        if a == 1 && b > 0 {
            if derivative.map(|(q, _)| b > q).unwrap_or(true) {
                derivative = Some((b, key));
            }
        } else if a >= 2 && nonlinear.map(|(best, _)| (a, b) > best).unwrap_or(true) {
            nonlinear = Some(((a, b), key));
        }
    }
    let (q, dkey) = derivative.ok_or(ReductionError::MissingBalanceTerm("derivative"))?;
    let ((a, b), nkey) = nonlinear.ok_or(ReductionError::MissingBalanceTerm("nonlinear"))?;
    // a·n + b = n + q
    let num = q - b;
    let den = a - 1;
    if num <= 0 || num % den != 0 {
        return Err(ReductionError::NonIntegerBalance {
            nonlinear: describe(nkey),
            derivative: describe(dkey),
        });
    }
    Ok((num / den) as u32)
}
