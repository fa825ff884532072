//! Quotients of [`SymExpr`] polynomials, kept unsimplified except for
//! monomial content and explicitly requested exact factors.

use std::fmt;

use super::expr::{SymExpr, Var};
use super::pretty::render_factored;
use super::KernelError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub num: SymExpr,
    pub den: SymExpr,
}

impl Ratio {
    pub fn new(num: SymExpr, den: SymExpr) -> Result<Self, KernelError> {
        if den.is_zero() {
            return Err(KernelError::ZeroDenominator);
        }
        Ok(Ratio { num, den }.reduced())
    }

    pub fn from_expr(e: SymExpr) -> Self {
        Ratio { num: e, den: SymExpr::one() }
    }

    /// Cancels common monomial content and fixes the sign so that the first
    /// stored denominator term is positive.
    pub fn reduced(self) -> Self {
        let (cn, _) = self.num.split_content();
        let (cd, _) = self.den.split_content();
        let common = if self.num.is_zero() {
            cd
        } else {
            cn.gcd(&cd)
        };
        let mut num = self.num.div_monomial(&common).unwrap_or(self.num);
        let mut den = self.den.div_monomial(&common).unwrap_or(self.den);
        if num.is_zero() {
            den = SymExpr::one();
        }
        if den.terms().next().map(|(_, c)| c.signum() < 0).unwrap_or(false) {
            num = num.neg();
            den = den.neg();
        }
        Ratio { num, den }
    }

    pub fn mul(&self, other: &Ratio) -> Ratio {
        Ratio { num: self.num.mul(&other.num), den: self.den.mul(&other.den) }.reduced()
    }

    pub fn div(&self, other: &Ratio) -> Result<Ratio, KernelError> {
        Ratio::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn sub(&self, other: &Ratio) -> Ratio {
        Ratio {
            num: self.num.mul(&other.den).sub(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
        .reduced()
    }

    /// Divides numerator and denominator by `factor` when it divides both.
    pub fn cancel(&self, factor: &SymExpr) -> Option<Ratio> {
        Some(Ratio { num: self.num.div_exact(factor)?, den: self.den.div_exact(factor)? }.reduced())
    }

    /// Same rational function (cross-multiplication), without simplifying.
    pub fn equivalent(&self, other: &Ratio) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    /// Replaces `S⁽ʲ⁾` by the quotient `numer/denom` in both parts, clearing the
    /// introduced denominators consistently.
    pub fn replace_sderiv(&self, j: u32, numer: &SymExpr, denom: &SymExpr) -> Ratio {
        let var = Var::SDeriv(j);
        let d = self.num.degree_in(var).max(self.den.degree_in(var));
        Ratio {
            num: self.num.replace_sderiv_to_degree(j, numer, denom, d),
            den: self.den.replace_sderiv_to_degree(j, numer, denom, d),
        }
        .reduced()
    }

    pub fn substitute(&self, b: &super::expr::Bindings) -> Result<Ratio, KernelError> {
        Ratio::new(self.num.substitute(b)?, self.den.substitute(b)?)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.as_constant().map(|c| c.is_one()).unwrap_or(false) {
            return write!(f, "{}", render_factored(&self.num));
        }
        write!(f, "({}) / ({})", render_factored(&self.num), render_factored(&self.den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::{Atom, Radical2};

    #[test]
    fn content_cancels() {
        let a1 = SymExpr::atom(Atom::A(1));
        let k = SymExpr::atom(Atom::K);
        let w = SymExpr::atom(Atom::W);
        let r = Ratio::new(w.mul(&a1), k.pow(2).mul(&a1).scale(&Radical2::from_int(3))).unwrap();
        assert_eq!(r.num, w);
        assert_eq!(r.den, k.pow(2).scale(&Radical2::from_int(3)));
    }

    #[test]
    fn sign_normalization_and_equivalence() {
        let w = SymExpr::atom(Atom::W);
        let k = SymExpr::atom(Atom::K);
        let r = Ratio::new(w.neg(), k.neg()).unwrap();
        assert_eq!(r.num, w);
        let scaled = Ratio { num: w.scale(&Radical2::from_int(2)), den: k.scale(&Radical2::from_int(2)) };
        assert!(r.equivalent(&scaled));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(matches!(Ratio::new(SymExpr::one(), SymExpr::zero()), Err(KernelError::ZeroDenominator)));
    }
}
