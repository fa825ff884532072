//! Exact-arithmetic expression kernel.
//!
//! Coefficients live in ℚ(√2) ([`Radical2`]); expressions are canonical sums of
//! monomials over the scalar atoms `k, w, A0, A1, c1, c2`, the derivatives
//! `S', S'', ...` of an undetermined function `S(ξ)`, and powers of `1/S`.

mod expr;
mod pretty;
mod radical;
mod ratio;

pub use expr::{Atom, Bindings, CombineOp, MonoKey, Monomial, SymExpr, Var};
pub use pretty::{render, render_factored};
pub use radical::{rational_sqrt, Radical2, Rational};
pub use ratio::Ratio;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("cannot bind {0}: S and its derivatives are function symbols, not scalars")]
    FunctionSymbolBinding(Var),
    #[error("zero denominator")]
    ZeroDenominator,
}

/// Convenience: bindings from `(atom, value)` pairs.
pub fn bind<I, E>(pairs: I) -> Bindings
where
    I: IntoIterator<Item = (Atom, E)>,
    E: Into<SymExpr>,
{
    pairs.into_iter().map(|(a, e)| (Var::Atom(a), e.into())).collect()
}
