//! MSE steps 2-4: the ansatz `u = Σ Aᵢ (S'/S)ⁱ`, substitution into the
//! reduced ODE, the grade equations, the closure solve and the integrated
//! general solution.

mod closure;
mod trace;

pub use closure::{
    assemble_general_solution, generic_closure, integrate_closure, solve_closure, ClosureBranch,
    ClosureForms, ClosureSolution, DegeneracyReason, DegenerateRoot, ExpForm, GeneralSolution,
    GenericClosure,
};
pub use trace::{derivation_trace, run_derivation, Derivation, DerivationTrace, TraceCheck, TraceK};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::reduction::{u_atom, TravelingWaveODE};
use crate::symkernel::{Atom, Bindings, KernelError, SymExpr, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("ansatz degree must be at least 1")]
    ZeroDegree,
    #[error("ODE has order {ode}, ansatz derivatives only reach order {available}")]
    OrderMismatch { ode: u8, available: u8 },
    #[error("unsupported system: {0}")]
    Unsupported(String),
    #[error("no exact root in Q(sqrt 2): {0}")]
    NoExactRoot(String),
    #[error("degenerate branch: {0}")]
    DegenerateBranch(String),
    #[error("branch fails back-substitution: {0}")]
    InconsistentBranch(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// `u = A₀ + A₁ (S'/S) + … + Aₙ (S'/S)ⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ansatz {
    n: u32,
}

impl Ansatz {
    pub fn new(n: u32) -> Result<Self, EngineError> {
        if n == 0 {
            return Err(EngineError::ZeroDegree);
        }
        Ok(Ansatz { n })
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn expression(&self) -> SymExpr {
        let ratio = SymExpr::sderiv(1).mul(&SymExpr::s_inverse_power(1));
        (0..=self.n).fold(SymExpr::zero(), |acc, i| {
            acc.add(&SymExpr::atom(Atom::A(i as u8)).mul(&ratio.pow(i)))
        })
    }
}

/// The ansatz together with its first two ξ-derivatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnsatzDerivatives {
    pub ansatz: Ansatz,
    /// `[u, u', u'']`
    pub derivatives: Vec<SymExpr>,
}

impl AnsatzDerivatives {
    pub fn u(&self) -> &SymExpr {
        &self.derivatives[0]
    }

    pub fn du(&self) -> &SymExpr {
        &self.derivatives[1]
    }

    pub fn d2u(&self) -> &SymExpr {
        &self.derivatives[2]
    }

    /// Bindings `u⁽ʲ⁾ ↦ derivatives[j]`.
    pub fn bindings(&self) -> Bindings {
        self.derivatives
            .iter()
            .enumerate()
            .map(|(j, e)| (Var::Atom(u_atom(j as u8)), e.clone()))
            .collect()
    }
}

pub fn build_ansatz_derivatives(n: u32) -> Result<AnsatzDerivatives, EngineError> {
    let ansatz = Ansatz::new(n)?;
    let u = ansatz.expression();
    let du = u.diff_xi();
    let d2u = du.diff_xi();
    Ok(AnsatzDerivatives { ansatz, derivatives: vec![u, du, d2u] })
}

/// Grade `i` ↦ coefficient of `S⁻ⁱ`; each must vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientSystem {
    pub n: u32,
    pub substituted: SymExpr,
    pub equations: BTreeMap<u32, SymExpr>,
}

impl CoefficientSystem {
    pub fn grade(&self, g: u32) -> Option<&SymExpr> {
        self.equations.get(&g)
    }
}

pub fn form_coefficient_system(
    ode: &TravelingWaveODE,
    ansatz: &AnsatzDerivatives,
) -> Result<CoefficientSystem, EngineError> {
    let available = (ansatz.derivatives.len() - 1) as u8;
    if ode.order() > available {
        return Err(EngineError::OrderMismatch { ode: ode.order(), available });
    }
    let substituted = ode.expression().substitute(&ansatz.bindings())?;
    let equations = substituted.collect_grades();
    Ok(CoefficientSystem { n: ansatz.ansatz.degree(), substituted, equations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::{reduce_to_ode, EvolutionEquation, WaveFrame};
    use crate::symkernel::{bind, Radical2};

    fn a(i: u8) -> SymExpr {
        SymExpr::atom(Atom::A(i))
    }

    fn s(j: u32) -> SymExpr {
        SymExpr::sderiv(j)
    }

    fn inv(g: u32) -> SymExpr {
        SymExpr::s_inverse_power(g)
    }

    fn int(n: i64) -> Radical2 {
        Radical2::from_int(n)
    }

    fn cahn_allen_system() -> CoefficientSystem {
        let ode = reduce_to_ode(&EvolutionEquation::cahn_allen(), &WaveFrame::symbolic());
        form_coefficient_system(&ode, &build_ansatz_derivatives(1).unwrap()).unwrap()
    }

    #[test]
    fn ansatz_and_derivatives() {
        let d = build_ansatz_derivatives(1).unwrap();
        assert_eq!(d.u(), &a(0).add(&a(1).mul(&s(1)).mul(&inv(1))));
        let du = a(1).mul(&s(2)).mul(&inv(1)).sub(&a(1).mul(&s(1).pow(2)).mul(&inv(2)));
        assert_eq!(d.du(), &du);
        let d2u = a(1)
            .mul(&s(3))
            .mul(&inv(1))
            .sub(&a(1).mul(&s(2)).mul(&s(1)).mul(&inv(2)).scale(&int(3)))
            .add(&a(1).mul(&s(1).pow(3)).mul(&inv(3)).scale(&int(2)));
        assert_eq!(d.d2u(), &d2u);
    }

    #[test]
    fn constant_ansatz_has_zero_derivative() {
        let d = build_ansatz_derivatives(1).unwrap();
        let b = bind([(Atom::A(1), SymExpr::zero())]);
        assert!(d.du().substitute(&b).unwrap().is_zero());
    }

    #[test]
    fn zero_degree_rejected() {
        assert_eq!(build_ansatz_derivatives(0), Err(EngineError::ZeroDegree));
    }

    #[test]
    fn higher_degree_ansatz_has_top_coefficient() {
        let d = build_ansatz_derivatives(2).unwrap();
        assert!(d.u().mentions(Var::Atom(Atom::A(2))));
        assert_eq!(d.u().collect_grades().keys().copied().collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn grade_equations() {
        let sys = cahn_allen_system();
        assert_eq!(sys.equations.keys().copied().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        let k = SymExpr::atom(Atom::K);
        let w = SymExpr::atom(Atom::W);
        assert_eq!(sys.grade(0).unwrap(), &a(0).pow(3).sub(&a(0)));
        let g1 = k
            .pow(2)
            .mul(&a(1))
            .mul(&s(3))
            .neg()
            .add(&w.mul(&a(1)).mul(&s(2)))
            .add(&a(0).pow(2).scale(&int(3)).sub(&SymExpr::one()).mul(&a(1)).mul(&s(1)));
        assert_eq!(sys.grade(1).unwrap(), &g1);
        let g2 = w
            .mul(&a(1))
            .mul(&s(1).pow(2))
            .neg()
            .add(&k.pow(2).mul(&a(1)).mul(&s(1)).mul(&s(2)).scale(&int(3)))
            .add(&a(0).mul(&a(1).pow(2)).mul(&s(1).pow(2)).scale(&int(3)));
        assert_eq!(sys.grade(2).unwrap(), &g2);
        let g3 = a(1).mul(&a(1).pow(2).sub(&k.pow(2).scale(&int(2)))).mul(&s(1).pow(3));
        assert_eq!(sys.grade(3).unwrap(), &g3);
    }

    #[test]
    fn order_mismatch_rejected() {
        let ode = reduce_to_ode(&EvolutionEquation::cahn_allen(), &WaveFrame::symbolic());
        let mut d = build_ansatz_derivatives(1).unwrap();
        d.derivatives.truncate(2);
        assert!(matches!(
            form_coefficient_system(&ode, &d),
            Err(EngineError::OrderMismatch { ode: 2, available: 1 })
        ));
    }
}
