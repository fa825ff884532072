//! Maps between catalog forms: binding c₂, the `a/b = e^{2c}` reduction, and
//! the overall sign flip.

use super::{FamilyParams, Scale, SolutionError, SolutionSpec};
use crate::Sign;

/// `c₂ = +Q` gives the tanh kink, `c₂ = −Q` the coth form
/// (`Q = 3c₁k⁴/N`).
pub fn specialize_constants(general: &SolutionSpec, choice: Sign) -> Result<SolutionSpec, SolutionError> {
    let FamilyParams::GeneralExpRatio { c1, .. } = general.params else {
        return Err(SolutionError::NotApplicable(format!("{} is not a general exp-ratio form", general.id)));
    };
    if c1 == 0.0 {
        return Err(SolutionError::NotApplicable(format!("{}: c1 = 0 leaves a constant", general.id)));
    }
    let b = general.branch();
    if b.n == 0.0 || !b.n.is_finite() {
        return Err(SolutionError::DegenerateConstant(general.id.clone()));
    }
    let case_one = general.a0 == 0;
    let (equation, reading, params) = match (choice, case_one) {
        (Sign::Plus, true) => (20, "printed", FamilyParams::TanhKink { c1, scale: Scale::Half }),
        (Sign::Minus, true) => (21, "printed", FamilyParams::CothSingular { c1, scale: Scale::Half }),
        (Sign::Plus, false) => (23, "half", FamilyParams::TanhKink { c1, scale: Scale::Half }),
        (Sign::Minus, false) => (24, "cothhalf", FamilyParams::CothSingular { c1, scale: Scale::Half }),
    };
    let suffix = if case_one { "" } else { reading };
    let signs: String = if case_one {
        [general.s1, general.sw].iter().map(|s| s.as_char()).collect()
    } else {
        let a0 = if general.a0 > 0 { Sign::Plus } else { Sign::Minus };
        [a0, general.s1, general.sw].iter().map(|s| s.as_char()).collect()
    };
    Ok(SolutionSpec {
        id: format!("eq{equation}{signs}{suffix}"),
        source_equation: equation,
        reading: reading.into(),
        params,
        ..general.clone()
    })
}

/// Rewrites `A₀ + σ/(1 + (a/b)e^{τz})` as `ρ·½(1 + tanh(η z/2 + χc))` with
/// `c = ½ ln(a/b)`.
pub fn reduce_ab_to_canonical(spec: &SolutionSpec) -> Result<SolutionSpec, SolutionError> {
    let FamilyParams::ABExpForm { sigma, tau, a, b } = spec.params else {
        return Err(SolutionError::NotApplicable(format!("{} is not an a-b exponential form", spec.id)));
    };
    if a <= 0.0 || b <= 0.0 {
        return Err(SolutionError::InvalidReduction(format!("{}: a = {a}, b = {b} must be positive", spec.id)));
    }
    // A0 + σ/(1+e^{τz+2c}) = A0 + σ·½(1 − tanh(τz/2 + c))
    let (rho, eta, chi) = match (spec.a0, sigma) {
        (0, _) => (sigma, tau.flip(), Sign::Minus),
        (1, Sign::Minus) => (Sign::Plus, tau, Sign::Plus),
        (-1, Sign::Plus) => (Sign::Minus, tau, Sign::Plus),
        _ => return Err(SolutionError::InvalidReduction(spec.id.clone())),
    };
    let equation = spec.source_equation + 1;
    let signs: String = match equation {
        26 => [rho, eta, spec.sw],
        _ => [eta, spec.sw, spec.sw],
    }
    .iter()
    .take(if equation == 26 { 3 } else { 2 })
    .map(|s| s.as_char())
    .collect();
    Ok(SolutionSpec {
        id: format!("eq{equation}{signs}half"),
        source_equation: equation,
        reading: "half".into(),
        params: FamilyParams::CanonicalTanh { rho, eta, scale: Scale::Half, c: 0.5 * (a / b).ln(), chi },
        ..spec.clone()
    })
}

/// The entry describing `−u`.
pub fn flip_overall_sign(spec: &SolutionSpec) -> SolutionSpec {
    let params = match spec.params {
        FamilyParams::ABExpForm { sigma, tau, a, b } => FamilyParams::ABExpForm { sigma: sigma.flip(), tau, a, b },
        FamilyParams::CanonicalTanh { rho, eta, scale, c, chi } => {
            FamilyParams::CanonicalTanh { rho: rho.flip(), eta, scale, c, chi }
        }
        p => p,
    };
    SolutionSpec {
        id: format!("{}~negated", spec.id),
        a0: -spec.a0,
        s1: spec.s1.flip(),
        shift: -spec.shift,
        params,
        ..spec.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solutions::{enumerate_catalog, lookup, Family};

    #[test]
    fn specialization_agrees_with_general_form() {
        for general in enumerate_catalog(1.0).iter().filter(|s| s.family() == Family::GeneralExpRatio) {
            for choice in Sign::BOTH {
                let mut g = general.clone();
                let FamilyParams::GeneralExpRatio { c1, .. } = g.params else { unreachable!() };
                let q = g.branch().q(c1, g.k);
                g.params = FamilyParams::GeneralExpRatio { c1, c2: choice.factor() * q };
                let sp = specialize_constants(general, choice).unwrap();
                for xi in [-3.0, -1.0, 2.0] {
                    let (a, b) = (g.profile(xi).unwrap(), sp.profile(xi).unwrap());
                    assert!((a.u - b.u).abs() < 1e-14, "{} {xi}", sp.id);
                    assert!((a.du - b.du).abs() < 1e-13);
                    assert!((a.d2u - b.d2u).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn specialization_targets() {
        let g = lookup("eq19++", 1.0).unwrap();
        let plus = specialize_constants(&g, Sign::Plus).unwrap();
        assert_eq!(plus, lookup("eq20++", 1.0).unwrap());
        let minus = specialize_constants(&g, Sign::Minus).unwrap();
        assert_eq!(minus, lookup("eq21++", 1.0).unwrap());
        let g = lookup("eq22+++", 1.0).unwrap();
        assert_eq!(specialize_constants(&g, Sign::Plus).unwrap(), lookup("eq23+++half", 1.0).unwrap());
        assert_eq!(specialize_constants(&g, Sign::Minus).unwrap(), lookup("eq24+++cothhalf", 1.0).unwrap());
        assert!(specialize_constants(&lookup("eq20++", 1.0).unwrap(), Sign::Plus).is_err());
        assert!(specialize_constants(&crate::solutions::SolutionSpec::equilibrium(0, 1.0), Sign::Plus).is_err());
    }

    #[test]
    fn reduction_shift() {
        let mut ab = lookup("eq25+-+", 1.0).unwrap();
        let c = reduce_ab_to_canonical(&ab).unwrap();
        assert!(matches!(c.params, FamilyParams::CanonicalTanh { c, .. } if c == 0.0));
        ab.params = FamilyParams::ABExpForm { sigma: Sign::Plus, tau: Sign::Minus, a: 1f64.exp().powi(2), b: 1.0 };
        let c = reduce_ab_to_canonical(&ab).unwrap();
        assert!(matches!(c.params, FamilyParams::CanonicalTanh { c, .. } if (c - 1.0).abs() < 1e-15));
    }

    #[test]
    fn reduction_is_pointwise_exact() {
        for ab in enumerate_catalog(1.0).iter().filter(|s| s.family() == Family::ABExpForm) {
            for (a, b) in [(1.0, 1.0), (2.5, 0.4), (0.3, 3.0)] {
                let mut s = ab.clone();
                if let FamilyParams::ABExpForm { sigma, tau, .. } = s.params {
                    s.params = FamilyParams::ABExpForm { sigma, tau, a, b };
                }
                let Ok(c) = reduce_ab_to_canonical(&s) else { continue };
                for i in 0..41 {
                    for j in 0..11 {
                        let (x, t) = (-10.0 + 0.5 * i as f64, 0.1 * j as f64);
                        let d = (s.eval(x, t).unwrap() - c.eval(x, t).unwrap()).abs();
                        assert!(d < 1e-12, "{} ({x},{t}): {d}", s.id);
                    }
                }
            }
        }
    }

    #[test]
    fn reduction_rejections() {
        let mut ab = lookup("eq25", 1.0).unwrap();
        ab.params = FamilyParams::ABExpForm { sigma: Sign::Plus, tau: Sign::Plus, a: -1.0, b: 1.0 };
        assert!(matches!(reduce_ab_to_canonical(&ab), Err(SolutionError::InvalidReduction(_))));
        // 1 + 1/(1+g) is not a single canonical tanh
        let mut s = lookup("eq27", 1.0).unwrap();
        s.params = FamilyParams::ABExpForm { sigma: Sign::Plus, tau: Sign::Plus, a: 1.0, b: 1.0 };
        assert!(matches!(reduce_ab_to_canonical(&s), Err(SolutionError::InvalidReduction(_))));
        assert!(reduce_ab_to_canonical(&lookup("eq20", 1.0).unwrap()).is_err());
    }

    #[test]
    fn reduced_ids_name_catalog_entries() {
        let ids: Vec<String> = enumerate_catalog(1.0).into_iter().map(|s| s.id).collect();
        for ab in enumerate_catalog(1.0).iter().filter(|s| s.family() == Family::ABExpForm) {
            if let Ok(c) = reduce_ab_to_canonical(ab) {
                assert!(ids.contains(&c.id), "{}", c.id);
                assert_eq!(lookup(&c.id, 1.0).unwrap().params.family(), Family::CanonicalTanh);
            }
        }
    }

    #[test]
    fn flip_negates() {
        for s in enumerate_catalog(1.0) {
            let f = flip_overall_sign(&s);
            for xi in [-2.3, 0.4, 1.7] {
                let (a, b) = (s.profile(xi).unwrap(), f.profile(xi).unwrap());
                assert!((a.u + b.u).abs() < 1e-14, "{}", s.id);
                assert!((a.du + b.du).abs() < 1e-13, "{}", s.id);
            }
        }
    }
}
