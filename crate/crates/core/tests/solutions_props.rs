//! Catalog entries against an independent closed-form oracle, plus the
//! symmetry and frame properties every valid entry must satisfy.

use mse_core::solutions::{enumerate_catalog, flip_overall_sign, lookup, Family, FamilyParams, SolutionSpec};
use mse_core::verifier::{pde_residual, GridSpec, Verdict, DEFAULT_THRESHOLD};
use proptest::prelude::*;

/// `U = A0 + B·r e^{μξ}/(r e^{μξ} + 1)` with its first two derivatives,
/// written from scratch: `B = A1·μ`, `μ = (w − 3A0A1)/(3k²)`.
struct Oracle {
    a0: f64,
    b: f64,
    mu: f64,
    w: f64,
    k: f64,
}

impl Oracle {
    fn new(a0: f64, s1: f64, sw: f64, k: f64) -> Oracle {
        let a1 = s1 * 2f64.sqrt() * k;
        let w = sw * 3.0 / 2f64.sqrt() * k;
        let mu = (w - 3.0 * a0 * a1) / (3.0 * k * k);
        Oracle { a0, b: a1 * mu, mu, w, k }
    }

    /// `(U, U', U'')` for the ratio `r` between the exponential and constant parts of S.
    fn profile(&self, r: f64, xi: f64) -> (f64, f64, f64) {
        let e = r * (self.mu * xi).exp();
        let s = e / (e + 1.0);
        let d = self.b * self.mu * s * (1.0 - s);
        let dd = self.b * self.mu * self.mu * s * (1.0 - s) * (1.0 - 2.0 * s);
        (self.a0 + self.b * s, d, dd)
    }

    fn ode_residual(&self, r: f64, xi: f64) -> f64 {
        let (u, d, dd) = self.profile(r, xi);
        self.w * d - self.k * self.k * dd + u * u * u - u
    }

    /// `Q/c2` for c₁ = c₂ = 1: `Q = 3k⁴/N`, `N = 3k²(3A0² − 1) + w(w − 3A0A1)`.
    fn general_ratio(&self) -> f64 {
        let a1 = self.b / self.mu;
        let n = 3.0 * self.k * self.k * (3.0 * self.a0 * self.a0 - 1.0) + self.w * (self.w - 3.0 * self.a0 * a1);
        3.0 * self.k.powi(4) / n
    }
}

fn oracle_for(spec: &SolutionSpec) -> Oracle {
    Oracle::new(spec.a0 as f64, spec.s1.factor(), spec.sw.factor(), spec.k)
}

fn closure_tuples() -> Vec<(f64, f64, f64)> {
    let mut v = Vec::new();
    for s1 in [1.0, -1.0] {
        for sw in [1.0, -1.0] {
            v.push((0.0, s1, sw));
        }
    }
    // A0 = ±1 closes only when sw = A0·s1
    v.extend([(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)]);
    v
}

#[test]
fn oracle_closes_exactly_on_the_eight_branches() {
    for (a0, s1, sw) in closure_tuples() {
        let o = Oracle::new(a0, s1, sw, 1.3);
        for xi in [-4.0, -1.0, 0.3, 2.5] {
            assert!(o.ode_residual(1.0, xi).abs() < 1e-13, "({a0}, {s1}, {sw})");
            assert!(o.ode_residual(0.3, xi).abs() < 1e-13);
        }
    }
    for (a0, s1, sw) in [(1.0, 1.0, -1.0), (-1.0, 1.0, 1.0)] {
        let o = Oracle::new(a0, s1, sw, 1.0);
        assert!(o.ode_residual(1.0, 0.5).abs() > 1e-3, "({a0}, {s1}, {sw})");
    }
}

#[test]
fn catalog_matches_oracle() {
    let mut compared = 0;
    for spec in enumerate_catalog(1.0) {
        let tuple = (spec.a0 as f64, spec.s1.factor(), spec.sw.factor());
        if !closure_tuples().contains(&tuple) {
            continue;
        }
        let o = oracle_for(&spec);
        let r = match spec.params {
            FamilyParams::GeneralExpRatio { c1: 1.0, c2: 1.0 } => o.general_ratio(),
            FamilyParams::TanhKink { scale: mse_core::solutions::Scale::Half, .. } => 1.0,
            FamilyParams::CothSingular { scale: mse_core::solutions::Scale::Half, .. } => -1.0,
            _ => continue,
        };
        for xi in [-6.0, -2.0, -0.5, 0.25, 1.5, 5.0] {
            if spec.is_singular_at(xi) {
                continue;
            }
            let expected = o.profile(r, xi).0;
            let got = spec.profile(xi).unwrap().u;
            assert!((got - expected).abs() < 1e-12 * (1.0 + expected.abs()), "{} at {xi}: {got} vs {expected}", spec.id);
        }
        compared += 1;
    }
    assert!(compared >= 16, "{compared}");
}

#[test]
fn kink_value_at_origin_and_speed() {
    let spec = lookup("eq20+k1", 1.0).unwrap();
    assert!((spec.eval(0.0, 0.0).unwrap() - 0.5).abs() < 1e-15);
    assert!((spec.w() - 2.1213203435596424).abs() < 1e-15);
}

fn is_valid(spec: &SolutionSpec) -> bool {
    pde_residual(spec, &GridSpec::standard().for_spec(spec), DEFAULT_THRESHOLD).unwrap().verdict == Verdict::Valid
}

#[test]
fn negation_preserves_validity() {
    for spec in enumerate_catalog(1.0).iter().filter(|s| is_valid(s)) {
        let neg = flip_overall_sign(spec);
        assert!(is_valid(&neg), "{}", neg.id);
        for (x, t) in [(-3.0, 0.0), (0.7, 0.4), (5.0, 1.0)] {
            if let (Ok(u), Ok(v)) = (spec.eval(x, t), neg.eval(x, t)) {
                assert!((u + v).abs() < 1e-14 * (1.0 + u.abs()), "{}", spec.id);
            }
        }
    }
}

#[test]
fn perturbed_entries_never_valid() {
    for spec in enumerate_catalog(1.0).iter().filter(|s| is_valid(s)) {
        assert!(!is_valid(&spec.perturbed(0.01)), "{}", spec.id);
    }
}

#[test]
fn kinks_are_monotone() {
    for spec in enumerate_catalog(1.0).iter().filter(|s| s.family() == Family::TanhKink && is_valid(s)) {
        let vals: Vec<f64> = (-400..=400).map(|i| spec.profile(i as f64 * 0.05).unwrap().u).collect();
        let up = vals.windows(2).all(|w| w[1] >= w[0]);
        let down = vals.windows(2).all(|w| w[1] <= w[0]);
        assert!(up || down, "{}", spec.id);
    }
}

#[test]
fn far_field_tails() {
    let spec = lookup("eq20++", 1.0).unwrap();
    let o = oracle_for(&spec);
    let (lo, hi) = spec.asymptotes();
    assert!(lo.abs() < 1e-15 && (hi - 1.0).abs() < 1e-15);
    // ξ = ±30 is still e^{−30/√2} ≈ 6e−10 away from the equilibria
    for xi in [-30.0f64, 30.0] {
        let tail = (-o.mu.abs() * xi.abs()).exp();
        let gap = if xi < 0.0 { spec.profile(xi).unwrap().u - lo } else { hi - spec.profile(xi).unwrap().u };
        let expected = o.b.abs() * tail / (1.0 + tail);
        assert!((gap - expected).abs() < 1e-6 * expected, "{xi}: {gap} vs {expected}");
        assert!(gap > 1e-10);
    }
    for xi in [-80.0, 80.0] {
        let u = spec.profile(xi).unwrap().u;
        let target = if xi < 0.0 { lo } else { hi };
        assert!((u - target).abs() < 1e-10);
    }
}

#[test]
fn general_constants_translate_the_kink() {
    // c₂ = r·Q shifts the c₂ = Q kink by ln(r)/μ
    let kink = lookup("eq20++", 1.0).unwrap();
    let o = oracle_for(&kink);
    let q = o.general_ratio();
    for r in [0.5, 3.0] {
        let general = SolutionSpec { params: FamilyParams::GeneralExpRatio { c1: 1.0, c2: r * q }, ..kink.clone() };
        let shift = r.ln() / o.mu;
        for xi in [-3.0, 0.0, 2.0] {
            let a = general.profile(xi).unwrap().u;
            let b = kink.profile(xi - shift).unwrap().u;
            assert!((a - b).abs() < 1e-13, "{r} {xi}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_shift_keeps_validity(c in -2.0f64..2.0) {
        for id in ["eq26+++half", "eq28+-half", "eq30--half"] {
            let base = lookup(id, 1.0).unwrap();
            let FamilyParams::CanonicalTanh { rho, eta, scale, chi, .. } = base.params else { unreachable!() };
            let shifted = SolutionSpec { params: FamilyParams::CanonicalTanh { rho, eta, scale, c, chi }, ..base.clone() };
            prop_assert_eq!(is_valid(&shifted), is_valid(&base), "{} at c = {}", id, c);
        }
    }

    #[test]
    fn frame_identity(idx in 0usize..104, x in -8.0f64..8.0, t in 0.0f64..1.0, dt in 0.0f64..0.5) {
        let spec = &enumerate_catalog(1.0)[idx];
        let xi = spec.xi(x, t);
        prop_assume!(!spec.is_singular_at(xi));
        let u = spec.eval(x, t).unwrap();
        prop_assert!((u - spec.profile(xi).unwrap().u).abs() <= 1e-12 * (1.0 + u.abs()));
        // moving with the wave leaves u unchanged
        let moved = spec.eval(x - spec.w() / spec.k * dt, t + dt).unwrap();
        prop_assert!((moved - u).abs() <= 1e-12 * (1.0 + u.abs()) * (1.0 + xi.abs()));
    }

    #[test]
    fn valid_entries_stay_valid_at_other_k(k in 0.3f64..3.0) {
        for id in ["eq20++", "eq21+-", "eq23+++half", "eq26-++half", "eq29++plus"] {
            let spec = lookup(id, k).unwrap();
            prop_assert!(is_valid(&spec), "{} at k = {}", id, k);
        }
    }
}
