//! Evaluatable closed-form traveling waves with analytic derivatives.
//!
//! Every entry is a profile `U(ξ)` in the frame `ξ = kx + wt` with
//! `w = sw·(3√2/2)·k`, so `u_t = w·U'`, `u_x = k·U'` and `u_xx = k²·U''`.

mod catalog;
mod transform;

pub use catalog::{enumerate_catalog, lookup, parse_id, EntryId, CATALOG_EQUATIONS};
pub use transform::{flip_overall_sign, reduce_ab_to_canonical, specialize_constants};

use std::f64::consts::SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Sign;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolutionError {
    #[error("{id}: evaluation at xi = {xi} is inside a singular zone")]
    SingularEvaluation { id: String, xi: f64 },
    #[error("{0}: integration denominator vanishes")]
    DegenerateConstant(String),
    #[error("{0}: reduction to a canonical tanh does not apply")]
    InvalidReduction(String),
    #[error("{0}")]
    NotApplicable(String),
    #[error("unknown catalog entry '{0}'")]
    UnknownEntry(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Argument scaling of a tanh/coth form relative to `μξ`: `Half` is the
/// specialization of the exp-ratio (`½μξ`), `Full` doubles both the
/// argument and the amplitude.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scale {
    Half,
    Full,
}

impl Scale {
    pub fn factor(self) -> f64 {
        match self {
            Scale::Half => 0.5,
            Scale::Full => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    GeneralExpRatio,
    TanhKink,
    CothSingular,
    ABExpForm,
    CanonicalTanh,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::GeneralExpRatio => "GeneralExpRatio",
            Family::TanhKink => "TanhKink",
            Family::CothSingular => "CothSingular",
            Family::ABExpForm => "ABExpForm",
            Family::CanonicalTanh => "CanonicalTanh",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = SolutionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "GeneralExpRatio" => Family::GeneralExpRatio,
            "TanhKink" => Family::TanhKink,
            "CothSingular" => Family::CothSingular,
            "ABExpForm" => Family::ABExpForm,
            "CanonicalTanh" => Family::CanonicalTanh,
            other => return Err(SolutionError::InvalidParameter(format!("family '{other}'"))),
        })
    }
}

/// Family-specific parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum FamilyParams {
    /// `u = A₀ + A₁·S'/S`, `S = Q·e^{μξ} + c₂`, `Q = 3c₁k⁴/N`.
    GeneralExpRatio { c1: f64, c2: f64 },
    /// `c₂ = +Q`: `u = A₀ + amp·(1 + tanh(rate·ξ))`.
    TanhKink { c1: f64, scale: Scale },
    /// `c₂ = −Q`: `u = A₀ + amp·(1 + coth(rate·ξ))`.
    CothSingular { c1: f64, scale: Scale },
    /// `u = A₀ + σ·b / (a(cosh z + τ sinh z) + b)`, `z = ξ/(√2k)`.
    ABExpForm { sigma: Sign, tau: Sign, a: f64, b: f64 },
    /// `u = ρ·½(1 + tanh(η·m·z + χ·c))`, `z = ξ/(√2k)`, `m` from the scale.
    CanonicalTanh { rho: Sign, eta: Sign, scale: Scale, c: f64, chi: Sign },
}

impl FamilyParams {
    pub fn family(&self) -> Family {
        match self {
            FamilyParams::GeneralExpRatio { .. } => Family::GeneralExpRatio,
            FamilyParams::TanhKink { .. } => Family::TanhKink,
            FamilyParams::CothSingular { .. } => Family::CothSingular,
            FamilyParams::ABExpForm { .. } => Family::ABExpForm,
            FamilyParams::CanonicalTanh { .. } => Family::CanonicalTanh,
        }
    }
}

/// A forbidden ξ-interval `[center − half_width, center + half_width]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularZone {
    pub center: f64,
    pub half_width: f64,
}

impl SingularZone {
    pub const DEFAULT_HALF_WIDTH: f64 = 0.1;

    pub fn contains(&self, xi: f64) -> bool {
        (xi - self.center).abs() < self.half_width
    }
}

/// Closure quantities of the branch `(A₀, A₁ = s1·√2k, w = sw·(3√2/2)k)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchNumbers {
    pub a1: f64,
    pub w: f64,
    /// `w − 3A₀A₁`
    pub drift: f64,
    /// `3k²(3A₀² − 1) + w(w − 3A₀A₁)`
    pub n: f64,
    /// `N / (k²(w − 3A₀A₁))`
    pub mu: f64,
}

impl BranchNumbers {
    pub fn new(a0: f64, s1: Sign, sw: Sign, k: f64) -> Self {
        let a1 = s1.factor() * SQRT_2 * k;
        let w = wave_speed(sw, k);
        let drift = w - 3.0 * a0 * a1;
        let n = 3.0 * k * k * (3.0 * a0 * a0 - 1.0) + w * drift;
        BranchNumbers { a1, w, drift, n, mu: n / (k * k * drift) }
    }

    /// `Q = 3c₁k⁴/N`, the coefficient of `e^{μξ}` in S.
    pub fn q(&self, c1: f64, k: f64) -> f64 {
        3.0 * c1 * k.powi(4) / self.n
    }
}

/// `w = sw·(3√2/2)·k`.
pub fn wave_speed(sw: Sign, k: f64) -> f64 {
    sw.factor() * 1.5 * SQRT_2 * k
}

/// One concrete solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionSpec {
    pub id: String,
    pub source_equation: u32,
    /// `printed`, or the alternative reading the entry instantiates.
    pub reading: String,
    pub a0: i8,
    pub s1: Sign,
    pub sw: Sign,
    pub k: f64,
    pub params: FamilyParams,
    /// Constant added to the profile; nonzero only for perturbation tests.
    pub shift: f64,
}

/// `(U, U', U'')` at one ξ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Profile {
    pub u: f64,
    pub du: f64,
    pub d2u: f64,
}

/// `(u_t, u_x, u_xx)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Partials {
    pub u_t: f64,
    pub u_x: f64,
    pub u_xx: f64,
}

/// `s = 1/(1+g)` and `t = g/(1+g)` for `g = r·e^{e}`, overflow-safe.
fn logistic(r: f64, e: f64) -> (f64, f64) {
    let g = r * e.exp();
    if g.is_infinite() {
        return (0.0, 1.0);
    }
    let s = 1.0 / (1.0 + g);
    (s, g * s)
}

impl SolutionSpec {
    pub fn family(&self) -> Family {
        self.params.family()
    }

    pub fn w(&self) -> f64 {
        wave_speed(self.sw, self.k)
    }

    pub fn branch(&self) -> BranchNumbers {
        BranchNumbers::new(self.a0 as f64, self.s1, self.sw, self.k)
    }

    pub fn xi(&self, x: f64, t: f64) -> f64 {
        self.k * x + self.w() * t
    }

    /// The constant solution `u ≡ a0` (c₁ = 0).
    pub fn equilibrium(a0: i8, k: f64) -> SolutionSpec {
        SolutionSpec {
            id: format!("equilibrium{a0:+}"),
            source_equation: 10,
            reading: "constant".into(),
            a0,
            s1: Sign::Plus,
            sw: Sign::Plus,
            k,
            params: FamilyParams::GeneralExpRatio { c1: 0.0, c2: 1.0 },
            shift: 0.0,
        }
    }

    /// The same entry with `ε` added to u.
    pub fn perturbed(&self, eps: f64) -> SolutionSpec {
        SolutionSpec { id: format!("{}~perturbed", self.id), shift: self.shift + eps, ..self.clone() }
    }

    /// `(amplitude, rate)` of a tanh/coth form.
    fn tanh_shape(&self, scale: Scale) -> (f64, f64) {
        let b = self.branch();
        let m = scale.factor();
        (b.a1 * b.mu * m, b.mu * m)
    }

    fn canonical_slope(&self, eta: Sign, scale: Scale) -> f64 {
        eta.factor() * scale.factor() / (SQRT_2 * self.k)
    }

    pub fn singular_zones(&self) -> Vec<SingularZone> {
        let zone = |center: f64| SingularZone { center, half_width: SingularZone::DEFAULT_HALF_WIDTH };
        match self.params {
            FamilyParams::CothSingular { .. } => vec![zone(0.0)],
            FamilyParams::GeneralExpRatio { c1, c2 } => {
                let b = self.branch();
                let r = c2 / b.q(c1, self.k);
                if c1 != 0.0 && r < 0.0 {
                    vec![zone((-r).ln() / b.mu)]
                } else {
                    vec![]
                }
            }
            FamilyParams::ABExpForm { tau, a, b, .. } => {
                if b != 0.0 && a / b < 0.0 {
                    // a e^{τz} + b = 0
                    let z = (-b / a).ln() / tau.factor();
                    vec![zone(z * SQRT_2 * self.k)]
                } else {
                    vec![]
                }
            }
            _ => vec![],
        }
    }

    pub fn is_singular_at(&self, xi: f64) -> bool {
        self.singular_zones().iter().any(|z| z.contains(xi))
    }

    /// `U, U', U''` at ξ, refusing singular zones.
    pub fn profile(&self, xi: f64) -> Result<Profile, SolutionError> {
        if self.is_singular_at(xi) {
            return Err(SolutionError::SingularEvaluation { id: self.id.clone(), xi });
        }
        let a0 = self.a0 as f64;
        let p = match self.params {
            FamilyParams::GeneralExpRatio { c1, c2 } => {
                if c1 == 0.0 {
                    Profile { u: a0, du: 0.0, d2u: 0.0 }
                } else {
                    let b = self.branch();
                    let (s, t) = logistic(c2 / b.q(c1, self.k), -b.mu * xi);
                    let mu = b.mu;
                    Profile {
                        u: a0 + b.a1 * mu * s,
                        du: b.a1 * mu * mu * s * t,
                        d2u: b.a1 * mu.powi(3) * s * t * (t - s),
                    }
                }
            }
            FamilyParams::TanhKink { scale, .. } => {
                let (amp, rate) = self.tanh_shape(scale);
                let th = (rate * xi).tanh();
                let sech2 = 1.0 - th * th;
                Profile { u: a0 + amp * (1.0 + th), du: amp * rate * sech2, d2u: -2.0 * amp * rate * rate * th * sech2 }
            }
            FamilyParams::CothSingular { scale, .. } => {
                let (amp, rate) = self.tanh_shape(scale);
                let ct = 1.0 / (rate * xi).tanh();
                let csch2 = 1.0 - ct * ct;
                Profile { u: a0 + amp * (1.0 + ct), du: amp * rate * csch2, d2u: -2.0 * amp * rate * rate * ct * csch2 }
            }
            FamilyParams::ABExpForm { sigma, tau, a, b } => {
                let z = xi / (SQRT_2 * self.k);
                let dz = 1.0 / (SQRT_2 * self.k);
                let (sg, tg) = (sigma.factor(), tau.factor());
                // cosh z + τ sinh z = e^{τz}; the exponential avoids cancellation
                let (s, t) = logistic(a / b, tg * z);
                Profile {
                    u: a0 + sg * s,
                    du: -sg * tg * s * t * dz,
                    d2u: sg * s * t * (t - s) * dz * dz,
                }
            }
            FamilyParams::CanonicalTanh { rho, eta, scale, c, chi } => {
                let slope = self.canonical_slope(eta, scale);
                let th = (slope * xi + chi.factor() * c).tanh();
                let sech2 = 1.0 - th * th;
                let half = 0.5 * rho.factor();
                Profile {
                    u: half * (1.0 + th),
                    du: half * slope * sech2,
                    d2u: -2.0 * half * slope * slope * th * sech2,
                }
            }
        };
        Ok(Profile { u: p.u + self.shift, ..p })
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<f64, SolutionError> {
        Ok(self.profile(self.xi(x, t))?.u)
    }

    pub fn partials(&self, x: f64, t: f64) -> Result<Partials, SolutionError> {
        let p = self.profile(self.xi(x, t))?;
        Ok(Partials { u_t: self.w() * p.du, u_x: self.k * p.du, u_xx: self.k * self.k * p.d2u })
    }

    /// Limits of u as ξ → −∞ and ξ → +∞.
    pub fn asymptotes(&self) -> (f64, f64) {
        let a0 = self.a0 as f64;
        let (lo, hi) = match self.params {
            FamilyParams::GeneralExpRatio { c1, c2 } => {
                let b = self.branch();
                if c1 == 0.0 {
                    (a0, a0)
                } else if c2 == 0.0 {
                    (a0 + b.a1 * b.mu, a0 + b.a1 * b.mu)
                } else {
                    // s → 1 where μξ → +∞
                    let top = a0 + b.a1 * b.mu;
                    if b.mu > 0.0 {
                        (a0, top)
                    } else {
                        (top, a0)
                    }
                }
            }
            FamilyParams::TanhKink { scale, .. } | FamilyParams::CothSingular { scale, .. } => {
                let (amp, rate) = self.tanh_shape(scale);
                let sg = rate.signum();
                (a0 + amp * (1.0 - sg), a0 + amp * (1.0 + sg))
            }
            FamilyParams::ABExpForm { sigma, tau, .. } => {
                let full = a0 + sigma.factor();
                if tau == Sign::Plus {
                    (full, a0)
                } else {
                    (a0, full)
                }
            }
            FamilyParams::CanonicalTanh { rho, eta, .. } => {
                let full = rho.factor();
                if eta == Sign::Plus {
                    (0.0, full)
                } else {
                    (full, 0.0)
                }
            }
        };
        (lo + self.shift, hi + self.shift)
    }

    pub fn with_k(&self, k: f64) -> SolutionSpec {
        SolutionSpec { k, ..self.clone() }
    }
}

/// Roots of `u³ − u`.
pub const EQUILIBRIA: [f64; 3] = [-1.0, 0.0, 1.0];
