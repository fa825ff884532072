//! The catalog: every sign tuple and reading of the closed forms, addressed by
//! ids `eq{N}{signs}{variant}[k<float>]`.
//!
//! A sign string of length one stands for all signs equal; an empty one for
//! all `+`. Both `-` and `−` are accepted.

use std::collections::BTreeMap;

use super::{FamilyParams, Scale, SolutionError, SolutionSpec};
use crate::Sign;

/// `(equation, variant, sign names)` in enumeration order.
const LAYOUT: &[(u32, &str, &[&str])] = &[
    (19, "", &["s1", "sw"]),
    (20, "", &["s1", "sw"]),
    (21, "", &["s1", "sw"]),
    (22, "", &["a0", "s1", "sw"]),
    (23, "", &["a0", "s1", "sw"]),
    (23, "half", &["a0", "s1", "sw"]),
    (24, "", &["a0", "s1", "sw"]),
    (24, "coth", &["a0", "s1", "sw"]),
    (24, "cothhalf", &["a0", "s1", "sw"]),
    (25, "", &["sigma", "tau", "sw"]),
    (26, "", &["rho", "eta"]),
    (26, "half", &["rho", "eta", "sw"]),
    (27, "", &["tau", "sw"]),
    (28, "", &["eta"]),
    (28, "half", &["eta", "sw"]),
    (29, "", &["tau", "sw"]),
    (29, "plus", &["tau", "sw"]),
    (30, "", &["eta"]),
    (30, "half", &["eta", "sw"]),
];

/// Source equations with catalog entries.
pub const CATALOG_EQUATIONS: [u32; 12] = [19, 20, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30];

#[derive(Clone, Debug, PartialEq)]
pub struct EntryId {
    pub equation: u32,
    pub signs: Vec<Sign>,
    pub variant: String,
    pub k: Option<f64>,
}

impl EntryId {
    pub fn canonical(&self) -> String {
        let signs: String = self.signs.iter().map(|s| s.as_char()).collect();
        format!("eq{}{}{}", self.equation, signs, self.variant)
    }
}

fn arity(equation: u32, variant: &str) -> Option<usize> {
    LAYOUT.iter().find(|(e, v, _)| *e == equation && *v == variant).map(|(_, _, n)| n.len())
}

pub fn parse_id(id: &str) -> Result<EntryId, SolutionError> {
    let bad = || SolutionError::UnknownEntry(id.to_string());
    let rest = id.strip_prefix("eq").ok_or_else(bad)?;
    let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
    let equation: u32 = digits.parse().map_err(|_| bad())?;
    let mut rest = &rest[digits.len()..];
    let mut signs = Vec::new();
    while let Some(c) = rest.chars().next() {
        match Sign::from_char(c) {
            Some(s) => {
                signs.push(s);
                rest = &rest[c.len_utf8()..];
            }
            None => break,
        }
    }
    let variant: String = rest.chars().take_while(|c| c.is_ascii_lowercase() && *c != 'k').collect();
    let rest = &rest[variant.len()..];
    let k = match rest.strip_prefix('k') {
        Some(v) => Some(v.parse::<f64>().map_err(|_| bad())?),
        None if rest.is_empty() => None,
        None => return Err(bad()),
    };
    let n = arity(equation, &variant).ok_or_else(bad)?;
    let signs = match signs.len() {
        0 => vec![Sign::Plus; n],
        1 => vec![signs[0]; n],
        m if m == n => signs,
        _ => return Err(bad()),
    };
    Ok(EntryId { equation, signs, variant, k })
}

fn sign_tuples(n: usize) -> Vec<Vec<Sign>> {
    (0..1usize << n)
        .map(|bits| (0..n).map(|i| if bits >> (n - 1 - i) & 1 == 0 { Sign::Plus } else { Sign::Minus }).collect())
        .collect()
}

/// The entry for `(equation, variant, signs)` at wave number k.
fn build(equation: u32, variant: &str, signs: &[Sign], k: f64) -> Option<SolutionSpec> {
    let (_, _, names) = LAYOUT.iter().find(|(e, v, _)| *e == equation && *v == variant)?;
    if names.len() != signs.len() {
        return None;
    }
    let named: BTreeMap<&str, Sign> = names.iter().copied().zip(signs.iter().copied()).collect();
    let get = |n: &str| named.get(n).copied();
    let id = EntryId { equation, signs: signs.to_vec(), variant: variant.into(), k: None }.canonical();
    let reading = if variant.is_empty() { "printed".to_string() } else { variant.to_string() };
    let one = |a0: Sign| a0.int() as i8;

    let (a0, sw, params) = match equation {
        19 | 20 | 21 => {
            let params = match equation {
                19 => FamilyParams::GeneralExpRatio { c1: 1.0, c2: 1.0 },
                20 => FamilyParams::TanhKink { c1: 1.0, scale: Scale::Half },
                _ => FamilyParams::CothSingular { c1: 1.0, scale: Scale::Half },
            };
            (0, get("sw")?, params)
        }
        22 | 23 | 24 => {
            let params = match (equation, variant) {
                (22, _) => FamilyParams::GeneralExpRatio { c1: 1.0, c2: 1.0 },
                (23, "") | (24, "") => FamilyParams::TanhKink { c1: 1.0, scale: Scale::Full },
                (23, _) => FamilyParams::TanhKink { c1: 1.0, scale: Scale::Half },
                (_, "coth") => FamilyParams::CothSingular { c1: 1.0, scale: Scale::Full },
                _ => FamilyParams::CothSingular { c1: 1.0, scale: Scale::Half },
            };
            (one(get("a0")?), get("sw")?, params)
        }
        25 | 27 | 29 => {
            let (a0, sigma) = match (equation, variant) {
                (25, _) => (0, get("sigma")?),
                (27, _) => (1, Sign::Minus),
                (_, "plus") => (-1, Sign::Plus),
                _ => (-1, Sign::Minus),
            };
            (a0, get("sw")?, FamilyParams::ABExpForm { sigma, tau: get("tau")?, a: 1.0, b: 1.0 })
        }
        26 | 28 | 30 => {
            let (a0, rho) = match equation {
                26 => (0, get("rho")?),
                28 => (1, Sign::Plus),
                _ => (-1, Sign::Minus),
            };
            let eta = get("eta")?;
            let (scale, sw) = if variant.is_empty() { (Scale::Full, eta) } else { (Scale::Half, get("sw")?) };
            (a0, sw, FamilyParams::CanonicalTanh { rho, eta, scale, c: 0.0, chi: Sign::Plus })
        }
        _ => return None,
    };
    let s1 = match (equation, params) {
        (19..=24, _) => get("s1")?,
        (_, FamilyParams::ABExpForm { sigma, .. }) if a0 == 0 => sign_product(sigma, sw),
        (_, FamilyParams::CanonicalTanh { rho, .. }) if a0 == 0 => sign_product(rho, sw),
        _ => sign_product(if a0 > 0 { Sign::Plus } else { Sign::Minus }, sw),
    };
    Some(SolutionSpec { id, source_equation: equation, reading, a0, s1, sw, k, params, shift: 0.0 })
}

fn sign_product(a: Sign, b: Sign) -> Sign {
    if a == b {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Every sign tuple and reading, in stable order.
pub fn enumerate_catalog(k: f64) -> Vec<SolutionSpec> {
    LAYOUT
        .iter()
        .flat_map(|(eq, variant, names)| {
            sign_tuples(names.len()).into_iter().filter_map(move |signs| build(*eq, variant, &signs, k))
        })
        .collect()
}

/// Resolves an id; a `k<float>` suffix overrides `default_k`.
pub fn lookup(id: &str, default_k: f64) -> Result<SolutionSpec, SolutionError> {
    let entry = parse_id(id)?;
    let k = entry.k.unwrap_or(default_k);
    if !(k > 0.0 && k.is_finite()) {
        return Err(SolutionError::InvalidParameter(format!("k = {k} must be positive")));
    }
    build(entry.equation, &entry.variant, &entry.signs, k).ok_or_else(|| SolutionError::UnknownEntry(id.into()))
}
