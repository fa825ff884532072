//! Plain-text rendering in the derivation's notation: `S'`, `S''`, `S'''`, `S^-2`.
//!
//! Display order differs from storage order: within a grade, higher
//! S-derivatives come first, then larger total degree, so `A0^3 - A0` reads
//! the way it is usually written.

use std::cmp::Ordering;
use std::fmt;

use super::expr::{primes, MonoKey, SymExpr};
use super::radical::Radical2;

fn display_cmp(a: &MonoKey, b: &MonoKey) -> Ordering {
    let deg = |k: &MonoKey| k.sym_powers().iter().map(|(_, e)| e).sum::<u32>();
    a.s_grade()
        .cmp(&b.s_grade())
        .then_with(|| b.deriv_powers().cmp(a.deriv_powers()))
        .then_with(|| deg(b).cmp(&deg(a)))
        .then_with(|| b.sym_powers().cmp(a.sym_powers()))
}

fn factors(key: &MonoKey) -> Vec<String> {
    let mut out = Vec::new();
    for (a, e) in key.sym_powers() {
        out.push(if *e == 1 { a.to_string() } else { format!("{a}^{e}") });
    }
    for (j, e) in key.deriv_powers() {
        let s = format!("S{}", primes(*j));
        out.push(if *e == 1 { s } else { format!("{s}^{e}") });
    }
    if key.s_grade() > 0 {
        out.push(format!("S^-{}", key.s_grade()));
    }
    out
}

fn term_body(coeff: &Radical2, key: &MonoKey) -> String {
    let f = factors(key);
    if f.is_empty() {
        return coeff.to_string();
    }
    let body = f.join("*");
    if coeff.is_one() {
        body
    } else {
        format!("{coeff}*{body}")
    }
}

/// Renders with `+`/`-` separators in display order; `0` for the empty sum.
pub fn render(e: &SymExpr) -> String {
    let mut terms: Vec<(&MonoKey, &Radical2)> = e.terms().collect();
    if terms.is_empty() {
        return "0".to_string();
    }
    terms.sort_by(|a, b| display_cmp(a.0, b.0));
    let mut out = String::new();
    for (i, (key, coeff)) in terms.into_iter().enumerate() {
        let neg = coeff.signum() < 0;
        let mag = if neg { -coeff } else { coeff.clone() };
        let body = term_body(&mag, key);
        match (i, neg) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
        }
    }
    out
}

/// Pulls the monomial content out front: `A1*(A1^2 - 2*k^2)*S'^3`.
pub fn render_factored(e: &SymExpr) -> String {
    if e.len() <= 1 {
        return render(e);
    }
    let (content, rest) = e.split_content();
    if content.is_one() {
        return render(e);
    }
    let sym_part = MonoKey::one();
    let mut sym_content = sym_part.clone();
    let mut s_content = sym_part;
    for (a, p) in content.sym_powers() {
        sym_content = sym_content.mul(&MonoKey::of(super::Var::Atom(*a), *p));
    }
    for (j, p) in content.deriv_powers() {
        s_content = s_content.mul(&MonoKey::of(super::Var::SDeriv(*j), *p));
    }
    s_content = s_content.mul(&MonoKey::of(super::Var::InvS, content.s_grade()));
    let mut parts = factors(&sym_content);
    parts.push(format!("({})", render(&rest)));
    parts.extend(factors(&s_content));
    parts.join("*")
}

impl fmt::Display for SymExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}
