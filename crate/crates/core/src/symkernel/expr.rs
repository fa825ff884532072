//! Canonical multivariate polynomials over ℚ(√2) with `S(ξ)` derivative atoms.
//!
//! A term is `coeff · Π atomᵉ · Π (S⁽ʲ⁾)ᵠ · S⁻ᵍ`. Terms live in a `BTreeMap` keyed
//! by their exponent signature, so every `SymExpr` is normalized by construction:
//! no duplicate signatures, no zero coefficients, canonical order
//! `(s_grade, deriv_powers, sym_powers)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::radical::Radical2;
use super::KernelError;

/// Scalar symbols. `A(i)` are the ansatz coefficients, `U(j)` the j-th
/// ξ-derivative of the unknown profile u (used by the reduced ODE).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    K,
    W,
    A(u8),
    C1,
    C2,
    U(u8),
}

impl Atom {
    /// Function atoms carry a ξ-derivative rule; the rest are constants.
    pub fn is_function(self) -> bool {
        matches!(self, Atom::U(_))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::K => write!(f, "k"),
            Atom::W => write!(f, "w"),
            Atom::A(i) => write!(f, "A{i}"),
            Atom::C1 => write!(f, "c1"),
            Atom::C2 => write!(f, "c2"),
            Atom::U(j) => write!(f, "u{}", primes(*j as u32)),
        }
    }
}

pub(crate) fn primes(j: u32) -> String {
    if j <= 3 {
        "'".repeat(j as usize)
    } else {
        format!("^({j})")
    }
}

/// Anything a monomial can carry an exponent on.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    /// A scalar atom.
    Atom(Atom),
    /// `S⁽ʲ⁾ = dʲS/dξʲ`, j ≥ 1.
    SDeriv(u32),
    /// `S⁻¹`; its exponent is the grade.
    InvS,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Atom(a) => write!(f, "{a}"),
            Var::SDeriv(j) => write!(f, "S{}", primes(*j)),
            Var::InvS => write!(f, "S^-1"),
        }
    }
}

/// Exponent signature of a monomial. Field order fixes the canonical term order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct MonoKey {
    grade: u32,
    derivs: Vec<(u32, u32)>,
    syms: Vec<(Atom, u32)>,
}

fn merge<T: Ord + Copy>(a: &[(T, u32)], b: &[(T, u32)]) -> Vec<(T, u32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// `a / b` on exponent lists; `None` if some exponent would go negative.
fn split<T: Ord + Copy>(a: &[(T, u32)], b: &[(T, u32)]) -> Option<Vec<(T, u32)>> {
    let mut out = Vec::with_capacity(a.len());
    let mut j = 0;
    for &(v, e) in a {
        if j < b.len() && b[j].0 < v {
            return None;
        }
        if j < b.len() && b[j].0 == v {
            let be = b[j].1;
            j += 1;
            match e.cmp(&be) {
                Ordering::Less => return None,
                Ordering::Equal => {}
                Ordering::Greater => out.push((v, e - be)),
            }
        } else {
            out.push((v, e));
        }
    }
    if j < b.len() {
        return None;
    }
    Some(out)
}

fn bump<T: Ord + Copy>(list: &mut Vec<(T, u32)>, v: T, delta: i64) {
    match list.binary_search_by(|(x, _)| x.cmp(&v)) {
        Ok(pos) => {
            let e = list[pos].1 as i64 + delta;
            debug_assert!(e >= 0);
            if e == 0 {
                list.remove(pos);
            } else {
                list[pos].1 = e as u32;
            }
        }
        Err(pos) => {
            debug_assert!(delta > 0);
            list.insert(pos, (v, delta as u32));
        }
    }
}

impl MonoKey {
    pub fn one() -> Self {
        MonoKey::default()
    }

    pub fn of(var: Var, power: u32) -> Self {
        let mut k = MonoKey::one();
        if power > 0 {
            match var {
                Var::Atom(a) => k.syms.push((a, power)),
                Var::SDeriv(j) => k.derivs.push((j, power)),
                Var::InvS => k.grade = power,
            }
        }
        k
    }

    pub fn s_grade(&self) -> u32 {
        self.grade
    }

    pub fn sym_powers(&self) -> &[(Atom, u32)] {
        &self.syms
    }

    pub fn deriv_powers(&self) -> &[(u32, u32)] {
        &self.derivs
    }

    pub fn power(&self, var: Var) -> u32 {
        match var {
            Var::Atom(a) => lookup(&self.syms, a),
            Var::SDeriv(j) => lookup(&self.derivs, j),
            Var::InvS => self.grade,
        }
    }

    pub fn is_one(&self) -> bool {
        self.grade == 0 && self.derivs.is_empty() && self.syms.is_empty()
    }

    pub fn mul(&self, other: &MonoKey) -> MonoKey {
        MonoKey {
            grade: self.grade + other.grade,
            derivs: merge(&self.derivs, &other.derivs),
            syms: merge(&self.syms, &other.syms),
        }
    }

    pub fn checked_div(&self, other: &MonoKey) -> Option<MonoKey> {
        Some(MonoKey {
            grade: self.grade.checked_sub(other.grade)?,
            derivs: split(&self.derivs, &other.derivs)?,
            syms: split(&self.syms, &other.syms)?,
        })
    }

    /// Componentwise minimum of exponents.
    pub fn gcd(&self, other: &MonoKey) -> MonoKey {
        fn min_list<T: Ord + Copy>(a: &[(T, u32)], b: &[(T, u32)]) -> Vec<(T, u32)> {
            a.iter()
                .filter_map(|&(v, e)| {
                    let f = lookup(b, v);
                    (f > 0).then_some((v, e.min(f)))
                })
                .collect()
        }
        MonoKey {
            grade: self.grade.min(other.grade),
            derivs: min_list(&self.derivs, &other.derivs),
            syms: min_list(&self.syms, &other.syms),
        }
    }

    fn without(&self, var: Var) -> MonoKey {
        let mut k = self.clone();
        match var {
            Var::Atom(a) => k.syms.retain(|(x, _)| *x != a),
            Var::SDeriv(j) => k.derivs.retain(|(x, _)| *x != j),
            Var::InvS => k.grade = 0,
        }
        k
    }

    fn total_degree(&self) -> u32 {
        self.grade
            + self.derivs.iter().map(|(_, e)| e).sum::<u32>()
            + self.syms.iter().map(|(_, e)| e).sum::<u32>()
    }

    /// Graded-lex comparison; a genuine monomial order, used for exact division.
    fn grlex_cmp(&self, other: &MonoKey) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.grade.cmp(&other.grade))
            .then_with(|| lex_sparse(&self.derivs, &other.derivs))
            .then_with(|| lex_sparse(&self.syms, &other.syms))
    }
}

fn lookup<T: Ord + Copy>(list: &[(T, u32)], v: T) -> u32 {
    list.binary_search_by(|(x, _)| x.cmp(&v)).map(|p| list[p].1).unwrap_or(0)
}

/// Lex comparison of dense exponent vectors given in sparse sorted form.
fn lex_sparse<T: Ord + Copy>(a: &[(T, u32)], b: &[(T, u32)]) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => {
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                    i += 1;
                    j += 1;
                }
            },
        }
    }
}

/// One stored term.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Monomial {
    pub coeff: Radical2,
    pub key: MonoKey,
}

impl Monomial {
    pub fn new(coeff: Radical2, key: MonoKey) -> Self {
        Monomial { coeff, key }
    }
}

/// Operation selector for [`SymExpr::combine`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombineOp {
    Add,
    Mul,
    IntPow(u32),
}

/// A normalized polynomial expression.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct SymExpr {
    terms: BTreeMap<MonoKey, Radical2>,
}

/// Scalar bindings for [`SymExpr::substitute`].
pub type Bindings = BTreeMap<Var, SymExpr>;

impl SymExpr {
    pub fn zero() -> Self {
        SymExpr::default()
    }

    pub fn one() -> Self {
        SymExpr::constant(Radical2::one())
    }

    pub fn constant(c: Radical2) -> Self {
        SymExpr::term(c, MonoKey::one())
    }

    pub fn int(n: i64) -> Self {
        SymExpr::constant(Radical2::from_int(n))
    }

    pub fn term(coeff: Radical2, key: MonoKey) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(key, coeff);
        }
        SymExpr { terms }
    }

    pub fn atom(a: Atom) -> Self {
        SymExpr::var(Var::Atom(a))
    }

    pub fn var(v: Var) -> Self {
        SymExpr::term(Radical2::one(), MonoKey::of(v, 1))
    }

    /// `S⁽ʲ⁾`
    pub fn sderiv(j: u32) -> Self {
        assert!(j >= 1, "S-derivative order starts at 1");
        SymExpr::var(Var::SDeriv(j))
    }

    /// `S⁻ᵍ`
    pub fn s_inverse_power(g: u32) -> Self {
        SymExpr::term(Radical2::one(), MonoKey::of(Var::InvS, g))
    }

    /// Builds from raw terms, merging duplicates and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = Monomial>>(terms: I) -> Self {
        let mut out = SymExpr::zero();
        for m in terms {
            out.add_term(m.coeff, m.key);
        }
        out
    }

    fn add_term(&mut self, coeff: Radical2, key: MonoKey) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Canonical copy. Storage is already canonical, so this is a clone; kept
    /// for the explicit normalization contract.
    pub fn normalize(&self) -> SymExpr {
        SymExpr::from_terms(self.monomials())
    }

    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.terms.iter().map(|(k, c)| Monomial::new(c.clone(), k.clone()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonoKey, &Radical2)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value, if the expression has no symbols.
    pub fn as_constant(&self) -> Option<Radical2> {
        match self.terms.len() {
            0 => Some(Radical2::zero()),
            1 => {
                let (k, c) = self.terms.iter().next().unwrap();
                k.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn mentions(&self, var: Var) -> bool {
        self.terms.keys().any(|k| k.power(var) > 0)
    }

    /// Largest exponent of `var` over all terms.
    pub fn degree_in(&self, var: Var) -> u32 {
        self.terms.keys().map(|k| k.power(var)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Radical2) -> SymExpr {
        if c.is_zero() {
            return SymExpr::zero();
        }
        SymExpr { terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    pub fn mul_key(&self, key: &MonoKey) -> SymExpr {
        SymExpr { terms: self.terms.iter().map(|(k, v)| (k.mul(key), v.clone())).collect() }
    }

    pub fn add(&self, other: &SymExpr) -> SymExpr {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(c.clone(), k.clone());
        }
        out
    }

    pub fn sub(&self, other: &SymExpr) -> SymExpr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SymExpr {
        self.scale(&Radical2::from_int(-1))
    }

    pub fn mul(&self, other: &SymExpr) -> SymExpr {
        let mut out = SymExpr::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.add_term(ca * cb, ka.mul(kb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> SymExpr {
        let mut acc = SymExpr::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// N-ary `add` / `mul`, or `int_pow` of a single operand.
    pub fn combine(op: CombineOp, operands: &[SymExpr]) -> SymExpr {
        match op {
            CombineOp::Add => operands.iter().fold(SymExpr::zero(), |acc, e| acc.add(e)),
            CombineOp::Mul => operands.iter().fold(SymExpr::one(), |acc, e| acc.mul(e)),
            CombineOp::IntPow(n) => {
                let base = operands.iter().fold(SymExpr::one(), |acc, e| acc.mul(e));
                base.pow(n)
            }
        }
    }

    /// d/dξ with `dS⁽ʲ⁾/dξ = S⁽ʲ⁺¹⁾`, `d(S⁻ᵍ)/dξ = −g·S⁻⁽ᵍ⁺¹⁾·S'` and
    /// `d u⁽ʲ⁾/dξ = u⁽ʲ⁺¹⁾`. Other atoms are constants.
    pub fn diff_xi(&self) -> SymExpr {
        let mut out = SymExpr::zero();
        for (key, coeff) in &self.terms {
            for &(j, q) in &key.derivs {
                let mut k = key.clone();
                bump(&mut k.derivs, j, -1);
                bump(&mut k.derivs, j + 1, 1);
                out.add_term(coeff * &Radical2::from_int(q as i64), k);
            }
            for &(a, q) in &key.syms {
                if let Atom::U(j) = a {
                    let mut k = key.clone();
                    bump(&mut k.syms, a, -1);
                    bump(&mut k.syms, Atom::U(j + 1), 1);
                    out.add_term(coeff * &Radical2::from_int(q as i64), k);
                }
            }
            if key.grade > 0 {
                let g = key.grade;
                let mut k = key.clone();
                k.grade = g + 1;
                bump(&mut k.derivs, 1, 1);
                out.add_term(coeff * &Radical2::from_int(-(g as i64)), k);
            }
        }
        out
    }

    /// Ring-homomorphic replacement of scalar atoms. S-derivative atoms and
    /// `S⁻¹` are function symbols and cannot be bound.
    pub fn substitute(&self, bindings: &Bindings) -> Result<SymExpr, KernelError> {
        if let Some(v) = bindings.keys().find(|v| !matches!(v, Var::Atom(_))) {
            return Err(KernelError::FunctionSymbolBinding(*v));
        }
        if bindings.is_empty() {
            return Ok(self.clone());
        }
        let mut cache: BTreeMap<(Atom, u32), SymExpr> = BTreeMap::new();
        let mut out = SymExpr::zero();
        for (key, coeff) in &self.terms {
            let mut rest = key.clone();
            let mut factor = SymExpr::constant(coeff.clone());
            for &(a, e) in &key.syms {
                if let Some(b) = bindings.get(&Var::Atom(a)) {
                    rest.syms.retain(|(x, _)| *x != a);
                    let p = cache.entry((a, e)).or_insert_with(|| b.pow(e));
                    factor = factor.mul(p);
                }
            }
            out = out.add(&factor.mul_key(&rest));
        }
        Ok(out)
    }

    /// Groups terms by S-grade: `self = Σ_g result[g] · S⁻ᵍ`.
    pub fn collect_grades(&self) -> BTreeMap<u32, SymExpr> {
        let mut out: BTreeMap<u32, SymExpr> = BTreeMap::new();
        for (key, coeff) in &self.terms {
            let mut k = key.clone();
            k.grade = 0;
            out.entry(key.grade).or_default().add_term(coeff.clone(), k);
        }
        out
    }

    /// Inverse of [`SymExpr::collect_grades`].
    pub fn from_grades(grades: &BTreeMap<u32, SymExpr>) -> SymExpr {
        grades
            .iter()
            .fold(SymExpr::zero(), |acc, (g, e)| acc.add(&e.mul(&SymExpr::s_inverse_power(*g))))
    }

    /// Coefficient of `var^power`: the terms carrying exactly that power,
    /// with the factor removed.
    pub fn coefficient(&self, var: Var, power: u32) -> SymExpr {
        let mut out = SymExpr::zero();
        for (key, coeff) in &self.terms {
            if key.power(var) == power {
                out.add_term(coeff.clone(), key.without(var));
            }
        }
        out
    }

    /// Largest monomial dividing every term (coefficient 1).
    pub fn monomial_content(&self) -> MonoKey {
        let mut it = self.terms.keys();
        match it.next() {
            None => MonoKey::one(),
            Some(first) => it.fold(first.clone(), |acc, k| acc.gcd(k)),
        }
    }

    pub fn div_monomial(&self, key: &MonoKey) -> Option<SymExpr> {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            terms.insert(k.checked_div(key)?, c.clone());
        }
        Some(SymExpr { terms })
    }

    /// Removes the monomial content, returning `(content, primitive part)`.
    pub fn split_content(&self) -> (MonoKey, SymExpr) {
        let c = self.monomial_content();
        let rest = self.div_monomial(&c).expect("content divides every term");
        (c, rest)
    }

    fn leading(&self) -> Option<(&MonoKey, &Radical2)> {
        self.terms.iter().max_by(|a, b| a.0.grlex_cmp(b.0))
    }

    /// Exact polynomial division; `None` if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &SymExpr) -> Option<SymExpr> {
        let (dk, dc) = divisor.leading()?;
        let (dk, dc) = (dk.clone(), dc.clone());
        let mut rem = self.clone();
        let mut quot = SymExpr::zero();
        while let Some((rk, rc)) = rem.leading() {
            let qk = rk.checked_div(&dk)?;
            let qc = rc.checked_div(&dc)?;
            let t = SymExpr::term(qc, qk);
            rem = rem.sub(&t.mul(divisor));
            quot = quot.add(&t);
        }
        Some(quot)
    }

    /// Returns `denomᴰ · self|_{S⁽ʲ⁾ = numer/denom}` where D is the largest
    /// power of `S⁽ʲ⁾` in `self`. The result vanishes iff the substituted
    /// expression does (for nonzero `denom`).
    pub fn replace_sderiv(&self, j: u32, numer: &SymExpr, denom: &SymExpr) -> SymExpr {
        let var = Var::SDeriv(j);
        let d = self.degree_in(var);
        self.replace_sderiv_to_degree(j, numer, denom, d)
    }

    pub(crate) fn replace_sderiv_to_degree(
        &self,
        j: u32,
        numer: &SymExpr,
        denom: &SymExpr,
        d: u32,
    ) -> SymExpr {
        let var = Var::SDeriv(j);
        let mut out = SymExpr::zero();
        for q in 0..=d {
            let part = self.coefficient(var, q);
            if part.is_zero() {
                continue;
            }
            out = out.add(&part.mul(&numer.pow(q)).mul(&denom.pow(d - q)));
        }
        out
    }

    /// Coefficients `[c0, c1, ...]` in `atom`, when `atom` is the only symbol.
    pub fn univariate_coeffs(&self, atom: Atom) -> Option<Vec<Radical2>> {
        let deg = self.degree_in(Var::Atom(atom));
        let mut coeffs = vec![Radical2::zero(); deg as usize + 1];
        for (key, c) in &self.terms {
            let e = key.power(Var::Atom(atom));
            if !key.without(Var::Atom(atom)).is_one() {
                return None;
            }
            coeffs[e as usize] = c.clone();
        }
        Some(coeffs)
    }

    /// Common total degree in `atoms` if every term has the same one.
    pub fn homogeneous_degree(&self, atoms: &[Atom]) -> Option<u32> {
        let mut deg = None;
        for key in self.terms.keys() {
            let d: u32 = atoms.iter().map(|a| key.power(Var::Atom(*a))).sum();
            match deg {
                None => deg = Some(d),
                Some(prev) if prev != d => return None,
                _ => {}
            }
        }
        Some(deg.unwrap_or(0))
    }

    /// Numeric value with atoms bound by `value`; `None` if an S atom or an
    /// unbound atom remains.
    pub fn eval_f64(&self, value: &dyn Fn(Atom) -> Option<f64>) -> Option<f64> {
        let mut acc = 0.0;
        for (key, c) in &self.terms {
            if key.grade > 0 || !key.derivs.is_empty() {
                return None;
            }
            let mut t = c.to_f64();
            for &(a, e) in &key.syms {
                t *= value(a)?.powi(e as i32);
            }
            acc += t;
        }
        Some(acc)
    }
}

impl From<Radical2> for SymExpr {
    fn from(c: Radical2) -> Self {
        SymExpr::constant(c)
    }
}

impl From<Atom> for SymExpr {
    fn from(a: Atom) -> Self {
        SymExpr::atom(a)
    }
}

impl std::ops::Add for &SymExpr {
    type Output = SymExpr;
    fn add(self, rhs: &SymExpr) -> SymExpr {
        SymExpr::add(self, rhs)
    }
}

impl std::ops::Sub for &SymExpr {
    type Output = SymExpr;
    fn sub(self, rhs: &SymExpr) -> SymExpr {
        SymExpr::sub(self, rhs)
    }
}

impl std::ops::Mul for &SymExpr {
    type Output = SymExpr;
    fn mul(self, rhs: &SymExpr) -> SymExpr {
        SymExpr::mul(self, rhs)
    }
}

impl std::ops::Neg for &SymExpr {
    type Output = SymExpr;
    fn neg(self) -> SymExpr {
        SymExpr::neg(self)
    }
}
