//! Exact numbers of the form `r + s·√2` with arbitrary-precision rational parts.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::{BigInt, Sign as BigSign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number; gcd-normalized with a positive denominator.
pub type Rational = BigRational;

/// An element `r + s·√2` of the field ℚ(√2).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Radical2 {
    r: Rational,
    s: Rational,
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Square root of a non-negative rational, if it is itself rational.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().magnitude();
    let d = q.denom().magnitude();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Rational::new(
            BigInt::from_biguint(BigSign::Plus, rn),
            BigInt::from_biguint(BigSign::Plus, rd),
        ))
    } else {
        None
    }
}

impl Radical2 {
    pub fn new(r: Rational, s: Rational) -> Self {
        Radical2 { r, s }
    }

    pub fn zero() -> Self {
        Radical2::default()
    }

    pub fn one() -> Self {
        Radical2::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Radical2 { r: rat(n), s: Rational::zero() }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Radical2 { r: Rational::new(num.into(), den.into()), s: Rational::zero() }
    }

    pub fn from_rational(r: Rational) -> Self {
        Radical2 { r, s: Rational::zero() }
    }

    /// `√2`
    pub fn sqrt2() -> Self {
        Radical2 { r: Rational::zero(), s: Rational::one() }
    }

    /// `q·√2` for a rational `num/den`.
    pub fn sqrt2_times(num: i64, den: i64) -> Self {
        Radical2 { r: Rational::zero(), s: Rational::new(num.into(), den.into()) }
    }

    pub fn rational_part(&self) -> &Rational {
        &self.r
    }

    pub fn sqrt2_part(&self) -> &Rational {
        &self.s
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.r.is_one() && self.s.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.s.is_zero()
    }

    /// `r − s·√2`
    pub fn conj(&self) -> Self {
        Radical2 { r: self.r.clone(), s: -self.s.clone() }
    }

    /// Field norm `r² − 2s²`, equal to `self · conj(self)`.
    pub fn norm(&self) -> Rational {
        &self.r * &self.r - rat(2) * &self.s * &self.s
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        Some(Radical2 { r: &self.r / &n, s: -(&self.s / &n) })
    }

    pub fn checked_div(&self, rhs: &Radical2) -> Option<Self> {
        rhs.inv().map(|inv| self * &inv)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Radical2::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Sign of the real number `r + s·√2` (−1, 0 or 1).
    pub fn signum(&self) -> i32 {
        let sr = sign_of(&self.r);
        let ss = sign_of(&self.s);
        if sr == 0 {
            return ss;
        }
        if ss == 0 || sr == ss {
            return sr;
        }
        // opposite signs: compare r² with 2s²
        let lhs = &self.r * &self.r;
        let rhs = rat(2) * &self.s * &self.s;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sr,
            Ordering::Less => ss,
            Ordering::Equal => 0,
        }
    }

    /// Exact square root inside ℚ(√2), when one exists.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Radical2::zero());
        }
        if self.signum() < 0 {
            return None;
        }
        if self.s.is_zero() {
            if let Some(q) = rational_sqrt(&self.r) {
                return Some(Radical2::from_rational(q));
            }
            // r = 2y²  ⇒  √r = y·√2
            return rational_sqrt(&(&self.r / rat(2)))
                .map(|y| Radical2 { r: Rational::zero(), s: y });
        }
        // (x + y√2)² = x² + 2y² + 2xy√2
        let big_n = rational_sqrt(&self.norm())?;
        for cand in [&self.r + &big_n, &self.r - &big_n] {
            let x2 = cand / rat(2);
            if let Some(x) = rational_sqrt(&x2) {
                if x.is_zero() {
                    continue;
                }
                let y = &self.s / (rat(2) * &x);
                let root = Radical2 { r: x, s: y };
                if &(&root * &root) == self {
                    return Some(if root.signum() < 0 { -root } else { root });
                }
            }
        }
        None
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.r.to_f64().unwrap_or(f64::NAN);
        let s = self.s.to_f64().unwrap_or(f64::NAN);
        r + s * std::f64::consts::SQRT_2
    }
}

fn sign_of(q: &Rational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

impl From<i64> for Radical2 {
    fn from(n: i64) -> Self {
        Radical2::from_int(n)
    }
}

impl From<Rational> for Radical2 {
    fn from(r: Rational) -> Self {
        Radical2::from_rational(r)
    }
}

impl PartialOrd for Radical2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by real value.
impl Ord for Radical2 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl Add for &Radical2 {
    type Output = Radical2;
    fn add(self, rhs: &Radical2) -> Radical2 {
        Radical2 { r: &self.r + &rhs.r, s: &self.s + &rhs.s }
    }
}

impl Sub for &Radical2 {
    type Output = Radical2;
    fn sub(self, rhs: &Radical2) -> Radical2 {
        Radical2 { r: &self.r - &rhs.r, s: &self.s - &rhs.s }
    }
}

impl Mul for &Radical2 {
    type Output = Radical2;
    fn mul(self, rhs: &Radical2) -> Radical2 {
        Radical2 {
            r: &self.r * &rhs.r + rat(2) * &self.s * &rhs.s,
            s: &self.r * &rhs.s + &self.s * &rhs.r,
        }
    }
}

/// Panics on division by zero, like the primitive numeric types.
impl Div for &Radical2 {
    type Output = Radical2;
    fn div(self, rhs: &Radical2) -> Radical2 {
        self.checked_div(rhs).expect("division by zero in Q(sqrt 2)")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Radical2 {
            type Output = Radical2;
            fn $m(self, rhs: Radical2) -> Radical2 {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Radical2> for Radical2 {
            type Output = Radical2;
            fn $m(self, rhs: &Radical2) -> Radical2 {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Radical2 {
    type Output = Radical2;
    fn neg(self) -> Radical2 {
        Radical2 { r: -self.r, s: -self.s }
    }
}

impl Neg for &Radical2 {
    type Output = Radical2;
    fn neg(self) -> Radical2 {
        -self.clone()
    }
}

impl AddAssign<&Radical2> for Radical2 {
    fn add_assign(&mut self, rhs: &Radical2) {
        self.r += &rhs.r;
        self.s += &rhs.s;
    }
}

impl SubAssign<&Radical2> for Radical2 {
    fn sub_assign(&mut self, rhs: &Radical2) {
        self.r -= &rhs.r;
        self.s -= &rhs.s;
    }
}

impl MulAssign<&Radical2> for Radical2 {
    fn mul_assign(&mut self, rhs: &Radical2) {
        *self = &*self * rhs;
    }
}

fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Plain-text rendering: `3`, `-1/2`, `sqrt(2)`, `3/2*sqrt(2)`, `(1 + sqrt(2))`.
impl fmt::Display for Radical2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let surd = |s: &Rational| -> String {
            if s.is_one() {
                "sqrt(2)".to_string()
            } else if (-s).is_one() {
                "-sqrt(2)".to_string()
            } else {
                format!("{}*sqrt(2)", fmt_rational(s))
            }
        };
        match (self.r.is_zero(), self.s.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.r)),
            (true, false) => write!(f, "{}", surd(&self.s)),
            (false, false) => {
                let s_abs = self.s.abs();
                let op = if self.s.is_negative() { "-" } else { "+" };
                write!(f, "({} {} {})", fmt_rational(&self.r), op, surd(&s_abs))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugate_identity_on_small_values() {
        let v = Radical2::new(rat(3), Rational::new(1.into(), 2.into()));
        let prod = &v * &v.conj();
        assert_eq!(prod, Radical2::from_rational(v.norm()));
        assert_eq!(v.norm(), Rational::new(17.into(), 2.into()));
    }

    #[test]
    fn sqrt2_squares_to_two() {
        assert_eq!(&Radical2::sqrt2() * &Radical2::sqrt2(), Radical2::from_int(2));
    }

    #[test]
    fn inverse_of_zero_is_none() {
        assert!(Radical2::zero().inv().is_none());
    }

    #[test]
    fn signum_of_mixed_terms() {
        // 3 - 2√2 ≈ 0.17
        assert_eq!(Radical2::new(rat(3), rat(-2)).signum(), 1);
        // 1 - √2 < 0
        assert_eq!(Radical2::new(rat(1), rat(-1)).signum(), -1);
        assert_eq!(Radical2::zero().signum(), 0);
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(Radical2::from_int(72).sqrt(), Some(Radical2::sqrt2_times(6, 1)));
        assert_eq!(Radical2::from_ratio(9, 4).sqrt(), Some(Radical2::from_ratio(3, 2)));
        // (1 + √2)² = 3 + 2√2
        assert_eq!(Radical2::new(rat(3), rat(2)).sqrt(), Some(Radical2::new(rat(1), rat(1))));
        assert_eq!(Radical2::from_int(3).sqrt(), None);
        assert_eq!(Radical2::from_int(-4).sqrt(), None);
    }

    #[test]
    fn display_forms() {
        assert_eq!(Radical2::from_ratio(-1, 2).to_string(), "-1/2");
        assert_eq!(Radical2::sqrt2_times(3, 2).to_string(), "3/2*sqrt(2)");
        assert_eq!(Radical2::new(rat(1), rat(-1)).to_string(), "(1 - sqrt(2))");
    }
}
