//! Exact scalar fields: the rationals and prime fields `F_p`.
//!
//! Rationals use a machine-word fast path and fall back to arbitrary
//! precision only when a numerator or denominator leaves the `i64` range.
//! Every value is kept in canonical form, so derived equality is exact
//! equality.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};

const PRIME_LIMIT: u64 = 1 << 61;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rationals,
    /// `F_p`, with `p` prime and below `2^61`.
    Prime(u64),
}

impl Field {
    pub fn prime(p: u64) -> Result<Field> {
        if p < PRIME_LIMIT && is_prime(p) {
            Ok(Field::Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    /// Characteristic of the field (0 for the rationals).
    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => *p,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, x: i64) -> Scalar {
        match *self {
            Field::Rationals => Scalar::Rat(Rational::from_i128(x as i128, 1)),
            Field::Prime(p) => Scalar::Mod {
                v: (x as i128).rem_euclid(p as i128) as u64,
                p,
            },
        }
    }

    /// `num / den` as an element of the field. Fails if `den` vanishes in the field.
    pub fn from_fraction(&self, num: i64, den: i64) -> Result<Scalar> {
        self.from_i64(num).div(&self.from_i64(den))
    }

    /// Parses the text encoding: decimal integers, `a/b` for rationals,
    /// residues in `[0, p)` for prime fields.
    pub fn parse(&self, text: &str) -> Result<Scalar> {
        let err = |reason: &str| Error::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let t = text.trim();
        match *self {
            Field::Rationals => {
                let (n, d) = match t.split_once('/') {
                    Some((n, d)) => (n, Some(d)),
                    None => (t, None),
                };
                let num: BigInt = n.parse().map_err(|_| err("bad numerator"))?;
                let den: BigInt = match d {
                    Some(d) => d.parse().map_err(|_| err("bad denominator"))?,
                    None => BigInt::one(),
                };
                if !den.is_positive() {
                    return Err(err("denominator must be positive"));
                }
                Ok(Scalar::Rat(Rational::from_big(BigRational::new(num, den))))
            }
            Field::Prime(p) => {
                let v: u64 = t.parse().map_err(|_| err("bad residue"))?;
                if v >= p {
                    return Err(err("residue out of range"));
                }
                Ok(Scalar::Mod { v, p })
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F{p}"),
        }
    }
}

impl std::str::FromStr for Field {
    type Err = Error;

    /// Accepts `Q` (or `QQ`, `rationals`) and `F<p>` (or a bare prime).
    fn from_str(s: &str) -> Result<Field> {
        let t = s.trim();
        match t {
            "Q" | "q" | "QQ" | "rationals" => Ok(Field::Rationals),
            _ => {
                let digits = t.strip_prefix('F').or_else(|| t.strip_prefix('f')).unwrap_or(t);
                let p: u64 = digits.parse().map_err(|_| Error::Parse {
                    text: s.to_string(),
                    reason: "expected Q or F<p>".to_string(),
                })?;
                Field::prime(p)
            }
        }
    }
}

/// Deterministic Miller-Rabin, exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    r
}

/// A rational number in lowest terms with positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rational {
    /// Both parts fit in `i64` and neither is `i64::MIN`.
    Small(i64, i64),
    Big(BigRational),
}

fn fits(x: i128) -> bool {
    x > i64::MIN as i128 && x <= i64::MAX as i128
}

impl Rational {
    fn from_i128(num: i128, den: i128) -> Rational {
        debug_assert!(den != 0);
        let g = num.gcd(&den);
        let (mut n, mut d) = if g > 1 { (num / g, den / g) } else { (num, den) };
        if d < 0 {
            n = -n;
            d = -d;
        }
        if fits(n) && fits(d) {
            Rational::Small(n as i64, d as i64)
        } else {
            Rational::Big(BigRational::new(BigInt::from(n), BigInt::from(d)))
        }
    }

    fn from_big(r: BigRational) -> Rational {
        match (r.numer().to_i128(), r.denom().to_i128()) {
            (Some(n), Some(d)) if fits(n) && fits(d) => Rational::Small(n as i64, d as i64),
            _ => Rational::Big(r),
        }
    }

    fn to_big(&self) -> BigRational {
        match self {
            Rational::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rational::Big(r) => r.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rational::Small(0, _))
    }

    fn add(&self, o: &Rational) -> Rational {
        match (self, o) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                if b == d {
                    Rational::from_i128(a + c, b)
                } else {
                    Rational::from_i128(a * d + c * b, b * d)
                }
            }
            _ => Rational::from_big(self.to_big() + o.to_big()),
        }
    }

    fn neg(&self) -> Rational {
        match self {
            Rational::Small(a, b) => Rational::Small(-a, *b),
            Rational::Big(r) => Rational::Big(-r),
        }
    }

    fn mul(&self, o: &Rational) -> Rational {
        match (self, o) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                Rational::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Rational::from_big(self.to_big() * o.to_big()),
        }
    }

    fn inv(&self) -> Option<Rational> {
        match self {
            Rational::Small(0, _) => None,
            Rational::Small(a, b) => {
                if *a < 0 {
                    Some(Rational::Small(-b, -a))
                } else {
                    Some(Rational::Small(*b, *a))
                }
            }
            Rational::Big(r) => Some(Rational::from_big(r.recip())),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(n, 1) => write!(f, "{n}"),
            Rational::Small(n, d) => write!(f, "{n}/{d}"),
            Rational::Big(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Rational::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

/// An element of a [`Field`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(Rational),
    Mod { v: u64, p: u64 },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rat(_) => Field::Rationals,
            Scalar::Mod { p, .. } => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Mod { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => *r == Rational::Small(1, 1),
            Scalar::Mod { v, .. } => *v == 1,
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        match self {
            Scalar::Rat(r) => r.inv().map(Scalar::Rat).ok_or(Error::DivisionByZero),
            Scalar::Mod { v, p } => {
                if *v == 0 {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(Scalar::Mod {
                        v: pow_mod(*v, p - 2, *p),
                        p: *p,
                    })
                }
            }
        }
    }

    pub fn div(&self, o: &Scalar) -> Result<Scalar> {
        Ok(self * &o.inv()?)
    }

    /// `self^e` for a signed exponent.
    pub fn pow(&self, e: i64) -> Result<Scalar> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = self.field().one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            k >>= 1;
        }
        Ok(acc)
    }

    /// Canonical text encoding, as used in files.
    pub fn encode(&self) -> String {
        match self {
            Scalar::Rat(r) => r.to_string(),
            Scalar::Mod { v, .. } => v.to_string(),
        }
    }

    /// Numerator and denominator, when this is a rational.
    pub fn as_big_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Rat(r) => Some(r.to_big()),
            Scalar::Mod { .. } => None,
        }
    }
}

/// Rationals print as `a/b`, residues as `v (mod p)`.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{r}"),
            Scalar::Mod { v, p } => write!(f, "{v} (mod {p})"),
        }
    }
}

#[inline]
fn same_field(a: &Scalar, b: &Scalar) -> u64 {
    match (a, b) {
        (Scalar::Mod { p, .. }, Scalar::Mod { p: q, .. }) if p == q => *p,
        (Scalar::Rat(_), Scalar::Rat(_)) => 0,
        _ => panic!("scalar field mismatch: {} vs {}", a.field(), b.field()),
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a.add(b)),
            (Scalar::Mod { v: a, .. }, Scalar::Mod { v: b, .. }) => {
                let p = same_field(self, o);
                let s = a + b;
                Scalar::Mod {
                    v: if s >= p { s - p } else { s },
                    p,
                }
            }
            _ => panic!("scalar field mismatch"),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a.add(&b.neg())),
            (Scalar::Mod { v: a, .. }, Scalar::Mod { v: b, .. }) => {
                let p = same_field(self, o);
                Scalar::Mod {
                    v: if a >= b { a - b } else { a + p - b },
                    p,
                }
            }
            _ => panic!("scalar field mismatch"),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => {
                if a.is_zero() || b.is_zero() {
                    return Scalar::Rat(Rational::Small(0, 1));
                }
                Scalar::Rat(a.mul(b))
            }
            (Scalar::Mod { v: a, .. }, Scalar::Mod { v: b, .. }) => {
                let p = same_field(self, o);
                Scalar::Mod {
                    v: mul_mod(*a, *b, p),
                    p,
                }
            }
            _ => panic!("scalar field mismatch"),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(a.neg()),
            Scalar::Mod { v, p } => Scalar::Mod {
                v: if *v == 0 { 0 } else { p - v },
                p: *p,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Scalar {
        Field::Rationals.from_fraction(n, d).unwrap()
    }

    #[test]
    fn primes() {
        assert!(Field::prime(7).is_ok());
        assert_eq!(Field::prime(8), Err(Error::NotPrime(8)));
        assert!(Field::prime(1).is_err());
        assert!(Field::prime((1 << 61) - 1).is_ok());
        assert!(Field::prime(1 << 61).is_err());
        assert!(!is_prime(3215031751));
    }

    #[test]
    fn rational_arithmetic() {
        assert_eq!(&q(1, 2) + &q(1, 3), q(5, 6));
        assert_eq!((&q(1, 2) + &q(1, 2)).encode(), "1");
        assert_eq!(q(-6, -4).encode(), "3/2");
        assert_eq!(q(3, -6).encode(), "-1/2");
        assert_eq!(q(2, 3).inv().unwrap(), q(3, 2));
        assert_eq!(q(0, 1).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn prime_arithmetic() {
        let f = Field::prime(7).unwrap();
        assert_eq!(f.from_i64(-1).encode(), "6");
        assert_eq!(f.from_i64(3).inv().unwrap(), f.from_i64(5));
        assert_eq!(f.from_i64(5).to_string(), "5 (mod 7)");
        assert_eq!(f.from_i64(3).pow(-1).unwrap(), f.from_i64(5));
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = q(i64::MAX, 1);
        let sq = &big * &big;
        assert!(matches!(sq, Scalar::Rat(Rational::Big(_))));
        let back = sq.div(&big).unwrap();
        assert_eq!(back, big);
        assert!(matches!(back, Scalar::Rat(Rational::Small(..))));
        let min = Field::Rationals.parse("-9223372036854775808").unwrap();
        assert!(matches!(min, Scalar::Rat(Rational::Big(_))));
        assert_eq!(min.encode(), "-9223372036854775808");
        assert_eq!((-&min).encode(), "9223372036854775808");
    }

    #[test]
    fn parsing() {
        let f7 = Field::prime(7).unwrap();
        assert_eq!(Field::Rationals.parse("4/6").unwrap(), q(2, 3));
        assert!(Field::Rationals.parse("1/0").is_err());
        assert!(Field::Rationals.parse("1/-2").is_err());
        assert!(Field::Rationals.parse("x").is_err());
        assert!(f7.parse("7").is_err());
        assert_eq!(f7.parse("6").unwrap(), f7.from_i64(-1));
        assert_eq!("F101".parse::<Field>().unwrap(), Field::Prime(101));
        assert_eq!("Q".parse::<Field>().unwrap(), Field::Rationals);
        assert!("F9".parse::<Field>().is_err());
    }

    fn big(x: &Scalar) -> BigRational {
        x.as_big_rational().unwrap()
    }

    proptest! {
        #[test]
        fn fast_path_matches_bignum(a in any::<i64>(), b in 1..i64::MAX, c in any::<i64>(), d in 1..i64::MAX) {
            let x = Field::Rationals.parse(&format!("{a}/{b}")).unwrap();
            let y = Field::Rationals.parse(&format!("{c}/{d}")).unwrap();
            prop_assert_eq!(big(&(&x + &y)), big(&x) + big(&y));
            prop_assert_eq!(big(&(&x - &y)), big(&x) - big(&y));
            prop_assert_eq!(big(&(&x * &y)), big(&x) * big(&y));
            let s = (&x * &y).encode();
            prop_assert_eq!(Field::Rationals.parse(&s).unwrap(), &x * &y);
        }

        #[test]
        fn prime_field_axioms(a in any::<i64>(), b in any::<i64>()) {
            let f = Field::prime(101).unwrap();
            let (x, y) = (f.from_i64(a), f.from_i64(b));
            prop_assert_eq!(&(&x + &y) - &y, x.clone());
            if !x.is_zero() {
                prop_assert!((&x * &x.inv().unwrap()).is_one());
            }
        }
    }
}
