//! Exact rational scalars.
//!
//! `Rational` is a thin newtype over `BigRational` that fixes the textual
//! form used by every file format in the crate: `"p/q"` with `q > 1`, or a
//! bare `"p"` for integers. The wrapped value is always reduced with a
//! positive denominator, and zero is `0/1`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `numer / denom`, reducing. Fails on a zero denominator.
    pub fn new(numer: BigInt, denom: BigInt) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    pub fn from_integer(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    pub fn from_i64(n: i64) -> Self {
        Self::from_integer(BigInt::from(n))
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        Self::new(BigInt::from(numer), BigInt::from(denom)).expect("nonzero denominator")
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn signum(&self) -> i32 {
        match self.0.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidArgument("reciprocal of zero".into()));
        }
        Ok(Rational(self.0.recip()))
    }

    /// Integer value, if the denominator is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.numer().clone())
    }

    /// `self^e` for a signed exponent; `0^e` with `e < 0` is an error.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let mag = u32::try_from(e.unsigned_abs())
            .map_err(|_| Error::InvalidArgument(format!("exponent {e} too large")))?;
        let (n, d) = (self.numer().pow(mag), self.denom().pow(mag));
        if e >= 0 {
            Ok(Rational(BigRational::new_raw(n, d)))
        } else {
            Self::new(d, n)
        }
    }

    /// `self^e` for an unsigned exponent.
    pub fn pow_u32(&self, e: u32) -> Self {
        Rational(BigRational::new_raw(self.numer().pow(e), self.denom().pow(e)))
    }

    /// Bit length of numerator plus denominator; a crude size measure.
    pub fn bits(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }

    pub fn floor(&self) -> BigInt {
        self.numer().div_floor(self.denom())
    }

    pub fn ceil(&self) -> BigInt {
        -((-self.numer()).div_floor(self.denom()))
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn into_big(self) -> BigRational {
        self.0
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigUint> for Rational {
    fn from(n: BigUint) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_i64(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom().is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_int = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad rational {s:?}")))
        };
        match s.split_once('/') {
            Some((n, d)) => {
                let d = parse_int(d)?;
                if d.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in {s:?}")));
                }
                Rational::new(parse_int(n)?, d)
            }
            None => Ok(Rational::from_integer(parse_int(s)?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `gcd(a, b)` with one Euclidean step first, so a huge argument against a
/// small one costs a division instead of a bitwise gcd over the huge one.
fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let (a, b) = (a.magnitude(), b.magnitude());
    if a.is_one() || b.is_one() {
        return BigInt::one();
    }
    let (big, small) = if a.bits() >= b.bits() { (a, b) } else { (b, a) };
    if small.is_zero() {
        return BigInt::from(big.clone());
    }
    BigInt::from((big % small).gcd(small))
}

fn add_parts(a: &BigRational, b: &BigRational, negate: bool) -> BigRational {
    let bn = if negate { -b.numer() } else { b.numer().clone() };
    let (ad, bd) = (a.denom(), b.denom());
    // n1 * d2 + n2 over d2 is already reduced when d1 = 1
    match (ad.is_one(), bd.is_one()) {
        (true, true) => BigRational::from_integer(a.numer() + bn),
        (true, false) => BigRational::new_raw(a.numer() * bd + bn, bd.clone()),
        (false, true) => BigRational::new_raw(a.numer() + bn * ad, ad.clone()),
        (false, false) if negate => a - b,
        (false, false) => a + b,
    }
}

fn mul_parts(an: &BigInt, ad: &BigInt, bn: &BigInt, bd: &BigInt) -> BigRational {
    let g1 = gcd(an, bd);
    let g2 = gcd(bn, ad);
    let n = (an / &g1) * (bn / &g2);
    let d = (ad / &g2) * (bd / &g1);
    if d.is_negative() {
        BigRational::new_raw(-n, -d)
    } else {
        BigRational::new_raw(n, d)
    }
}

fn div_parts(a: &BigRational, b: &BigRational) -> BigRational {
    assert!(!b.is_zero(), "division by zero");
    mul_parts(a.numer(), a.denom(), b.denom(), b.numer())
}

macro_rules! binop {
    ($tr:ident, $m:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                let ($a, $b) = (&self.0, &rhs.0);
                Rational($body)
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                let ($a, $b) = (&self.0, &rhs.0);
                Rational($body)
            }
        }
    };
}

binop!(Add, add, |a, b| add_parts(a, b, false));
binop!(Sub, sub, |a, b| add_parts(a, b, true));
binop!(Mul, mul, |a, b| mul_parts(a.numer(), a.denom(), b.numer(), b.denom()));
binop!(Div, div, |a, b| div_parts(a, b));

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::one(), |a, b| a * b)
    }
}
