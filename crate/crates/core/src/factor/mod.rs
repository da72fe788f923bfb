//! Primality, budgeted factorization, the distinct-prime-factor count ω and
//! the divisor count σ₀.

mod prime;
mod rho;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use prime::{is_prime, is_prime_u64, primality, sieve, small_primes, Primality};

/// Factoring effort, counted in rho iterations, and the seed of the
/// random walks. Results are deterministic for a fixed budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub iterations: u64,
    pub seed: u64,
}

impl Budget {
    /// Enough to split any input below 10^18 and most 30-digit inputs.
    pub const DEFAULT: Budget = Budget::new(1 << 22);

    pub const fn new(iterations: u64) -> Self {
        Budget { iterations, seed: 0 }
    }

    pub const fn with_seed(self, seed: u64) -> Self {
        Budget { seed, ..self }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::DEFAULT
    }
}

/// Complete factorization `sign * prod p^e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactoredInteger {
    negative: bool,
    #[serde(serialize_with = "serialize_factors")]
    factors: BTreeMap<BigUint, u64>,
    /// Primes above 2^64 accepted on a strong pseudoprime test only.
    #[serde(serialize_with = "serialize_primes")]
    probable: BTreeSet<BigUint>,
}

/// Factorization that ran out of budget: `|x| = prod p^e * cofactor`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialFactorization {
    negative: bool,
    #[serde(serialize_with = "serialize_factors")]
    factors: BTreeMap<BigUint, u64>,
    #[serde(serialize_with = "serialize_primes")]
    probable: BTreeSet<BigUint>,
    #[serde(serialize_with = "serialize_display")]
    cofactor: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Factorization {
    Complete(FactoredInteger),
    Partial(PartialFactorization),
}

fn serialize_factors<S: serde::Serializer>(
    factors: &BTreeMap<BigUint, u64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(factors.iter().map(|(p, e)| (p.to_string(), *e)))
}

fn serialize_primes<S: serde::Serializer>(
    primes: &BTreeSet<BigUint>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(primes.iter().map(|p| p.to_string()))
}

fn serialize_display<S: serde::Serializer, T: fmt::Display>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl FactoredInteger {
    /// Builds a factorization from parts; used for moduli known to be prime powers.
    pub fn from_prime_powers<I: IntoIterator<Item = (BigUint, u64)>>(powers: I) -> Self {
        let mut factors = BTreeMap::new();
        for (p, e) in powers {
            if e > 0 {
                *factors.entry(p).or_insert(0) += e;
            }
        }
        FactoredInteger {
            negative: false,
            factors,
            probable: BTreeSet::new(),
        }
    }

    pub fn sign(&self) -> i32 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn factors(&self) -> &BTreeMap<BigUint, u64> {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.keys()
    }

    pub fn exponent(&self, p: &BigUint) -> u64 {
        self.factors.get(p).copied().unwrap_or(0)
    }

    pub fn probable_primes(&self) -> &BTreeSet<BigUint> {
        &self.probable
    }

    /// `true` when every prime was proven rather than pseudoprime-tested.
    pub fn is_certified(&self) -> bool {
        self.probable.is_empty()
    }

    pub fn omega(&self) -> u64 {
        self.factors.len() as u64
    }

    pub fn sigma0(&self) -> Result<u64> {
        self.factors.values().try_fold(1u64, |acc, &e| {
            acc.checked_mul(e + 1)
                .ok_or_else(|| Error::InvalidArgument("divisor count overflows u64".into()))
        })
    }

    /// Absolute value of the factored number.
    pub fn magnitude(&self) -> BigUint {
        self.factors
            .iter()
            .map(|(p, &e)| p.pow(e as u32))
            .product()
    }

    pub fn reconstruct(&self) -> BigInt {
        let sign = if self.negative { Sign::Minus } else { Sign::Plus };
        BigInt::from_biguint(sign, self.magnitude())
    }
}

impl PartialFactorization {
    pub fn sign(&self) -> i32 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn factors(&self) -> &BTreeMap<BigUint, u64> {
        &self.factors
    }

    pub fn cofactor(&self) -> &BigUint {
        &self.cofactor
    }

    /// Distinct primes are at least the found ones plus one inside the cofactor.
    pub fn omega_lower_bound(&self) -> u64 {
        self.factors.len() as u64 + u64::from(!self.cofactor.is_one())
    }

    pub fn reconstruct(&self) -> BigInt {
        let mag: BigUint = self
            .factors
            .iter()
            .map(|(p, &e)| p.pow(e as u32))
            .product::<BigUint>()
            * &self.cofactor;
        let sign = if self.negative { Sign::Minus } else { Sign::Plus };
        BigInt::from_biguint(sign, mag)
    }
}

impl Factorization {
    pub fn reconstruct(&self) -> BigInt {
        match self {
            Factorization::Complete(f) => f.reconstruct(),
            Factorization::Partial(f) => f.reconstruct(),
        }
    }

    pub fn complete(self) -> Result<FactoredInteger> {
        match self {
            Factorization::Complete(f) => Ok(f),
            Factorization::Partial(p) => Err(Error::BudgetExceeded {
                cofactor: p.cofactor.to_string(),
            }),
        }
    }
}

/// Factors `x != 0`, spending at most `budget` rho iterations.
pub fn factor(x: &BigInt, budget: Budget) -> Result<Factorization> {
    if x.is_zero() {
        return Err(Error::InvalidArgument("cannot factor zero".into()));
    }
    let negative = x.sign() == Sign::Minus;
    let mut n = x.magnitude().clone();
    let mut factors = BTreeMap::new();
    let mut probable = BTreeSet::new();

    trial_divide(&mut n, &mut factors);
    let bound = BigUint::from(prime::SMALL_PRIME_BOUND);
    let mut pending = Vec::new();
    if !n.is_one() {
        if n < &bound * &bound {
            factors.insert(n, 1);
        } else {
            pending.push(n);
        }
    }

    let mut meter = rho::Meter {
        remaining: budget.iterations,
        seed: budget.seed,
    };
    let mut stuck: Vec<BigUint> = Vec::new();
    while let Some(m) = pending.pop() {
        if m.is_one() {
            continue;
        }
        match primality(&m)? {
            Primality::Composite => match rho::split_big(&m, &mut meter) {
                Some(d) => {
                    let other = &m / &d;
                    pending.push(d);
                    pending.push(other);
                }
                None => stuck.push(m),
            },
            kind => {
                if kind == Primality::ProbablePrime {
                    probable.insert(m.clone());
                }
                let mut e = 1u64;
                for rest in pending.iter_mut().chain(stuck.iter_mut()) {
                    while rest.is_multiple_of(&m) {
                        *rest /= &m;
                        e += 1;
                    }
                }
                *factors.entry(m).or_insert(0) += e;
            }
        }
    }
    stuck.retain(|c| !c.is_one());
    if stuck.is_empty() {
        Ok(Factorization::Complete(FactoredInteger {
            negative,
            factors,
            probable,
        }))
    } else {
        Ok(Factorization::Partial(PartialFactorization {
            negative,
            factors,
            probable,
            cofactor: stuck.iter().product(),
        }))
    }
}

fn trial_divide(n: &mut BigUint, factors: &mut BTreeMap<BigUint, u64>) {
    if let Some(mut small) = n.to_u64() {
        for &p in small_primes() {
            let p = p as u64;
            if p * p > small {
                break;
            }
            let mut e = 0;
            while small % p == 0 {
                small /= p;
                e += 1;
            }
            if e > 0 {
                factors.insert(BigUint::from(p), e);
            }
        }
        *n = BigUint::from(small);
        return;
    }
    for &p in small_primes() {
        let mut e = 0;
        loop {
            let (q, r) = n.div_rem(&BigUint::from(p));
            if !r.is_zero() {
                break;
            }
            *n = q;
            e += 1;
        }
        if e > 0 {
            factors.insert(BigUint::from(p), e);
        }
        if n.to_u64().is_some() {
            return trial_divide(n, factors);
        }
    }
}

/// Count of distinct prime divisors; `ω(0) = ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OmegaValue {
    Finite(u64),
    Infinite,
}

impl OmegaValue {
    pub fn finite(self) -> Option<u64> {
        match self {
            OmegaValue::Finite(n) => Some(n),
            OmegaValue::Infinite => None,
        }
    }
}

impl std::ops::Add for OmegaValue {
    type Output = OmegaValue;
    fn add(self, rhs: OmegaValue) -> OmegaValue {
        match (self, rhs) {
            (OmegaValue::Finite(a), OmegaValue::Finite(b)) => OmegaValue::Finite(a + b),
            _ => OmegaValue::Infinite,
        }
    }
}

impl fmt::Display for OmegaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaValue::Finite(n) => write!(f, "{n}"),
            OmegaValue::Infinite => f.write_str("inf"),
        }
    }
}

/// ω for scan mode, where an incomplete factorization downgrades to a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmegaBound {
    Exact(OmegaValue),
    AtLeast(u64),
}

impl fmt::Display for OmegaBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaBound::Exact(v) => write!(f, "{v}"),
            OmegaBound::AtLeast(n) => write!(f, ">={n}"),
        }
    }
}

impl std::ops::Add for OmegaBound {
    type Output = OmegaBound;
    fn add(self, rhs: OmegaBound) -> OmegaBound {
        use OmegaBound::*;
        match (self, rhs) {
            (Exact(a), Exact(b)) => Exact(a + b),
            (Exact(OmegaValue::Infinite), _) | (_, Exact(OmegaValue::Infinite)) => {
                Exact(OmegaValue::Infinite)
            }
            (Exact(OmegaValue::Finite(a)), AtLeast(b))
            | (AtLeast(a), Exact(OmegaValue::Finite(b)))
            | (AtLeast(a), AtLeast(b)) => AtLeast(a + b),
        }
    }
}

pub fn omega(x: &BigInt) -> Result<OmegaValue> {
    omega_with_budget(x, Budget::DEFAULT)
}

/// Exact ω, or `BudgetExceeded` when the factorization does not finish.
pub fn omega_with_budget(x: &BigInt, budget: Budget) -> Result<OmegaValue> {
    if x.is_zero() {
        return Ok(OmegaValue::Infinite);
    }
    let f = factor(x, budget)?.complete()?;
    Ok(OmegaValue::Finite(f.omega()))
}

/// Exact ω when possible, otherwise a flagged lower bound.
pub fn omega_bound(x: &BigInt, budget: Budget) -> Result<OmegaBound> {
    if x.is_zero() {
        return Ok(OmegaBound::Exact(OmegaValue::Infinite));
    }
    Ok(match factor(x, budget)? {
        Factorization::Complete(f) => OmegaBound::Exact(OmegaValue::Finite(f.omega())),
        Factorization::Partial(p) => OmegaBound::AtLeast(p.omega_lower_bound()),
    })
}

/// ω of a reduced fraction `a/b`: `ω(a) + ω(b)`.
pub fn omega_rational(x: &Rational) -> Result<OmegaValue> {
    omega_rational_with_budget(x, Budget::DEFAULT)
}

pub fn omega_rational_with_budget(x: &Rational, budget: Budget) -> Result<OmegaValue> {
    if x.is_zero() {
        return Ok(OmegaValue::Infinite);
    }
    Ok(omega_with_budget(x.numer(), budget)? + omega_with_budget(x.denom(), budget)?)
}

pub fn omega_rational_bound(x: &Rational, budget: Budget) -> Result<OmegaBound> {
    if x.is_zero() {
        return Ok(OmegaBound::Exact(OmegaValue::Infinite));
    }
    Ok(omega_bound(x.numer(), budget)? + omega_bound(x.denom(), budget)?)
}

/// Number of positive divisors of `n >= 1`.
pub fn sigma0(n: &BigUint) -> Result<u64> {
    if n.is_zero() {
        return Err(Error::InvalidArgument("sigma0 of zero".into()));
    }
    factor(&BigInt::from(n.clone()), Budget::DEFAULT)?
        .complete()?
        .sigma0()
}
