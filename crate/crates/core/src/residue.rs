//! Residues of sums of power products at indices far beyond exact reach.
//!
//! Each prime power `q^a` of the modulus is handled separately: the
//! `q`-adic valuation of a term is accumulated exactly (it can be huge), the
//! unit part is raised to an exponent reduced modulo `phi(q^b)`, and the
//! pieces are recombined by the Chinese remainder theorem.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{factor, Budget, FactoredInteger};
use crate::numeric::{multiplicity, ExponentPolynomial};
use crate::sequence::{NormalizedInstance, SuperpowerSum};

/// Residue of `x^e` modulo `q^a` for a nonzero integer `x`.
pub fn pow_mod_prime_power(x: &BigInt, e: &BigUint, q: &BigUint, a: u64) -> Result<BigUint> {
    if x.is_zero() {
        return Err(Error::ZeroValuation);
    }
    if a == 0 {
        return Err(Error::InvalidArgument("prime power exponent must be positive".into()));
    }
    let modulus = q.pow(a as u32);
    let v = multiplicity(q, x.magnitude());
    // q^(v e) vanishes once v e >= a
    let shift = BigUint::from(v) * e;
    if shift >= BigUint::from(a) {
        return Ok(BigUint::zero());
    }
    let shift: u64 = shift.try_into().expect("below a");
    let unit = x.magnitude() / q.pow(v as u32);
    let rest = q.pow((a - shift) as u32);
    let phi = q.pow((a - shift - 1) as u32) * (q - 1u32);
    let mut r = unit.modpow(&(e % &phi), &rest) * q.pow(shift as u32);
    if x.is_negative() && e.is_odd() {
        r = (&modulus - (r % &modulus)) % &modulus;
    }
    Ok(r % modulus)
}

/// `coeff * prod base^(f(n))` with nonzero integer bases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerProduct {
    #[serde(with = "bigint_str")]
    pub coeff: BigInt,
    pub factors: Vec<PowerFactor>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerFactor {
    #[serde(with = "bigint_str")]
    pub base: BigInt,
    pub exponent: ExponentPolynomial,
}

mod bigint_str {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(x)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite sum of [`PowerProduct`]s evaluated at a common index.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PowerProductSum {
    pub terms: Vec<PowerProduct>,
}

fn monomial(j: usize) -> ExponentPolynomial {
    let mut c = vec![BigInt::zero(); j + 1];
    c[j] = BigInt::one();
    ExponentPolynomial::new(c)
}

fn exponent_at(f: &ExponentPolynomial, n: &BigUint) -> Result<BigUint> {
    let e = f.eval(n);
    if e.is_negative() {
        return Err(Error::BelowThreshold {
            n: n.to_string(),
            threshold: "nonnegative exponents".into(),
        });
    }
    Ok(e.magnitude().clone())
}

impl PowerProductSum {
    /// Direct form of an integer-entry instance; vanishing terms are dropped.
    pub fn from_integer_sum(s: &SuperpowerSum) -> Result<Self> {
        let mut terms = Vec::new();
        for t in s.terms() {
            if t.coeff.is_zero() || t.bases.iter().any(|b| b.is_zero()) {
                continue;
            }
            let to_int = |r: &crate::Rational| {
                r.to_integer()
                    .ok_or_else(|| Error::InvalidArgument(format!("entry {r} is not an integer")))
            };
            let coeff = to_int(&t.coeff)?;
            let factors = t
                .bases
                .iter()
                .enumerate()
                .map(|(j, b)| Ok(PowerFactor { base: to_int(b)?, exponent: monomial(j + 1) }))
                .collect::<Result<Vec<_>>>()?;
            terms.push(PowerProduct { coeff, factors });
        }
        Ok(PowerProductSum { terms })
    }

    pub fn from_normalized(inst: &NormalizedInstance) -> Self {
        let s = inst.to_sum();
        Self::from_integer_sum(&s).expect("integer entries")
    }

    /// Exact value at `n`; only feasible for small exponents.
    pub fn eval_exact(&self, n: &BigUint) -> Result<BigInt> {
        let mut total = BigInt::zero();
        for t in &self.terms {
            let mut v = t.coeff.clone();
            for f in &t.factors {
                let e = exponent_at(&f.exponent, n)?;
                let e: u32 = e
                    .try_into()
                    .map_err(|_| Error::BitCapExceeded { needed: u64::MAX, cap: u32::MAX as u64 })?;
                v *= f.base.pow(e);
            }
            total += v;
        }
        Ok(total)
    }

    /// Exponent values of every factor at `n`, for repeated residues.
    pub fn exponents_at(&self, n: &BigUint) -> Result<Vec<Vec<BigUint>>> {
        self.terms
            .iter()
            .map(|t| t.factors.iter().map(|f| exponent_at(&f.exponent, n)).collect())
            .collect()
    }

    /// Residue modulo the prime power `q^a`.
    pub fn residue_prime_power(&self, n: &BigUint, q: &BigUint, a: u64) -> Result<BigUint> {
        self.residue_prime_power_at(&self.exponents_at(n)?, q, a)
    }

    /// Residue modulo `q^a` from exponents computed by [`Self::exponents_at`].
    pub fn residue_prime_power_at(&self, exps: &[Vec<BigUint>], q: &BigUint, a: u64) -> Result<BigUint> {
        let modulus = q.pow(a as u32);
        let a_big = BigUint::from(a);
        let mut total = BigUint::zero();
        'terms: for (t, texps) in self.terms.iter().zip(exps) {
            if t.coeff.is_zero() {
                continue;
            }
            let mut shift = BigUint::from(multiplicity(q, t.coeff.magnitude()));
            let mut negative = t.coeff.is_negative();
            let mut units: Vec<(BigUint, &BigUint)> = Vec::with_capacity(t.factors.len());
            for (f, e) in t.factors.iter().zip(texps) {
                if f.base.is_zero() {
                    return Err(Error::ZeroValuation);
                }
                let v = multiplicity(q, f.base.magnitude());
                if v > 0 {
                    shift += BigUint::from(v) * e;
                    if shift >= a_big {
                        continue 'terms;
                    }
                }
                if f.base.is_negative() && e.is_odd() {
                    negative = !negative;
                }
                units.push((f.base.magnitude() / q.pow(v as u32), e));
            }
            if shift >= a_big {
                continue;
            }
            let shift: u64 = shift.try_into().expect("below a");
            let rest = q.pow((a - shift) as u32);
            let phi = q.pow((a - shift - 1) as u32) * (q - 1u32);
            let coeff_unit = t.coeff.magnitude() / q.pow(multiplicity(q, t.coeff.magnitude()) as u32);
            let mut u = coeff_unit % &rest;
            for (b, e) in units {
                u = u * b.modpow(&(e % &phi), &rest) % &rest;
            }
            let mut r = u * q.pow(shift as u32) % &modulus;
            if negative {
                r = (&modulus - r) % &modulus;
            }
            total = (total + r) % &modulus;
        }
        Ok(total)
    }

    /// Residue modulo a fully factored modulus `m >= 2`.
    pub fn residue(&self, n: &BigUint, m: &FactoredInteger) -> Result<BigUint> {
        if m.sign() < 0 || m.magnitude() < BigUint::from(2u32) {
            return Err(Error::InvalidArgument("modulus must be at least 2".into()));
        }
        let exps = self.exponents_at(n)?;
        let mut acc = (BigUint::zero(), BigUint::one());
        for (q, &a) in m.factors() {
            let r = self.residue_prime_power_at(&exps, q, a)?;
            acc = crt_pair(&acc, &(r, q.pow(a as u32)));
        }
        Ok(acc.0)
    }
}

/// Combines `x = r1 mod m1` and `x = r2 mod m2` for coprime moduli.
pub fn crt_pair(a: &(BigUint, BigUint), b: &(BigUint, BigUint)) -> (BigUint, BigUint) {
    let (r1, m1) = (BigInt::from(a.0.clone()), BigInt::from(a.1.clone()));
    let (r2, m2) = (BigInt::from(b.0.clone()), BigInt::from(b.1.clone()));
    let g = m1.extended_gcd(&m2);
    debug_assert!(g.gcd.is_one(), "moduli must be coprime");
    let m = &m1 * &m2;
    // x = r1 + m1 * ((r2 - r1) * inv(m1) mod m2)
    let t = ((&r2 - &r1) * &g.x).mod_floor(&m2);
    let x = (r1 + m1 * t).mod_floor(&m);
    (x.magnitude().clone(), m.magnitude().clone())
}

/// Factors a modulus, failing if the default budget does not suffice.
pub fn factored_modulus(m: &BigUint) -> Result<FactoredInteger> {
    if m < &BigUint::from(2u32) {
        return Err(Error::InvalidArgument("modulus must be at least 2".into()));
    }
    factor(&BigInt::from(m.clone()), Budget::DEFAULT)?.complete()
}

/// `u_n mod m` for a normalized instance and arbitrarily large `n`.
pub fn eval_sum_mod(inst: &NormalizedInstance, n: &BigUint, m: &FactoredInteger) -> Result<BigUint> {
    PowerProductSum::from_normalized(inst).residue(n, m)
}

/// `s_n mod m` for an instance with integer entries, signs included.
pub fn eval_integer_sum_mod(s: &SuperpowerSum, n: &BigUint, m: &FactoredInteger) -> Result<BigUint> {
    PowerProductSum::from_integer_sum(s)?.residue(n, m)
}
