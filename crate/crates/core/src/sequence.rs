//! Sums of superpowers `s_n = sum_i prod_j x_{i,j}^(n^j)`, their exact
//! evaluation, the canonical even-index integer form, the odd-index
//! transform, and import from polynomial-exponent products.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{factor, Budget, Factorization};
use crate::numeric::ExponentPolynomial;
use crate::rational::Rational;

/// Default ceiling on the estimated size of exactly evaluated values.
pub const DEFAULT_BIT_CAP: u64 = 1 << 26;

/// One summand `coeff * prod_j bases[j-1]^(n^j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: Rational,
    pub bases: Vec<Rational>,
}

impl Term {
    pub fn new(coeff: Rational, bases: Vec<Rational>) -> Self {
        Term { coeff, bases }
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64(coeff: i64, bases: &[i64]) -> Self {
        Term::new(Rational::from_i64(coeff), bases.iter().map(|&b| Rational::from_i64(b)).collect())
    }

    /// Entry `x_{i,j}`, with `j = 0` the coefficient.
    pub fn entry(&self, j: usize) -> &Rational {
        if j == 0 {
            &self.coeff
        } else {
            &self.bases[j - 1]
        }
    }
}

/// A sum of superpowers with `k` terms and top exponent degree `ell`.
///
/// An instance with no terms is the zero sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuperpowerSum {
    ell: usize,
    terms: Vec<Term>,
}

#[derive(Deserialize)]
struct RawSum {
    ell: usize,
    terms: Vec<Term>,
}

impl<'de> Deserialize<'de> for SuperpowerSum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSum::deserialize(d)?;
        SuperpowerSum::new(raw.ell, raw.terms).map_err(serde::de::Error::custom)
    }
}

fn bit_size(x: &Rational) -> u64 {
    x.numer().bits().max(1) + x.denom().bits()
}

impl SuperpowerSum {
    pub fn new(ell: usize, terms: Vec<Term>) -> Result<Self> {
        if ell == 0 {
            return Err(Error::InvalidArgument("ell must be positive".into()));
        }
        if let Some(t) = terms.iter().find(|t| t.bases.len() != ell) {
            return Err(Error::LengthMismatch(t.bases.len(), ell));
        }
        Ok(SuperpowerSum { ell, terms })
    }

    /// Builds from rows `[x_{i,0}, x_{i,1}, ..., x_{i,ell}]` of machine integers.
    pub fn from_rows(rows: &[&[i64]]) -> Result<Self> {
        let ell = rows.first().map_or(1, |r| r.len().saturating_sub(1));
        let terms = rows.iter().map(|r| Term::from_i64(r[0], &r[1..])).collect();
        SuperpowerSum::new(ell, terms)
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn k(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: SuperpowerSum = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if s.terms.is_empty() {
            return Err(Error::Parse("instance has no terms".into()));
        }
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Exact `s_n` under [`DEFAULT_BIT_CAP`].
    pub fn eval(&self, n: u64) -> Result<Rational> {
        self.eval_with_cap(n, DEFAULT_BIT_CAP)
    }

    /// Exact `s_n`, refusing when any term would need more than `cap` bits.
    pub fn eval_with_cap(&self, n: u64, cap: u64) -> Result<Rational> {
        if n == 0 {
            return Err(Error::InvalidArgument("index must be positive".into()));
        }
        let n_big = BigUint::from(n);
        let mut total = Rational::zero();
        for t in &self.terms {
            if t.coeff.is_zero() || t.bases.iter().any(Rational::is_zero) {
                continue;
            }
            let mut needed = BigUint::from(bit_size(&t.coeff));
            for (j, x) in t.bases.iter().enumerate() {
                needed += n_big.pow(j as u32 + 1) * bit_size(x);
            }
            if needed > BigUint::from(cap) {
                return Err(Error::BitCapExceeded {
                    needed: needed.to_u64().unwrap_or(u64::MAX),
                    cap,
                });
            }
            let mut value = t.coeff.clone();
            for (j, x) in t.bases.iter().enumerate() {
                let e = n.pow(j as u32 + 1) as u32;
                value = &value * &x.pow_u32(e);
            }
            total = &total + &value;
        }
        Ok(total)
    }

    /// Transformed instance `t` with `t_{2n} = s_{2n-1}` for every `n >= 1`.
    ///
    /// Terms with a zero base or zero coefficient vanish and are dropped.
    pub fn odd_transform(&self) -> SuperpowerSum {
        let ell = self.ell;
        let terms = self
            .terms
            .iter()
            .filter(|t| !t.coeff.is_zero() && t.bases.iter().all(|b| !b.is_zero()))
            .map(|t| {
                let row: Vec<Rational> = (0..=ell)
                    .map(|j| {
                        let mut y = Rational::one();
                        let mut binom = 1i64;
                        for h in j..=ell {
                            // binom = C(h, j)
                            let sign = if (h - j) % 2 == 0 { 1 } else { -1 };
                            let x = t.entry(h).pow(sign * binom).expect("nonzero base");
                            y = &y * &x;
                            binom = binom * (h as i64 + 1) / (h as i64 + 1 - j as i64);
                        }
                        y
                    })
                    .collect();
                Term::new(row[0].clone(), row[1..].to_vec())
            })
            .collect();
        SuperpowerSum { ell, terms }
    }
}

/// Compares tuples by absolute value from the last entry downward.
pub fn prec_compare(u: &[BigInt], v: &[BigInt]) -> Result<Ordering> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch(u.len(), v.len()));
    }
    for (a, b) in u.iter().zip(v).rev() {
        match a.magnitude().cmp(b.magnitude()) {
            Ordering::Equal => continue,
            o => return Ok(o),
        }
    }
    Ok(Ordering::Equal)
}

/// [`prec_compare`] for rational tuples.
pub fn prec_compare_rational(u: &[Rational], v: &[Rational]) -> Result<Ordering> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch(u.len(), v.len()));
    }
    for (a, b) in u.iter().zip(v).rev() {
        match a.abs().cmp(&b.abs()) {
            Ordering::Equal => continue,
            o => return Ok(o),
        }
    }
    Ok(Ordering::Equal)
}

/// Integer even-index form: `s_n = u_n * prod_j (delta_j / alpha_j)^(n^j)`
/// for even `n`, where `u` is the sum described by `entries`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedInstance {
    pub ell: usize,
    /// Rows `[x_{i,0}, ..., x_{i,ell}]`, increasing in the power tuple.
    #[serde(with = "matrix_serde")]
    pub entries: Vec<Vec<BigInt>>,
    /// Column denominators `alpha_j` cleared before reduction.
    #[serde(with = "vector_serde")]
    pub scale_denominators: Vec<BigUint>,
    /// Column gcds `delta_j` divided out after clearing.
    #[serde(with = "vector_serde")]
    pub removed_gcds: Vec<BigUint>,
    /// Upper bound on the number of distinct primes of `prod_j alpha_j`.
    pub omega_slack: u64,
}

mod matrix_serde {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        serde::Serialize::serialize(&rows, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        rows.iter()
            .map(|r| r.iter().map(|x| x.parse().map_err(serde::de::Error::custom)).collect())
            .collect()
    }
}

mod vector_serde {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|x| x.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

impl NormalizedInstance {
    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn coeff(&self, i: usize) -> &BigInt {
        &self.entries[i][0]
    }

    /// Power tuple `(x_{i,1}, ..., x_{i,ell})`.
    pub fn powers(&self, i: usize) -> &[BigInt] {
        &self.entries[i][1..]
    }

    /// Checks the structural invariants of the canonical form.
    pub fn is_canonical(&self) -> bool {
        let sorted = self
            .entries
            .windows(2)
            .all(|w| prec_compare(&w[0][1..], &w[1][1..]) == Ok(Ordering::Less));
        let signs = self
            .entries
            .iter()
            .all(|r| !r[0].is_zero() && r[1..].iter().all(Signed::is_positive));
        let coprime = (0..=self.ell).all(|j| {
            self.entries.iter().fold(BigInt::zero(), |acc, r| acc.gcd(&r[j])).is_one()
        });
        !self.entries.is_empty() && sorted && signs && coprime
    }

    pub fn to_sum(&self) -> SuperpowerSum {
        let terms = self
            .entries
            .iter()
            .map(|r| {
                Term::new(
                    Rational::from_integer(r[0].clone()),
                    r[1..].iter().map(|x| Rational::from_integer(x.clone())).collect(),
                )
            })
            .collect();
        SuperpowerSum { ell: self.ell, terms }
    }

    /// Exact `u_n` as an integer.
    pub fn eval(&self, n: u64) -> Result<BigInt> {
        let v = self.to_sum().eval(n)?;
        Ok(v.to_integer().expect("integer entries"))
    }

    /// `prod_j (delta_j / alpha_j)^(n^j)`, the factor with `s_n = u_n * scale_n`.
    pub fn scale_at(&self, n: u64) -> Result<Rational> {
        let mut out = Rational::one();
        for j in 0..=self.ell {
            let e = n
                .checked_pow(j as u32)
                .and_then(|e| u32::try_from(e).ok())
                .ok_or_else(|| Error::InvalidArgument("scale exponent too large".into()))?;
            let ratio = Rational::new(
                BigInt::from(self.removed_gcds[j].clone()),
                BigInt::from(self.scale_denominators[j].clone()),
            )?;
            out = &out * &ratio.pow_u32(e);
        }
        Ok(out)
    }

    /// Exponent polynomial of the prime `p` in term `i`, over columns `j >= 1`.
    pub fn exponent_polynomial(&self, i: usize, p: &BigUint) -> ExponentPolynomial {
        let mut coeffs = vec![BigInt::zero()];
        for x in self.powers(i) {
            coeffs.push(BigInt::from(crate::numeric::multiplicity(p, x.magnitude())));
        }
        ExponentPolynomial::new(coeffs)
    }

    /// Primes dividing some power base `x_{i,j}` with `j >= 1`.
    pub fn base_primes(&self) -> Result<BTreeSet<BigUint>> {
        let mut primes = BTreeSet::new();
        for row in &self.entries {
            for x in &row[1..] {
                if x.is_one() {
                    continue;
                }
                let f = factor(x, Budget::DEFAULT)?.complete()?;
                primes.extend(f.primes().cloned());
            }
        }
        Ok(primes)
    }
}

/// Result of [`normalize_even`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvenForm {
    Normalized(NormalizedInstance),
    IdenticallyZeroOnEvens,
}

impl EvenForm {
    pub fn normalized(self) -> Option<NormalizedInstance> {
        match self {
            EvenForm::Normalized(n) => Some(n),
            EvenForm::IdenticallyZeroOnEvens => None,
        }
    }
}

/// Upper bound on the number of distinct primes dividing the product.
fn distinct_prime_bound(values: &[BigUint]) -> u64 {
    let mut primes = BTreeSet::new();
    let mut extra = 0;
    for v in values.iter().filter(|v| !v.is_one()) {
        match factor(&BigInt::from(v.clone()), Budget::DEFAULT).expect("nonzero") {
            Factorization::Complete(f) => primes.extend(f.primes().cloned()),
            Factorization::Partial(p) => {
                primes.extend(p.factors().keys().cloned());
                // Trial division removed every prime below 2^16.
                extra += p.cofactor().bits().div_ceil(16);
            }
        }
    }
    primes.len() as u64 + extra
}

/// Even-index terms after dropping vanishing terms, folding the signs of
/// power bases and merging equal power tuples, in input order.
pub fn merged_even_terms(s: &SuperpowerSum) -> Vec<Term> {
    let mut merged: Vec<Term> = Vec::new();
    let live = s
        .terms
        .iter()
        .filter(|t| !t.coeff.is_zero() && t.bases.iter().all(|b| !b.is_zero()));
    for t in live {
        let bases: Vec<Rational> = t.bases.iter().map(Rational::abs).collect();
        match merged.iter_mut().find(|m| m.bases == bases) {
            Some(slot) => slot.coeff = &slot.coeff + &t.coeff,
            None => merged.push(Term::new(t.coeff.clone(), bases)),
        }
    }
    merged.retain(|t| !t.coeff.is_zero());
    merged
}

/// Canonical integer form of the even-index subsequence.
pub fn normalize_even(s: &SuperpowerSum) -> EvenForm {
    let ell = s.ell;
    let merged = merged_even_terms(s);
    if merged.is_empty() {
        return EvenForm::IdenticallyZeroOnEvens;
    }
    let rows: Vec<Vec<Rational>> = merged
        .into_iter()
        .map(|t| std::iter::once(t.coeff).chain(t.bases).collect())
        .collect();
    // (4) clear denominators per column
    let alphas: Vec<BigInt> = (0..=ell)
        .map(|j| rows.iter().fold(BigInt::one(), |acc, r| acc.lcm(r[j].denom())))
        .collect();
    let mut ints: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .zip(&alphas)
                .map(|(x, a)| (x * &Rational::from_integer(a.clone())).to_integer().expect("cleared"))
                .collect()
        })
        .collect();
    // (5) divide out column gcds
    let deltas: Vec<BigInt> = (0..=ell)
        .map(|j| ints.iter().fold(BigInt::zero(), |acc, r| acc.gcd(&r[j])))
        .collect();
    for r in &mut ints {
        for (x, d) in r.iter_mut().zip(&deltas) {
            *x = &*x / d;
        }
    }
    // (6) sort by the power tuple
    ints.sort_by(|a, b| prec_compare(&a[1..], &b[1..]).expect("same length"));
    let scale_denominators: Vec<BigUint> = alphas.iter().map(|a| a.magnitude().clone()).collect();
    let omega_slack = distinct_prime_bound(&scale_denominators);
    EvenForm::Normalized(NormalizedInstance {
        ell,
        entries: ints,
        scale_denominators,
        removed_gcds: deltas.iter().map(|d| d.magnitude().clone()).collect(),
        omega_slack,
    })
}

/// One product `prod_j bases[j]^(exponents[j](n))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Type2Term {
    pub bases: Vec<Rational>,
    pub exponents: Vec<ExponentPolynomial>,
}

/// A sum of products of rational bases raised to integer polynomials in `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Type2Spec {
    pub terms: Vec<Type2Term>,
}

impl Type2Spec {
    /// Direct exact evaluation at `n`.
    pub fn eval(&self, n: u64) -> Result<Rational> {
        let mut total = Rational::zero();
        for t in &self.terms {
            let mut v = Rational::one();
            for (y, f) in t.bases.iter().zip(&t.exponents) {
                let e = f
                    .eval_i64(n as i64)
                    .to_i64()
                    .ok_or_else(|| Error::InvalidArgument("exponent too large".into()))?;
                v = &v * &y.pow(e)?;
            }
            total = &total + &v;
        }
        Ok(total)
    }
}

/// Rewrites a polynomial-exponent sum as a sum of superpowers.
pub fn convert_type2(spec: &Type2Spec) -> Result<SuperpowerSum> {
    let mut ell = 1;
    for t in &spec.terms {
        if t.bases.len() != t.exponents.len() {
            return Err(Error::LengthMismatch(t.bases.len(), t.exponents.len()));
        }
        if t.bases.iter().any(Rational::is_zero) {
            return Err(Error::InvalidArgument("type-II bases must be nonzero".into()));
        }
        for f in &t.exponents {
            ell = ell.max(f.degree().unwrap_or(0));
        }
    }
    let mut terms = Vec::with_capacity(spec.terms.len());
    for t in &spec.terms {
        let mut row = vec![Rational::one(); ell + 1];
        for (y, f) in t.bases.iter().zip(&t.exponents) {
            for (h, c) in f.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let c = c
                    .to_i64()
                    .ok_or_else(|| Error::InvalidArgument("exponent coefficient too large".into()))?;
                row[h] = &row[h] * &y.pow(c)?;
            }
        }
        terms.push(Term::new(row[0].clone(), row[1..].to_vec()));
    }
    SuperpowerSum::new(ell, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn eval_examples() {
        let s = SuperpowerSum::from_rows(&[&[1, 2], &[1, 3]]).unwrap();
        assert_eq!(s.eval(2).unwrap(), Rational::from_i64(13));
        let s = SuperpowerSum::from_rows(&[&[6, 4]]).unwrap();
        assert_eq!(s.eval(3).unwrap(), Rational::from_i64(384));
        let s = SuperpowerSum::from_rows(&[&[3, 2], &[-3, 2]]).unwrap();
        for n in 1..10 {
            assert!(s.eval(n).unwrap().is_zero());
        }
        let s = SuperpowerSum::from_rows(&[&[1, 3, 5]]).unwrap();
        assert!(matches!(s.eval_with_cap(100, 1000), Err(Error::BitCapExceeded { .. })));
        assert!(s.eval(0).is_err());
    }

    #[test]
    fn prec_examples() {
        let t = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(prec_compare(&t(&[2]), &t(&[3])).unwrap(), Ordering::Less);
        assert_eq!(prec_compare(&t(&[5, 2]), &t(&[1, 3])).unwrap(), Ordering::Less);
        assert_eq!(prec_compare(&t(&[-2, 3]), &t(&[2, 3])).unwrap(), Ordering::Equal);
        assert!(prec_compare(&t(&[1]), &t(&[1, 2])).is_err());
    }

    #[test]
    fn normalize_examples() {
        let s = SuperpowerSum::from_rows(&[&[1, 3], &[1, 2]]).unwrap();
        let n = normalize_even(&s).normalized().unwrap();
        assert_eq!(n.entries, vec![vec![BigInt::from(1), BigInt::from(2)], vec![BigInt::from(1), BigInt::from(3)]]);

        let s = SuperpowerSum::from_rows(&[&[3, 2], &[-3, -2], &[1, 5]]).unwrap();
        let n = normalize_even(&s).normalized().unwrap();
        // the lone surviving 5^n has its column gcd divided out
        assert_eq!(n.entries, vec![vec![BigInt::from(1), BigInt::from(1)]]);
        assert_eq!(n.removed_gcds, vec![BigUint::from(1u32), BigUint::from(5u32)]);

        let s = SuperpowerSum::new(1, vec![Term::new(r(1, 2), vec![r(3, 1)]), Term::from_i64(1, &[5])]).unwrap();
        let n = normalize_even(&s).normalized().unwrap();
        assert_eq!(n.scale_denominators[0], BigUint::from(2u32));
        assert_eq!(n.entries, vec![vec![BigInt::from(1), BigInt::from(3)], vec![BigInt::from(2), BigInt::from(5)]]);
        assert_eq!(n.omega_slack, 1);

        let s = SuperpowerSum::from_rows(&[&[3, 2], &[-3, 2]]).unwrap();
        assert_eq!(normalize_even(&s), EvenForm::IdenticallyZeroOnEvens);
        let s = SuperpowerSum::from_rows(&[&[3, 0], &[0, 2]]).unwrap();
        assert_eq!(normalize_even(&s), EvenForm::IdenticallyZeroOnEvens);
    }

    #[test]
    fn normalize_reduces_gcds() {
        let s = SuperpowerSum::from_rows(&[&[6, 4], &[9, 10]]).unwrap();
        let n = normalize_even(&s).normalized().unwrap();
        assert_eq!(n.removed_gcds, vec![BigUint::from(3u32), BigUint::from(2u32)]);
        for m in [2u64, 4, 6] {
            let lhs = s.eval(m).unwrap();
            let rhs = &Rational::from_integer(n.eval(m).unwrap()) * &n.scale_at(m).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn odd_transform_examples() {
        let s = SuperpowerSum::from_rows(&[&[1, 2], &[1, 3]]).unwrap();
        let t = s.odd_transform();
        assert_eq!(t.terms()[0], Term::new(r(1, 2), vec![r(2, 1)]));
        assert_eq!(t.terms()[1], Term::new(r(1, 3), vec![r(3, 1)]));
        assert_eq!(s.eval(5).unwrap(), Rational::from_i64(275));
        assert_eq!(t.eval(6).unwrap(), Rational::from_i64(275));

        let s = SuperpowerSum::new(
            2,
            vec![Term::new(r(2, 3), vec![r(-3, 1), r(5, 2)]), Term::from_i64(-1, &[7, -2])],
        )
        .unwrap();
        let t = s.odd_transform();
        for n in 1..=5 {
            assert_eq!(s.eval(2 * n - 1).unwrap(), t.eval(2 * n).unwrap());
        }
    }

    #[test]
    fn type2_examples() {
        let spec = Type2Spec {
            terms: vec![Type2Term {
                bases: vec![Rational::from_i64(2)],
                exponents: vec![ExponentPolynomial::from_i64(&[0, 0, 1])],
            }],
        };
        let s = convert_type2(&spec).unwrap();
        assert_eq!(s.terms()[0], Term::from_i64(1, &[1, 2]));

        let spec = Type2Spec {
            terms: vec![Type2Term {
                bases: vec![r(2, 3)],
                exponents: vec![ExponentPolynomial::from_i64(&[1, 2])],
            }],
        };
        let s = convert_type2(&spec).unwrap();
        assert_eq!(s.terms()[0], Term::new(r(2, 3), vec![r(4, 9)]));

        let spec = Type2Spec {
            terms: vec![
                Type2Term {
                    bases: vec![Rational::from_i64(2)],
                    exponents: vec![ExponentPolynomial::from_i64(&[1, 0, 1])],
                },
                Type2Term {
                    bases: vec![Rational::from_i64(3)],
                    exponents: vec![ExponentPolynomial::from_i64(&[0, 2])],
                },
            ],
        };
        let s = convert_type2(&spec).unwrap();
        assert_eq!(s.terms()[0], Term::from_i64(2, &[1, 2]));
        assert_eq!(s.terms()[1], Term::from_i64(1, &[9, 1]));
        for n in 1..=3 {
            assert_eq!(s.eval(n).unwrap(), spec.eval(n).unwrap());
        }
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"ell": 1, "terms": [{"coeff": "1/2", "bases": ["3"]}, {"coeff": "-1", "bases": ["-5/7"]}]}"#;
        let s = SuperpowerSum::from_json(text).unwrap();
        assert_eq!(s.terms()[1], Term::new(Rational::from_i64(-1), vec![r(-5, 7)]));
        assert_eq!(SuperpowerSum::from_json(&s.to_json()).unwrap(), s);
        assert!(SuperpowerSum::from_json(r#"{"ell": 2, "terms": [{"coeff": "1", "bases": ["3"]}]}"#).is_err());
        assert!(SuperpowerSum::from_json(r#"{"ell": 1, "terms": []}"#).is_err());
        assert!(SuperpowerSum::from_json(r#"{"ell": 1, "terms": [{"coeff": "1/0", "bases": ["3"]}]}"#).is_err());
    }

    #[test]
    fn normalized_is_strictly_sorted() {
        let s = SuperpowerSum::from_rows(&[&[1, 9, 2], &[2, -3, 2], &[5, 4, 1], &[-1, 3, 2]]).unwrap();
        let n = normalize_even(&s).normalized().unwrap();
        assert!(n.is_canonical());
        assert_eq!(n.k(), 3);
    }
}
