//! The reduced sequence `sigma_n = u_n / pi_n`, dominance thresholds between
//! terms, and rigorous logarithm enclosures of `|sigma_n|` at indices far
//! too large to evaluate.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::params::WitnessParams;
use crate::error::{Error, Result};
use crate::factor::FactoredInteger;
use crate::numeric::{log2_bounds, ExponentPolynomial, Interval};
use crate::rational::Rational;
use crate::residue::{PowerFactor, PowerProduct, PowerProductSum};
use crate::sequence::NormalizedInstance;

/// Above this many bits `sigma_n` is never materialized.
const EXACT_BITS: u64 = 1 << 16;
const MAX_PRECISION: u32 = 1 << 14;

/// `sigma_n = sum_i x_{i,0} prod_p p^(de_p^(i)(n))`, valid for `n >= threshold`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaForm {
    pub threshold: u64,
    pub sum: PowerProductSum,
    /// `(p, de_p^(i))` per term, zero polynomials included.
    exponents: Vec<Vec<(BigUint, ExponentPolynomial)>>,
}

impl SigmaForm {
    pub fn new(params: &WitnessParams) -> Self {
        let mut terms = Vec::with_capacity(params.k());
        let mut exponents = Vec::with_capacity(params.k());
        for (i, c) in params.coefficients.iter().enumerate() {
            let per_prime: Vec<(BigUint, ExponentPolynomial)> =
                params.primes.iter().map(|pe| (pe.prime.clone(), pe.delta(i))).collect();
            let factors = per_prime
                .iter()
                .filter(|(_, d)| !d.is_zero())
                .map(|(p, d)| PowerFactor { base: BigInt::from(p.clone()), exponent: d.clone() })
                .collect();
            terms.push(PowerProduct { coeff: c.clone(), factors });
            exponents.push(per_prime);
        }
        SigmaForm { threshold: params.n_p, sum: PowerProductSum { terms }, exponents }
    }

    fn check_index(&self, n: &BigUint) -> Result<()> {
        if n < &BigUint::from(self.threshold) {
            return Err(Error::BelowThreshold { n: n.to_string(), threshold: self.threshold.to_string() });
        }
        Ok(())
    }

    pub fn eval_exact(&self, n: u64) -> Result<BigInt> {
        let n = BigUint::from(n);
        self.check_index(&n)?;
        self.sum.eval_exact(&n)
    }

    pub fn eval_big(&self, n: &BigUint) -> Result<BigInt> {
        self.check_index(n)?;
        self.sum.eval_exact(n)
    }

    /// `sigma_n mod q^a`.
    pub fn residue_prime_power(&self, n: &BigUint, q: &BigUint, a: u64) -> Result<BigUint> {
        self.check_index(n)?;
        self.sum.residue_prime_power(n, q, a)
    }

    pub fn residue(&self, n: &BigUint, m: &FactoredInteger) -> Result<BigUint> {
        self.check_index(n)?;
        self.sum.residue(n, m)
    }

    /// Largest `v <= cap` with `q^v | sigma_n`, from residues alone.
    pub fn valuation(&self, n: &BigUint, q: &BigUint, cap: u64) -> Result<u64> {
        self.at(n)?.valuation(q, cap)
    }

    /// Evaluates the exponents at `n` once for repeated residues.
    pub fn at(&self, n: &BigUint) -> Result<SigmaAt<'_>> {
        self.check_index(n)?;
        Ok(SigmaAt { form: self, exps: self.sum.exponents_at(n)? })
    }

    /// Exact exponents `de_p^(i)(n)`; negative values mean `n` is too small.
    fn exponents_at(&self, n: &BigUint) -> Vec<Vec<(BigUint, BigInt)>> {
        self.exponents
            .iter()
            .map(|row| row.iter().map(|(p, d)| (p.clone(), d.eval(n))).collect())
            .collect()
    }

    /// Upper estimate of the bit length of `|sigma_n|`.
    pub fn bit_estimate(&self, n: &BigUint) -> BigUint {
        let mut best = BigUint::zero();
        for (t, row) in self.sum.terms.iter().zip(self.exponents_at(n)) {
            let mut bits = BigUint::from(t.coeff.bits());
            for (p, e) in row {
                if e.is_positive() {
                    bits += e.magnitude() * p.bits();
                }
            }
            best = best.max(bits);
        }
        best + self.sum.terms.len()
    }

    /// `|sigma_n|`, exactly when small, otherwise as a `log2` enclosure whose
    /// logarithms carry `bits` fractional bits.
    pub fn magnitude(&self, n: &BigUint, bits: u32) -> Result<Magnitude> {
        self.check_index(n)?;
        if self.bit_estimate(n) <= BigUint::from(EXACT_BITS) {
            return Ok(Magnitude::Exact(self.sum.eval_exact(n)?.magnitude().clone()));
        }
        self.log2_enclosure(n, bits).map(Magnitude::Log2)
    }

    /// Enclosure of `log2 |sigma_n|` through the dominant last term.
    ///
    /// With `rho` bounding the sum of the other terms relative to the last,
    /// `log2 |sigma_n|` lies within `[-2 rho, 2 rho]` of the last term's
    /// logarithm as long as `rho <= 1/2`. The ratios are formed from exact
    /// exponent differences, so their error shrinks with the ratio itself.
    pub fn log2_enclosure(&self, n: &BigUint, bits: u32) -> Result<LogBounds> {
        let exps = self.exponents_at(n);
        if exps.iter().flatten().any(|(_, e)| e.is_negative()) {
            return Err(Error::BelowThreshold { n: n.to_string(), threshold: self.threshold.to_string() });
        }
        let mut logs: BTreeMap<&BigUint, LogBounds> = BTreeMap::new();
        for (p, _) in &self.exponents[0] {
            logs.insert(p, LogBounds::of(&Rational::from_integer(BigInt::from(p.clone())), bits)?);
        }
        let top = exps.len() - 1;
        let top_coeff = &self.sum.terms[top].coeff;
        let mut rho = Rational::zero();
        for (t, row) in self.sum.terms.iter().zip(&exps).take(top) {
            let mut rel = LogBounds::of(&Rational::new(t.coeff.abs(), top_coeff.abs())?, bits)?;
            for ((p, e), (_, e_top)) in row.iter().zip(&exps[top]) {
                rel = rel.add(&logs[p].scale(&(e - e_top)));
            }
            let u = rel.ceil_hi();
            if u.is_positive() {
                return Err(Error::InvalidArgument(format!("last term is not dominant at n = {n}")));
            }
            let u = u.to_i64().unwrap_or(i64::MIN).max(-256);
            rho = &rho + &Rational::new(BigInt::one(), BigInt::one() << (-u) as usize)?;
        }
        if rho > Rational::ratio(1, 2) {
            return Err(Error::InvalidArgument(format!("last term is not dominant at n = {n}")));
        }
        let mut lead = LogBounds::of(&Rational::from_integer(top_coeff.abs()), bits)?;
        for (p, e) in &exps[top] {
            lead = lead.add(&logs[p].scale(e));
        }
        let slack = (&rho * &Rational::from_i64(2) * Rational::from_integer(BigInt::one() << bits)).ceil();
        Ok(LogBounds { lo: lead.lo - &slack, hi: lead.hi + slack, bits })
    }
}

/// `sigma_n` at one fixed index.
pub struct SigmaAt<'a> {
    form: &'a SigmaForm,
    exps: Vec<Vec<BigUint>>,
}

impl SigmaAt<'_> {
    pub fn residue_prime_power(&self, q: &BigUint, a: u64) -> Result<BigUint> {
        self.form.sum.residue_prime_power_at(&self.exps, q, a)
    }

    pub fn divisible(&self, q: &BigUint, a: u64) -> Result<bool> {
        Ok(self.residue_prime_power(q, a)?.is_zero())
    }

    /// Largest `v <= cap` with `q^v | sigma_n`.
    pub fn valuation(&self, q: &BigUint, cap: u64) -> Result<u64> {
        for a in 1..=cap {
            if !self.divisible(q, a)? {
                return Ok(a - 1);
            }
        }
        Ok(cap)
    }
}

/// Fixed-point enclosure `[lo, hi] / 2^bits`, kept as integers so that
/// huge scalings never trigger rational normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogBounds {
    pub lo: BigInt,
    pub hi: BigInt,
    pub bits: u32,
}

impl LogBounds {
    /// `log2 x` for a positive rational of moderate size.
    pub fn of(x: &Rational, bits: u32) -> Result<Self> {
        Ok(Self::from_interval(&log2_bounds(x, bits)?, bits))
    }

    pub fn from_interval(i: &Interval, bits: u32) -> Self {
        let scale = Rational::from_integer(BigInt::one() << bits);
        LogBounds { lo: (&i.lo * &scale).floor(), hi: (&i.hi * &scale).ceil(), bits }
    }

    pub fn add(&self, other: &LogBounds) -> LogBounds {
        debug_assert_eq!(self.bits, other.bits);
        LogBounds { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi, bits: self.bits }
    }

    pub fn scale(&self, k: &BigInt) -> LogBounds {
        let (a, b) = (&self.lo * k, &self.hi * k);
        if k.is_negative() {
            LogBounds { lo: b, hi: a, bits: self.bits }
        } else {
            LogBounds { lo: a, hi: b, bits: self.bits }
        }
    }

    pub fn ceil_hi(&self) -> BigInt {
        let d = BigInt::one() << self.bits;
        self.hi.div_ceil(&d)
    }

    pub fn floor_lo(&self) -> BigInt {
        self.lo.div_floor(&(BigInt::one() << self.bits))
    }
}

/// `|sigma_n|` either exactly or through a `log2` enclosure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Magnitude {
    Exact(BigUint),
    Log2(LogBounds),
}

impl Magnitude {
    /// The enclosure at `bits` fractional bits.
    pub fn log2(&self, bits: u32) -> Result<LogBounds> {
        match self {
            Magnitude::Exact(v) if v.is_zero() => Err(Error::ZeroValuation),
            Magnitude::Exact(v) => LogBounds::of(&Rational::from_integer(BigInt::from(v.clone())), bits),
            Magnitude::Log2(l) if l.bits == bits => Ok(l.clone()),
            Magnitude::Log2(l) => {
                let (lo, hi) = if l.bits < bits {
                    let s = bits - l.bits;
                    (&l.lo << s, &l.hi << s)
                } else {
                    let d = BigInt::one() << (l.bits - bits);
                    (l.lo.div_floor(&d), l.hi.div_ceil(&d))
                };
                Ok(LogBounds { lo, hi, bits })
            }
        }
    }

    /// Certified order, or `None` when the enclosures overlap.
    pub fn compare(&self, other: &Magnitude, bits: u32) -> Result<Option<Ordering>> {
        if let (Magnitude::Exact(a), Magnitude::Exact(b)) = (self, other) {
            return Ok(Some(a.cmp(b)));
        }
        let a = self.log2(bits)?;
        let b = other.log2(bits)?;
        Ok(if a.lo > b.hi {
            Some(Ordering::Greater)
        } else if a.hi < b.lo {
            Some(Ordering::Less)
        } else {
            None
        })
    }
}

/// Precisions tried in turn by checks that refine enclosures.
pub const PRECISIONS: [u32; 5] = [64, 256, 1024, 4096, MAX_PRECISION];

/// Smallest `t >= 1` such that `factor * |term_i(n)| < |term_m(n)|` for all
/// `n >= t`, where term `i` precedes term `m` in the power-tuple order.
pub(crate) fn ratio_threshold(inst: &NormalizedInstance, i: usize, m: usize, factor: u64) -> Result<u64> {
    let (xi, xm) = (inst.powers(i), inst.powers(m));
    let top = (0..xi.len())
        .rev()
        .find(|&j| xi[j] != xm[j])
        .ok_or_else(|| Error::InvalidArgument("terms share a power tuple".into()))?;
    let lead = Rational::new(inst.coeff(i).abs() * factor, inst.coeff(m).abs())?;
    let mut bits = 32u32;
    loop {
        let mut upper = vec![log2_bounds(&lead, bits)?.hi];
        for (a, b) in xi.iter().zip(xm) {
            upper.push(log2_bounds(&Rational::new(a.clone(), b.clone())?, bits)?.hi);
        }
        if upper[top + 1].is_negative() {
            let d = upper.iter().fold(BigInt::one(), |acc, u| acc.lcm(&u.denom().clone()));
            let scale = Rational::from_integer(d);
            let h: Vec<BigInt> = upper
                .iter()
                .map(|u| (-(u * &scale)).to_integer().expect("denominator cleared"))
                .collect();
            let t = ExponentPolynomial::new(h).threshold_at_least(&BigInt::one())?;
            return t.to_u64().ok_or_else(|| Error::InvalidArgument("dominance threshold too large".into()));
        }
        if bits >= MAX_PRECISION {
            return Err(Error::Undecided);
        }
        bits *= 2;
    }
}
