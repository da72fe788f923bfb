use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Integer polynomial `c_0 + c_1 n + ... + c_l n^l` used as an exponent.
///
/// Per-prime exponents of a term have nonnegative coefficients; differences
/// of them may have negative ones and are only eventually nonnegative.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExponentPolynomial {
    coeffs: Vec<BigInt>,
}

impl ExponentPolynomial {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        ExponentPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(len: usize) -> Self {
        Self::new(vec![BigInt::zero(); len])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Index of the highest nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.degree().map(|d| &self.coeffs[d])
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn sub(&self, other: &ExponentPolynomial) -> ExponentPolynomial {
        let len = self.len().max(other.len());
        let zero = BigInt::zero();
        let at = |p: &ExponentPolynomial, i: usize| p.coeffs.get(i).unwrap_or(&zero).clone();
        ExponentPolynomial::new((0..len).map(|i| at(self, i) - at(other, i)).collect())
    }

    /// `p(n + shift)`, via binomial expansion.
    pub fn shifted(&self, shift: i64) -> ExponentPolynomial {
        let len = self.len();
        let mut out = vec![BigInt::zero(); len];
        let shift = BigInt::from(shift);
        for (h, c) in self.coeffs.iter().enumerate() {
            let mut binom = BigInt::one();
            for j in (0..=h).rev() {
                // c * C(h, j) * shift^(h-j) contributes to n^j
                let k = h - j;
                out[j] += c * &binom * shift.pow(k as u32);
                binom = binom * BigInt::from(j) / BigInt::from(k + 1);
            }
        }
        ExponentPolynomial::new(out)
    }

    /// Exact value at `n`.
    pub fn eval(&self, n: &BigUint) -> BigInt {
        let n = BigInt::from(n.clone());
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * &n + c)
    }

    pub fn eval_i64(&self, n: i64) -> BigInt {
        let n = BigInt::from(n);
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * &n + c)
    }

    /// Value at `n` reduced into `[0, m)`, never forming `n^j` unreduced.
    pub fn eval_mod(&self, n: &BigUint, m: &BigUint) -> BigUint {
        assert!(!m.is_zero(), "modulus must be positive");
        let mi = BigInt::from(m.clone());
        let nr = n % m;
        let mut acc = BigUint::zero();
        for c in self.coeffs.iter().rev() {
            let c = c.mod_floor(&mi).magnitude().clone();
            acc = (acc * &nr + c) % m;
        }
        acc
    }

    /// Eventual order: compares coefficients from the top degree down.
    pub fn cmp_eventual(&self, other: &ExponentPolynomial) -> Ordering {
        let len = self.len().max(other.len());
        let zero = BigInt::zero();
        for i in (0..len).rev() {
            let a = self.coeffs.get(i).unwrap_or(&zero);
            let b = other.coeffs.get(i).unwrap_or(&zero);
            match a.cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }

    /// Smallest `t >= 1` with `p(n) >= floor` for every integer `n >= t`.
    ///
    /// Past the threshold of the forward difference the polynomial is
    /// nondecreasing, so the crossing there is found by bisection below a
    /// Cauchy root bound. Below that point at most [`SCAN_LIMIT`] indices are
    /// scanned; beyond it the result is still valid but may not be minimal.
    /// Fails when `p - floor` is eventually negative.
    pub fn threshold_at_least(&self, floor: &BigInt) -> Result<BigUint> {
        let shifted = {
            let mut c = self.coeffs.clone();
            if c.is_empty() {
                c.push(BigInt::zero());
            }
            c[0] -= floor;
            ExponentPolynomial::new(c)
        };
        let Some(d) = shifted.degree() else {
            // identically zero: p(n) == floor everywhere
            return Ok(BigUint::one());
        };
        let lead = &shifted.coeffs[d];
        if lead.is_negative() {
            return Err(Error::InvalidArgument(
                "polynomial is eventually below the requested floor".into(),
            ));
        }
        if d == 0 {
            return Ok(BigUint::one());
        }
        // Every real root satisfies |z| < 1 + max |a_i / a_d|.
        let max_ratio = shifted.coeffs[..d]
            .iter()
            .map(|a| a.abs().div_ceil(&lead.abs()))
            .max()
            .unwrap_or_else(BigInt::zero);
        let bound = (max_ratio + 1u32).magnitude().clone();
        let monotone = if d == 1 {
            BigUint::one()
        } else {
            let step = shifted.shifted(1).sub(&shifted);
            step.threshold_at_least(&BigInt::zero())?
        };
        let nonneg = |n: &BigUint| !shifted.eval(n).is_negative();
        // first n >= monotone with p(n) >= floor
        let (mut lo, mut hi) = (monotone.clone(), bound.max(monotone.clone()));
        while lo < hi {
            let mid: BigUint = (&lo + &hi) >> 1;
            if nonneg(&mid) {
                hi = mid;
            } else {
                lo = mid + 1u32;
            }
        }
        let mut t = lo;
        if t > monotone {
            return Ok(t);
        }
        for _ in 0..SCAN_LIMIT {
            if t <= BigUint::one() {
                break;
            }
            let prev = &t - 1u32;
            if !nonneg(&prev) {
                break;
            }
            t = prev;
        }
        Ok(t.max(BigUint::one()))
    }
}

/// Longest downward scan below the monotone region.
pub const SCAN_LIMIT: u32 = 1 << 16;

impl fmt::Debug for ExponentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl Serialize for ExponentPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs.iter().map(|c| c.to_string()))
    }
}

impl<'de> Deserialize<'de> for ExponentPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(ExponentPolynomial::new)
    }
}
