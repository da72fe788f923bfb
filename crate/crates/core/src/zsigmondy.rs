//! Primitive prime divisors of `a^n - b^n`, the exceptions to their
//! existence, and the bound `omega(a^n - b^n) >= sigma0(n) - 2`.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{factor, sigma0, Budget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZsigmondyQuery {
    pub a: u64,
    pub b: u64,
    pub n: u64,
}

impl ZsigmondyQuery {
    pub fn new(a: u64, b: u64, n: u64) -> Result<Self> {
        if b == 0 || a <= b {
            return Err(Error::InvalidArgument(format!("need a > b >= 1, got a = {a}, b = {b}")));
        }
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
        }
        Ok(ZsigmondyQuery { a, b, n })
    }

    /// `gcd(a, b)`; anything above 1 is divided out before the scan.
    pub fn common_factor(&self) -> u64 {
        self.a.gcd(&self.b)
    }

    pub fn is_coprime(&self) -> bool {
        self.common_factor() == 1
    }
}

/// `a^n - b^n` exactly.
pub fn difference(a: u64, b: u64, n: u64) -> Result<BigInt> {
    let n = u32::try_from(n).map_err(|_| Error::InvalidArgument("exponent too large".into()))?;
    Ok(BigInt::from(a).pow(n) - BigInt::from(b).pow(n))
}

/// The two exceptional shapes: `(2, 1, 6)`, and `n = 2` with `a + b` a power of 2.
pub fn is_exception(q: &ZsigmondyQuery) -> bool {
    (q.a, q.b, q.n) == (2, 1, 6) || (q.n == 2 && (q.a + q.b).is_power_of_two())
}

/// Primes dividing `a^n - b^n` but no `a^m - b^m` with `m < n`.
///
/// A common factor of `a` and `b` is removed first; its primes divide every
/// term and so are never primitive.
pub fn primitive_prime_divisors(q: &ZsigmondyQuery, budget: Budget) -> Result<BTreeSet<BigUint>> {
    let g = q.common_factor();
    let (a, b) = (q.a / g, q.b / g);
    let value = difference(a, b, q.n)?;
    let f = factor(&value, budget)?.complete()?;
    let (a, b) = (BigUint::from(a), BigUint::from(b));
    let mut out = BTreeSet::new();
    'primes: for p in f.primes() {
        for m in 1..q.n {
            let m = BigUint::from(m);
            if a.modpow(&m, p) == b.modpow(&m, p) {
                continue 'primes;
            }
        }
        out.insert(p.clone());
    }
    Ok(out)
}

/// One row of the `omega` versus `sigma0` comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaDivisorRow {
    pub n: u64,
    pub omega: u64,
    pub sigma0: u64,
    /// `omega - (sigma0 - 2)`; the bound holds when this is nonnegative.
    pub margin: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaDivisorReport {
    pub a: u64,
    pub b: u64,
    pub rows: Vec<OmegaDivisorRow>,
}

impl OmegaDivisorReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.margin >= 0)
    }
}

/// Compares `omega(a^n - b^n)` with `sigma0(n) - 2` for `2 <= n <= n_max`.
pub fn omega_divisor_bound_check(a: u64, b: u64, n_max: u64, budget: Budget) -> Result<OmegaDivisorReport> {
    ZsigmondyQuery::new(a, b, 2)?;
    let rows = (2..=n_max)
        .into_par_iter()
        .map(|n| {
            let value = difference(a, b, n)?;
            let omega = factor(&value, budget)?.complete()?.omega();
            let sigma0 = sigma0(&BigUint::from(n))?;
            Ok(OmegaDivisorRow { n, omega, sigma0, margin: omega as i64 - (sigma0 as i64 - 2) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OmegaDivisorReport { a, b, rows })
}

/// `(1/n) sum_{i <= n} sigma0(i)`, via `sum_d floor(n / d)`.
pub fn mean_divisor_count(n: u64) -> f64 {
    if n.is_zero() {
        return 0.0;
    }
    let total: u64 = (1..=n).map(|d| n / d).sum();
    total as f64 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: u64, b: u64, n: u64) -> ZsigmondyQuery {
        ZsigmondyQuery::new(a, b, n).unwrap()
    }

    fn primes(v: &[u32]) -> BTreeSet<BigUint> {
        v.iter().map(|&p| BigUint::from(p)).collect()
    }

    #[test]
    fn primitive_examples() {
        let ppd = |a, b, n| primitive_prime_divisors(&q(a, b, n), Budget::DEFAULT).unwrap();
        assert_eq!(ppd(2, 1, 6), primes(&[]));
        assert_eq!(ppd(3, 1, 2), primes(&[]));
        assert_eq!(ppd(2, 1, 4), primes(&[5]));
        // 3^5 - 2^5 = 211, prime
        assert_eq!(ppd(3, 2, 5), primes(&[211]));
        // 4^3 - 2^3 = 8 * (2^3 - 1)
        assert_eq!(ppd(4, 2, 3), primes(&[7]));
    }

    #[test]
    fn exception_examples() {
        assert!(is_exception(&q(2, 1, 6)));
        assert!(is_exception(&q(3, 1, 2)));
        assert!(!is_exception(&q(3, 2, 5)));
        assert!(!is_exception(&q(2, 1, 2)));
    }

    #[test]
    fn rejects_bad_queries() {
        assert!(ZsigmondyQuery::new(2, 2, 3).is_err());
        assert!(ZsigmondyQuery::new(3, 0, 3).is_err());
        assert!(ZsigmondyQuery::new(3, 1, 1).is_err());
        assert!(!q(6, 4, 3).is_coprime());
    }

    #[test]
    fn divisor_bound_rows() {
        let r = omega_divisor_bound_check(2, 1, 12, Budget::DEFAULT).unwrap();
        let six = r.rows.iter().find(|row| row.n == 6).unwrap();
        // 63 = 3^2 * 7
        assert_eq!((six.omega, six.sigma0, six.margin), (2, 4, 0));
        assert!(r.holds());
        let r = omega_divisor_bound_check(3, 2, 12, Budget::DEFAULT).unwrap();
        let twelve = r.rows.last().unwrap();
        // 3^12 - 2^12 = 527345 = 5 * 7 * 13 * 19 * 61
        assert_eq!((twelve.omega, twelve.sigma0), (5, 6));
    }

    #[test]
    fn mean_divisor_count_small() {
        // 1 + 2 + 2 + 3 = 8
        assert_eq!(mean_divisor_count(4), 2.0);
    }
}
