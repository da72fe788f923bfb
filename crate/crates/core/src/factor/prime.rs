use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};

/// Witness bases that make Miller-Rabin deterministic below 2^64
/// (and below 3.3 * 10^24).
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Bound of the small-prime table used for trial division.
pub const SMALL_PRIME_BOUND: u32 = 1 << 16;

/// Outcome of a primality test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primality {
    Composite,
    /// Proven prime (deterministic test, input below 2^64).
    Prime,
    /// Passed a strong pseudoprime test to all fixed bases; not proven.
    ProbablePrime,
}

impl Primality {
    pub fn is_prime(self) -> bool {
        !matches!(self, Primality::Composite)
    }
}

/// Primes below [`SMALL_PRIME_BOUND`].
pub fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve(SMALL_PRIME_BOUND))
}

/// Primes strictly below `limit`.
pub fn sieve(limit: u32) -> Vec<u32> {
    let limit = limit as usize;
    if limit < 3 {
        return Vec::new();
    }
    let mut composite = vec![false; limit];
    let mut out = Vec::new();
    for i in 2..limit {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j < limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn strong_probable_prime_u64(n: u64, d: u64, s: u32, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let mut x = pow_mod_u64(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality for machine-word inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    MR_BASES
        .iter()
        .all(|&a| strong_probable_prime_u64(n, d, s, a))
}

fn strong_probable_prime_big(n: &BigUint, n_minus_1: &BigUint, d: &BigUint, s: u64, a: u64) -> bool {
    let mut x = BigUint::from(a).modpow(d, n);
    if x.is_one() || &x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if &x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Classifies `x >= 2`. Inputs that fit in 64 bits get a proof; larger
/// inputs that pass every base are reported as [`Primality::ProbablePrime`].
pub fn primality(x: &BigUint) -> Result<Primality> {
    if x < &BigUint::from(2u32) {
        return Err(Error::InvalidArgument(format!("primality of {x} (< 2)")));
    }
    if let Some(small) = x.to_u64() {
        return Ok(if is_prime_u64(small) {
            Primality::Prime
        } else {
            Primality::Composite
        });
    }
    for &p in small_primes().iter().take(200) {
        if (x % p).to_u32() == Some(0) {
            return Ok(Primality::Composite);
        }
    }
    let n_minus_1 = x - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let passes = MR_BASES
        .iter()
        .all(|&a| strong_probable_prime_big(x, &n_minus_1, &d, s, a));
    Ok(if passes {
        Primality::ProbablePrime
    } else {
        Primality::Composite
    })
}

/// `true` for primes and probable primes; rejects `x < 2`.
pub fn is_prime(x: &BigUint) -> Result<bool> {
    primality(x).map(Primality::is_prime)
}
