//! Exact numeric primitives: valuations, exponent polynomials, rigorous
//! interval enclosures and power towers.

mod interval;
mod poly;
mod tower;

pub use interval::{e_bounds, ln2, ln_bounds, log2_bounds, round_down, round_up, sqrt_bounds, Interval};
pub use poly::ExponentPolynomial;
pub use tower::{slog, tetrate, tetrate_with_precision, TowerValue};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::factor::is_prime;

/// Exponent of the prime `p` in the nonzero integer `x`.
pub fn valuation(p: &BigUint, x: &BigInt) -> Result<u64> {
    if x.is_zero() {
        return Err(Error::ZeroValuation);
    }
    if !is_prime(p)? {
        return Err(Error::NotPrime(p.to_string()));
    }
    Ok(multiplicity(p, x.magnitude()))
}

/// Number of times `d > 1` divides the nonzero `x`.
pub(crate) fn multiplicity(d: &BigUint, x: &BigUint) -> u64 {
    debug_assert!(!x.is_zero() && d > &BigUint::from(1u32));
    let mut count = 0;
    let mut x = x.clone();
    loop {
        let (q, r) = x.div_rem(d);
        if !r.is_zero() {
            return count;
        }
        count += 1;
        x = q;
    }
}
