//! Brent's variant of Pollard's rho, for machine words and big integers.
//!
//! Both splitters draw their polynomial constant and starting point from a
//! ChaCha stream seeded with the budget's seed mixed with the input, so the
//! same input and seed always follow the same walk.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::prime::mul_mod;

const SEED: u64 = 0x05ee_d0f5_u64 ^ 0x9e37_79b9_7f4a_7c15;
const BATCH: u64 = 128;

/// Remaining splitting iterations, shared by every rho call of one factoring job.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Meter {
    pub remaining: u64,
    pub seed: u64,
}

impl Meter {
    fn spend(&mut self, units: u64) -> bool {
        if self.remaining < units {
            self.remaining = 0;
            false
        } else {
            self.remaining -= units;
            true
        }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

fn rng_for(n: &BigUint, seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ seed.rotate_left(17) ^ fnv1a(&n.to_bytes_le()))
}

/// Finds a nontrivial divisor of the odd composite `n`, or `None` once the
/// meter runs dry.
pub(crate) fn split_u64(n: u64, meter: &mut Meter) -> Option<u64> {
    debug_assert!(n > 3 && n % 2 == 1);
    let mut rng = rng_for(&BigUint::from(n), meter.seed);
    loop {
        let c = rng.random_range(1..n);
        let mut y = rng.random_range(0..n);
        let f = |v: u64| ((mul_mod(v, v, n) as u128 + c as u128) % n as u128) as u64;
        let (mut x, mut ys) = (y, y);
        let mut g = 1u64;
        let mut q = 1u64;
        let mut r = 1u64;
        while g == 1 {
            x = y;
            if !meter.spend(r) {
                return None;
            }
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let steps = BATCH.min(r - k);
                if !meter.spend(steps) {
                    return None;
                }
                for _ in 0..steps {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += steps;
            }
            r *= 2;
        }
        if g == n {
            loop {
                if !meter.spend(1) {
                    return None;
                }
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
        // Cycle closed without a split; retry with fresh parameters.
    }
}

fn abs_diff(a: &BigUint, b: &BigUint) -> BigUint {
    if a >= b {
        a - b
    } else {
        b - a
    }
}

/// Big-integer counterpart of [`split_u64`].
pub(crate) fn split_big(n: &BigUint, meter: &mut Meter) -> Option<BigUint> {
    if let Some(small) = n.to_u64() {
        return split_u64(small, meter).map(BigUint::from);
    }
    let mut rng = rng_for(n, meter.seed);
    let one = BigUint::one();
    loop {
        let c = BigUint::from(rng.random_range(1..u64::MAX)) % n;
        let mut y = BigUint::from(rng.random::<u64>()) % n;
        let f = |v: &BigUint| (v * v + &c) % n;
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut g = one.clone();
        let mut q = one.clone();
        let mut r = 1u64;
        while g.is_one() {
            x = y.clone();
            if !meter.spend(r) {
                return None;
            }
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let steps = BATCH.min(r - k);
                if !meter.spend(steps) {
                    return None;
                }
                for _ in 0..steps {
                    y = f(&y);
                    q = (&q * abs_diff(&x, &y)) % n;
                }
                g = q.gcd(n);
                k += steps;
            }
            r *= 2;
        }
        if &g == n || g.is_zero() {
            loop {
                if !meter.spend(1) {
                    return None;
                }
                ys = f(&ys);
                g = abs_diff(&x, &ys).gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
}
