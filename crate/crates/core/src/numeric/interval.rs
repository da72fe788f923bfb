//! Closed rational intervals with outward (directed) rounding, and rigorous
//! enclosures of `ln`, `log2` and `e`.

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// `[lo, hi]` with `lo <= hi`; every operation returns an enclosure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

/// Largest dyadic `k / 2^bits <= r`.
pub fn round_down(r: &Rational, bits: u32) -> Rational {
    let scaled = Rational::from_integer(r.numer() << bits) / Rational::from_integer(r.denom().clone());
    Rational::new(scaled.floor(), BigInt::one() << bits).expect("nonzero")
}

/// Smallest dyadic `k / 2^bits >= r`.
pub fn round_up(r: &Rational, bits: u32) -> Rational {
    let scaled = Rational::from_integer(r.numer() << bits) / Rational::from_integer(r.denom().clone());
    Rational::new(scaled.ceil(), BigInt::one() << bits).expect("nonzero")
}

impl Interval {
    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-self.hi.clone(), -self.lo.clone())
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        self.add(&other.neg())
    }

    /// Multiplication by an exact integer of either sign.
    pub fn scale(&self, k: &BigInt) -> Interval {
        let k = Rational::from_integer(k.clone());
        if k.is_negative() {
            Interval::new(&self.hi * &k, &self.lo * &k)
        } else {
            Interval::new(&self.lo * &k, &self.hi * &k)
        }
    }

    /// Product of two intervals of nonnegative numbers.
    pub fn mul_nonneg(&self, other: &Interval) -> Interval {
        debug_assert!(!self.lo.is_negative() && !other.lo.is_negative());
        Interval::new(&self.lo * &other.lo, &self.hi * &other.hi)
    }

    /// Widens both ends outward to dyadics with `bits` fractional bits.
    pub fn rounded(&self, bits: u32) -> Interval {
        Interval::new(round_down(&self.lo, bits), round_up(&self.hi, bits))
    }
}

/// Bounds on `atanh(z) = z + z^3/3 + ...` for `0 <= z <= 0.4`.
fn atanh_bounds(z: &Rational, bits: u32) -> Interval {
    let work = bits + 16;
    let z2 = z * z;
    let mut power_lo = z.clone();
    let mut power_hi = z.clone();
    let mut sum_lo = Rational::zero();
    let mut sum_hi = Rational::zero();
    let mut k = 0i64;
    let eps = Rational::new(BigInt::one(), BigInt::one() << (bits + 4)).expect("nonzero");
    loop {
        let odd = Rational::from_i64(2 * k + 1);
        sum_lo = round_down(&(&sum_lo + &(&power_lo / &odd)), work);
        sum_hi = round_up(&(&sum_hi + &(&power_hi / &odd)), work);
        k += 1;
        power_lo = round_down(&(&power_lo * &z2), work + 8);
        power_hi = round_up(&(&power_hi * &z2), work + 8);
        // Tail is at most z^(2k+1) / ((2k+1)(1 - z^2)) <= 5/4 * z^(2k+1).
        let tail = &power_hi * &Rational::ratio(5, 4);
        if tail < eps || power_hi.is_zero() {
            sum_hi = &sum_hi + &tail;
            break;
        }
    }
    Interval::new(sum_lo, sum_hi)
}

/// Enclosure of `ln 2` with about `bits` bits of accuracy.
pub fn ln2(bits: u32) -> Interval {
    let a = atanh_bounds(&Rational::ratio(1, 3), bits);
    a.scale(&BigInt::from(2))
}

/// Floor of `log2 x` for positive rational `x`.
fn floor_log2(x: &Rational) -> i64 {
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let mut k = nb - db;
    // 2^k <= x < 2^(k+1) after at most one adjustment
    if pow2(k) > *x {
        k -= 1;
    }
    k
}

fn pow2(k: i64) -> Rational {
    if k >= 0 {
        Rational::from_integer(BigInt::one() << k as u64)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-k) as u64).expect("nonzero")
    }
}

/// `x = 2^k m` with `m` in `[1, 2]`; `m` is bracketed by dyadics with `sig`
/// fractional bits when `x` is too large to divide out exactly.
fn split_log2(x: &Rational, sig: u32) -> (i64, Rational, Rational) {
    let k = floor_log2(x);
    let (n, d) = (x.numer().magnitude(), x.denom().magnitude());
    if n.bits() + d.bits() <= 4 * sig as u64 + 256 {
        let m = x / &pow2(k);
        return (k, m.clone(), m);
    }
    let shift = sig as i64 - k;
    let q = if shift >= 0 { (n << shift as u64) / d } else { n / (d << (-shift) as u64) };
    let scale = BigInt::one() << sig;
    let lo = Rational::new(BigInt::from(q.clone()), scale.clone()).expect("nonzero");
    let hi = Rational::new(BigInt::from(q + 1u32), scale).expect("nonzero");
    (k, lo, hi)
}

/// Bounds on `ln m` for `m` in `[1, 2]`.
fn ln_mantissa(m: &Rational, work: u32) -> Interval {
    // z = (m - 1)/(m + 1) in [0, 1/3]
    let z = (m - &Rational::one()) / (m + &Rational::one());
    let lo = atanh_bounds(&round_down(&z, work + 4), work).lo;
    let hi = atanh_bounds(&round_up(&z, work + 4), work).hi;
    Interval::new(lo, hi).scale(&BigInt::from(2))
}

/// Enclosure of `ln x` for `x > 0`.
pub fn ln_bounds(x: &Rational, bits: u32) -> Result<Interval> {
    if !x.is_positive() {
        return Err(Error::InvalidArgument(format!("ln of nonpositive {x}")));
    }
    let (k, m_lo, m_hi) = split_log2(x, bits + 8);
    let extra = 64 - (k.unsigned_abs() | 1).leading_zeros();
    let work = bits + extra + 4;
    let frac = Interval::new(ln_mantissa(&m_lo, work).lo, ln_mantissa(&m_hi, work).hi);
    Ok(ln2(work).scale(&BigInt::from(k)).add(&frac))
}

/// Enclosure of `log2 x` for `x > 0`.
pub fn log2_bounds(x: &Rational, bits: u32) -> Result<Interval> {
    if !x.is_positive() {
        return Err(Error::InvalidArgument(format!("log2 of nonpositive {x}")));
    }
    let (k, m_lo, m_hi) = split_log2(x, bits + 8);
    if m_hi == Rational::one() {
        return Ok(Interval::point(Rational::from_i64(k)));
    }
    let work = bits + 8;
    let ln_m = Interval::new(ln_mantissa(&m_lo, work).lo, ln_mantissa(&m_hi, work).hi);
    let l2 = ln2(work);
    // ln m >= 0 and ln 2 > 0, so the quotient is monotone in each end.
    let lo = &ln_m.lo / &l2.hi;
    let hi = &ln_m.hi / &l2.lo;
    let frac = Interval::new(round_down(&lo, bits + 2), round_up(&hi, bits + 2));
    Ok(frac.add(&Interval::point(Rational::from_i64(k))))
}

/// Enclosure of Euler's number.
pub fn e_bounds(bits: u32) -> Interval {
    let mut term = Rational::one();
    let mut sum = Rational::one();
    let mut k = 1i64;
    let eps = Rational::new(BigInt::one(), BigInt::one() << (bits + 2)).expect("nonzero");
    loop {
        term = &term / &Rational::from_i64(k);
        sum = &sum + &term;
        k += 1;
        // tail after 1/(k-1)! is below 2/k!
        let tail = &term * &Rational::ratio(2, k);
        if tail < eps {
            return Interval::new(sum.clone(), &sum + &tail);
        }
    }
}

/// Bounds on `y^(1/2)` for rational `y >= 0`, at `bits` fractional bits.
pub fn sqrt_bounds(y: &Rational, bits: u32) -> Interval {
    let scale = BigInt::one() << (2 * bits);
    let scaled = Rational::from_integer(y.numer() * &scale) / Rational::from_integer(y.denom().clone());
    let lo_int = scaled.floor().magnitude().sqrt();
    let hi_arg = scaled.ceil().magnitude().clone();
    let mut hi_int = hi_arg.sqrt();
    if &hi_int * &hi_int < hi_arg {
        hi_int += BigUint::one();
    }
    let den = BigInt::one() << bits;
    Interval::new(
        Rational::new(BigInt::from(lo_int), den.clone()).expect("nonzero"),
        Rational::new(BigInt::from(hi_int), den).expect("nonzero"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn to_f64(r: &Rational) -> f64 {
        use num_traits::ToPrimitive;
        r.as_big().to_f64().unwrap()
    }

    #[test]
    fn ln2_encloses() {
        let i = ln2(100);
        assert!(to_f64(&i.lo) <= std::f64::consts::LN_2);
        assert!(to_f64(&i.hi) >= std::f64::consts::LN_2);
        assert!(i.width() < Rational::new(BigInt::one(), BigInt::one() << 95).unwrap());
    }

    #[test]
    fn ln_encloses_known_values() {
        for (x, expect) in [(3i64, 3f64.ln()), (10, 10f64.ln()), (1, 0.0), (1_000_003, 1_000_003f64.ln())] {
            let i = ln_bounds(&Rational::from_i64(x), 80).unwrap();
            assert!(i.lo <= i.hi);
            assert!((to_f64(&i.lo) - expect).abs() < 1e-12, "x = {x}");
            assert!((to_f64(&i.hi) - expect).abs() < 1e-12, "x = {x}");
        }
        let i = ln_bounds(&Rational::ratio(2, 3), 80).unwrap();
        assert!(i.hi.is_negative());
        assert!((to_f64(&i.lo) - (2f64 / 3.0).ln()).abs() < 1e-12);
        assert!(ln_bounds(&Rational::zero(), 10).is_err());
    }

    #[test]
    fn ln_is_rigorous_against_exponentiation() {
        // exp(lo) <= x <= exp(hi), checked as 2^(log2) on exact powers of two.
        let i = log2_bounds(&Rational::from_i64(1 << 20), 40).unwrap();
        assert_eq!(i, Interval::point(Rational::from_i64(20)));
        let i = log2_bounds(&Rational::from_i64(3), 60).unwrap();
        // 3^k lies between 2^(k lo) and 2^(k hi) for k = 1000.
        let k = 1000i64;
        let lo = (&i.lo * &Rational::from_i64(k)).floor();
        let hi = (&i.hi * &Rational::from_i64(k)).ceil();
        let three_k = BigInt::from(3).pow(k as u32);
        let shift = |b: &BigInt| u64::try_from(b).unwrap();
        assert!(BigInt::one() << shift(&lo) <= three_k);
        assert!(BigInt::one() << shift(&hi) >= three_k);
    }

    #[test]
    fn e_encloses() {
        let i = e_bounds(60);
        assert!(to_f64(&i.lo) <= std::f64::consts::E && to_f64(&i.hi) >= std::f64::consts::E);
    }

    #[test]
    fn sqrt_bounds_enclose() {
        let y = Rational::ratio(3, 2);
        let i = sqrt_bounds(&y, 50);
        assert!(&i.lo * &i.lo <= y && &i.hi * &i.hi >= y);
        let i = sqrt_bounds(&Rational::from_i64(16), 10);
        assert_eq!(i, Interval::point(Rational::from_i64(4)));
    }

    #[test]
    fn dyadic_rounding_is_directed() {
        let r = Rational::ratio(1, 3);
        assert!(round_down(&r, 10) <= r && round_up(&r, 10) >= r);
        let r = Rational::ratio(-1, 3);
        assert!(round_down(&r, 10) <= r && round_up(&r, 10) >= r);
    }
}
