//! Tetration `C↑↑l` and the super-logarithm `slog_C(n)`.
//!
//! Integer bases are evaluated exactly. For a non-integer rational base the
//! tower above level one is generally irrational, so it is carried as a
//! rational enclosure that is tightened until a comparison is decided.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use super::interval::{e_bounds, ln_bounds, log2_bounds, round_down, round_up, sqrt_bounds, Interval};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Value of a tower, or a marker that it exceeds `2^cap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TowerValue {
    Exact(Rational),
    Bounds(Interval),
    OverCap,
}

impl TowerValue {
    /// Decides `self <= n` when possible.
    pub fn le(&self, n: &Rational) -> Option<bool> {
        match self {
            TowerValue::Exact(v) => Some(v <= n),
            TowerValue::Bounds(i) if &i.hi <= n => Some(true),
            TowerValue::Bounds(i) if &i.lo > n => Some(false),
            TowerValue::Bounds(_) => None,
            TowerValue::OverCap => Some(false),
        }
    }
}

const DEFAULT_PRECISION: u32 = 128;
const MAX_PRECISION: u32 = 1 << 14;

fn check_base(c: &Rational) -> Result<()> {
    if c <= &Rational::one() {
        return Err(Error::InvalidArgument(format!("tower base {c} must exceed 1")));
    }
    Ok(())
}

/// `C↑↑l`, exact when representable, `OverCap` once it exceeds `2^cap_bits`.
pub fn tetrate(c: &Rational, l: u64, cap_bits: u64) -> Result<TowerValue> {
    check_base(c)?;
    tower_at(c, l, cap_bits, DEFAULT_PRECISION)
}

/// Like [`tetrate`] with an explicit working precision for irrational levels.
pub fn tetrate_with_precision(c: &Rational, l: u64, cap_bits: u64, precision: u32) -> Result<TowerValue> {
    check_base(c)?;
    tower_at(c, l, cap_bits, precision)
}

fn tower_at(c: &Rational, l: u64, cap: u64, prec: u32) -> Result<TowerValue> {
    let mut roots = RootLadder::new(c, prec);
    let mut value = TowerValue::Exact(Rational::one());
    for _ in 0..l {
        value = tower_step(&mut roots, &value, cap)?;
        if value == TowerValue::OverCap {
            break;
        }
    }
    Ok(value)
}

/// Iterated square roots `C^(1/2^i)`, one chain rounded down and one rounded
/// up, shared by every level of a tower at a fixed precision.
struct RootLadder<'a> {
    c: &'a Rational,
    prec: u32,
    lo: Vec<Rational>,
    hi: Vec<Rational>,
}

impl<'a> RootLadder<'a> {
    fn new(c: &'a Rational, prec: u32) -> Self {
        RootLadder { c, prec, lo: vec![c.clone()], hi: vec![c.clone()] }
    }

    fn root(&mut self, i: usize, upper: bool) -> &Rational {
        let chain = if upper { &mut self.hi } else { &mut self.lo };
        while chain.len() <= i {
            let r = sqrt_bounds(chain.last().expect("seeded"), self.prec + 8);
            chain.push(if upper { r.hi } else { r.lo });
        }
        &chain[i]
    }
}

/// `C^x` for the current level `x`.
fn tower_step(roots: &mut RootLadder<'_>, x: &TowerValue, cap: u64) -> Result<TowerValue> {
    let c = roots.c;
    match x {
        TowerValue::OverCap => Ok(TowerValue::OverCap),
        TowerValue::Exact(e) if e.is_integer() => {
            let e = e.to_integer().expect("integer");
            Ok(match pow_exact(c, &e, cap)? {
                Some(v) => TowerValue::Exact(v),
                None => TowerValue::OverCap,
            })
        }
        TowerValue::Exact(e) => pow_enclosure(roots, &Interval::point(e.clone()), cap),
        TowerValue::Bounds(i) => pow_enclosure(roots, i, cap),
    }
}

/// Lower bound on `log2 C`, positive for `C > 1`.
fn log2_lower(c: &Rational) -> Result<Rational> {
    if c.is_integer() {
        return Ok(Rational::from_i64(c.numer().bits() as i64 - 1));
    }
    Ok(log2_bounds(c, 32)?.lo)
}

/// `C^e` for a nonnegative integer `e`, or `None` if it exceeds `2^cap`.
fn pow_exact(c: &Rational, e: &BigInt, cap: u64) -> Result<Option<Rational>> {
    if e.is_zero() {
        return Ok(Some(Rational::one()));
    }
    let lower_bits = &log2_lower(c)? * &Rational::from_integer(e.clone());
    if lower_bits > Rational::from_integer(BigInt::from(cap)) {
        return Ok(None);
    }
    let e = e
        .to_u32()
        .ok_or_else(|| Error::InvalidArgument("exponent too large".into()))?;
    let v = c.pow_u32(e);
    // The exact value may still land above the cap.
    let limit = Rational::from_integer(BigInt::one() << cap);
    Ok((v <= limit).then_some(v))
}

fn round_down_sig(r: &Rational, sig: u32) -> Rational {
    let mag = r.numer().bits() as i64 - r.denom().bits() as i64;
    let frac = (sig as i64 - mag).max(0) as u32;
    round_down(r, frac)
}

fn round_up_sig(r: &Rational, sig: u32) -> Rational {
    let mag = r.numer().bits() as i64 - r.denom().bits() as i64;
    let frac = (sig as i64 - mag).max(0) as u32;
    round_up(r, frac)
}

/// One side of `C^e`: splits the dyadic exponent into an integer part and
/// binary fraction bits, each served by an iterated square root of `C`.
fn pow_dyadic(roots: &mut RootLadder<'_>, e: &Rational, upper: bool, cap: u64) -> Result<Option<Rational>> {
    let prec = roots.prec;
    let whole = e.floor();
    let Some(mut acc) = pow_exact(roots.c, &whole, cap)? else {
        return Ok(None);
    };
    let frac = e - &Rational::from_integer(whole);
    // frac = m / 2^s with m < 2^s
    let s = frac.denom().bits().saturating_sub(1) as u32;
    let m = frac.numer().magnitude().clone();
    for i in 1..=s {
        if m.bit((s - i) as u64) {
            acc = &acc * roots.root(i as usize, upper);
            acc = if upper {
                round_up_sig(&acc, prec + 8)
            } else {
                round_down_sig(&acc, prec + 8)
            };
        }
    }
    Ok(Some(acc))
}

fn pow_enclosure(roots: &mut RootLadder<'_>, x: &Interval, cap: u64) -> Result<TowerValue> {
    let lo_exp = round_down(&x.lo, roots.prec);
    let hi_exp = round_up(&x.hi, roots.prec);
    let Some(lo) = pow_dyadic(roots, &lo_exp, false, cap)? else {
        return Ok(TowerValue::OverCap);
    };
    // An upper end past the cap is harmless; keep a huge sentinel.
    let hi = match pow_dyadic(roots, &hi_exp, true, cap.saturating_add(64))? {
        Some(v) => v,
        None => Rational::from_integer(BigInt::one() << cap.saturating_add(64)),
    };
    Ok(TowerValue::Bounds(Interval::new(lo, hi)))
}

/// `true` when towers of `C` grow without bound, i.e. `C > e^(1/e)`.
fn tower_diverges(c: &Rational) -> Result<bool> {
    if c >= &Rational::from_i64(2) {
        return Ok(true);
    }
    let mut bits = 32;
    loop {
        // C > e^(1/e)  <=>  e * ln C > 1
        let ln_c = ln_bounds(c, bits)?;
        let e = e_bounds(bits);
        let lo = &ln_c.lo * &e.lo;
        let hi = &ln_c.hi * &e.hi;
        if lo > Rational::one() {
            return Ok(true);
        }
        if hi <= Rational::one() {
            return Ok(false);
        }
        bits *= 2;
        if bits > MAX_PRECISION {
            return Err(Error::Undecided);
        }
    }
}

/// Largest `l >= 0` with `C↑↑l <= n`.
///
/// Requires `C > e^(1/e)`; below that threshold towers converge and the
/// super-logarithm of any `n >= 2` would be unbounded.
pub fn slog(c: &Rational, n: &BigUint) -> Result<u64> {
    check_base(c)?;
    if n < &BigUint::from(2u32) {
        return Err(Error::InvalidArgument(format!("slog argument {n} must be >= 2")));
    }
    if !tower_diverges(c)? {
        return Err(Error::InvalidArgument(format!(
            "towers of base {c} converge; slog is unbounded"
        )));
    }
    let cap = n.bits() + 2;
    let target = Rational::from(n.clone());
    if c.is_integer() {
        // Exact towers: step level by level without recomputation.
        let mut roots = RootLadder::new(c, DEFAULT_PRECISION);
        let mut level = 0u64;
        let mut value = TowerValue::Exact(Rational::one());
        loop {
            let next = tower_step(&mut roots, &value, cap)?;
            if !next.le(&target).expect("exact comparison") {
                return Ok(level);
            }
            value = next;
            level += 1;
        }
    }
    // Walk the tower once per working precision, restarting only when a
    // comparison cannot be decided at the current one.
    let mut prec = DEFAULT_PRECISION;
    'refine: loop {
        let mut roots = RootLadder::new(c, prec);
        let mut level = 0u64;
        let mut value = TowerValue::Exact(Rational::one());
        loop {
            let next = tower_step(&mut roots, &value, cap)?;
            match next.le(&target) {
                Some(true) => {
                    value = next;
                    level += 1;
                }
                Some(false) => return Ok(level),
                None => {
                    prec *= 2;
                    if prec > MAX_PRECISION {
                        return Err(Error::Undecided);
                    }
                    continue 'refine;
                }
            }
        }
    }
}
