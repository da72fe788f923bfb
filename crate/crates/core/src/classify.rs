//! Decides whether each parity subsequence collapses to a single product
//! `prod_j a_j^(n^j)`, which is exactly when `omega(s_n)` stays bounded.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::sequence::{merged_even_terms, prec_compare_rational, SuperpowerSum, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn matches(self, n: u64) -> bool {
        match self {
            Parity::Even => n.is_multiple_of(2),
            Parity::Odd => n % 2 == 1,
        }
    }
}

/// Shape of one parity subsequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParityClass {
    /// `s_n = prod_j coefficients[j]^(n^j)` on this parity.
    Degenerate { coefficients: Vec<Rational> },
    /// At least two merged terms survive; the two largest are kept.
    NonDegenerate { evidence: [Term; 2] },
    IdenticallyZero,
}

impl ParityClass {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, ParityClass::Degenerate { .. })
    }

    pub fn coefficients(&self) -> Option<&[Rational]> {
        match self {
            ParityClass::Degenerate { coefficients } => Some(coefficients),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    OmegaBounded,
    OmegaUnbounded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub even: ParityClass,
    pub odd: ParityClass,
    pub verdict: Verdict,
}

/// Even-index classification from the merged term list.
pub fn classify_even(s: &SuperpowerSum) -> ParityClass {
    let mut merged = merged_even_terms(s);
    match merged.len() {
        0 => ParityClass::IdenticallyZero,
        1 => {
            let t = merged.pop().expect("one term");
            let mut coefficients = vec![t.coeff];
            coefficients.extend(t.bases);
            ParityClass::Degenerate { coefficients }
        }
        _ => {
            merged.sort_by(|a, b| prec_compare_rational(&a.bases, &b.bases).expect("same length"));
            let top = merged.pop().expect("two terms");
            let second = merged.pop().expect("two terms");
            ParityClass::NonDegenerate { evidence: [second, top] }
        }
    }
}

/// Rewrites `prod_j y_j^(m^j)` at `m = N + 1` as `prod_h b_h^(N^h)`,
/// expanding `(N + 1)^j` binomially.
fn undo_shift(y: &[Rational]) -> Vec<Rational> {
    (0..y.len())
        .map(|h| {
            y.iter()
                .enumerate()
                .skip(h)
                .fold(Rational::one(), |b, (j, yj)| &b * &yj.pow_u32(binomial(j, h)))
        })
        .collect()
}

fn binomial(n: usize, k: usize) -> u32 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64) as u32
}

/// Classifies both parities and derives the verdict.
pub fn classify(s: &SuperpowerSum) -> ClassificationResult {
    let even = classify_even(s);
    let odd = match classify_even(&s.odd_transform()) {
        ParityClass::Degenerate { coefficients } => ParityClass::Degenerate {
            coefficients: undo_shift(&coefficients),
        },
        other => other,
    };
    let verdict = if even.is_degenerate() && odd.is_degenerate() {
        Verdict::OmegaBounded
    } else {
        Verdict::OmegaUnbounded
    };
    ClassificationResult { even, odd, verdict }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorollaryReason {
    /// All `|x_i|` agree and the signed coefficient sum is nonzero.
    EqualMagnitudes,
    /// Two bases differ in absolute value.
    DistinctMagnitudes,
    /// All `|x_i|` agree but the odd-index terms cancel to zero.
    OddTermsVanish,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorollaryVerdict {
    Bounded,
    Unbounded,
}

/// Classifies `sum_i c_i x_i^n` with positive `c_i` and nonzero `x_i`.
pub fn corollary_classify(c: &[Rational], x: &[Rational]) -> Result<(CorollaryVerdict, CorollaryReason)> {
    if c.is_empty() || c.len() != x.len() {
        return Err(Error::LengthMismatch(c.len(), x.len()));
    }
    if c.iter().any(|ci| !ci.is_positive()) {
        return Err(Error::InvalidArgument("coefficients must be positive".into()));
    }
    if x.iter().any(Rational::is_zero) {
        return Err(Error::InvalidArgument("bases must be nonzero".into()));
    }
    let magnitude = x[0].abs();
    if x.iter().any(|xi| xi.abs() != magnitude) {
        return Ok((CorollaryVerdict::Unbounded, CorollaryReason::DistinctMagnitudes));
    }
    let signed: Rational = c
        .iter()
        .zip(x)
        .map(|(ci, xi)| if xi.is_negative() { -ci.clone() } else { ci.clone() })
        .sum();
    if signed.is_zero() {
        Ok((CorollaryVerdict::Unbounded, CorollaryReason::OddTermsVanish))
    } else {
        Ok((CorollaryVerdict::Bounded, CorollaryReason::EqualMagnitudes))
    }
}

/// Outcome of comparing a claimed product form against exact values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub ok: bool,
    /// First index of the claimed parity where the product form fails.
    pub counterexample: Option<u64>,
}

/// Product `prod_j a_j^(n^j)`.
pub fn product_form(coefficients: &[Rational], n: u64) -> Result<Rational> {
    let mut v = Rational::one();
    for (j, a) in coefficients.iter().enumerate() {
        let e = n
            .checked_pow(j as u32)
            .and_then(|e| u32::try_from(e).ok())
            .ok_or_else(|| Error::InvalidArgument("exponent too large".into()))?;
        v = &v * &a.pow_u32(e);
    }
    Ok(v)
}

/// Checks `s_n = prod_j a_j^(n^j)` for every `n <= n_check` of the parity.
pub fn cross_validate_degenerate(
    s: &SuperpowerSum,
    parity: Parity,
    coefficients: &[Rational],
    n_check: u64,
) -> Result<CrossValidation> {
    if coefficients.len() != s.ell() + 1 {
        return Err(Error::LengthMismatch(coefficients.len(), s.ell() + 1));
    }
    for n in (1..=n_check).filter(|&n| parity.matches(n)) {
        if s.eval(n)? != product_form(coefficients, n)? {
            return Ok(CrossValidation { ok: false, counterexample: Some(n) });
        }
    }
    Ok(CrossValidation { ok: true, counterexample: None })
}
