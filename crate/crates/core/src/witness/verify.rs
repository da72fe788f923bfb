use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::{LogBounds, Magnitude, SigmaForm, PRECISIONS};
use super::chain::ChainLink;
use super::params::{derive_params_with, WitnessParams};
use super::{WitnessCertificate, WitnessConfig};
use crate::error::{Error, Result};
use crate::numeric::slog;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub link: usize,
    pub passed: bool,
    pub moduli: Vec<String>,
    pub detail: String,
}

type Outcome = Result<(bool, String)>;

fn record(name: &str, link: usize, moduli: Vec<String>, outcome: Outcome) -> CheckResult {
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CheckResult { name: name.to_string(), link, passed, moduli, detail }
}

/// `q^e (q - 1)` written compactly.
fn totient_modulus(q: &BigUint, e: u64) -> (BigUint, String) {
    (q.pow(e as u32) * (q - 1u32), format!("{q}^{e}*{}", q - 1u32))
}

fn fail(detail: String) -> Outcome {
    Ok((false, detail))
}

/// Runs every check on a chain of at least two links.
///
/// Each check is recorded rather than propagated, so a forged certificate
/// yields named failures instead of an error.
pub fn verify_chain(cert: &WitnessCertificate, cfg: &WitnessConfig) -> Result<Vec<CheckResult>> {
    if cert.chain.len() < 2 {
        return Err(Error::InvalidArgument("verification needs at least two chain links".into()));
    }
    let params = &cert.params;
    let sigma = params.sigma_form();
    let mut out = vec![
        record("params", 0, Vec::new(), check_params(cert, cfg)),
        record("lemma1", 0, Vec::new(), check_growing_exponent(params)),
    ];
    let per_link: Vec<Vec<CheckResult>> = (0..cert.chain.len())
        .into_par_iter()
        .map(|kappa| link_checks(cert, &sigma, kappa))
        .collect();
    out.extend(per_link.into_iter().flatten());
    Ok(out)
}

fn link_checks(cert: &WitnessCertificate, sigma: &SigmaForm, kappa: usize) -> Vec<CheckResult> {
    let params = &cert.params;
    let link = &cert.chain[kappa];
    let next = cert.chain.get(kappa + 1);
    let mut out = Vec::new();

    if let Some(next) = next {
        let (moduli, names): (Vec<_>, Vec<_>) =
            params.prime_list().map(|q| totient_modulus(q, params.alpha - 1)).unzip();
        let outcome = check_step(params, link, next).and_then(|(ok, detail)| {
            if !ok {
                return fail(detail);
            }
            check_congruences(params, link, next, &moduli)
        });
        out.push(record("congP", kappa, names, outcome));

        let (moduli, names): (Vec<_>, Vec<_>) =
            outside_base(params, link).map(|(q, v)| totient_modulus(q, v)).unzip();
        let outcome = check_congruences(params, link, next, &moduli);
        out.push(record("congQ", kappa, names, outcome));
    }

    let moduli = link.known_primes.iter().map(|(q, v)| format!("{q}^{}", v + 1)).collect();
    out.push(record("lemma2", kappa, moduli, check_membership(sigma, link, next)));

    let (moduli, outcome) = check_bounded_valuation(params, sigma, link);
    out.push(record("lemma3", kappa, moduli, outcome));

    if let Some(next) = next {
        let moduli = outside_base(params, link).map(|(q, v)| format!("{q}^{}", v + 1)).collect();
        out.push(record("lemma4", kappa, moduli, check_valuation_transfer(params, sigma, link, next)));
    }

    if next.is_some() || kappa >= 1 {
        out.push(record("growth", kappa, Vec::new(), check_growth(params, sigma, link, next)));
    }
    if kappa >= 1 {
        out.push(record("slog", kappa, Vec::new(), check_slog(params, link, next)));
    }
    out
}

fn outside_base<'a>(params: &'a WitnessParams, link: &'a ChainLink) -> impl Iterator<Item = (&'a BigUint, u64)> {
    link.known_primes
        .iter()
        .filter(|(q, _)| !params.is_base_prime(q))
        .map(|(q, &v)| (q, v))
}

fn check_params(cert: &WitnessCertificate, cfg: &WitnessConfig) -> Outcome {
    if !cert.instance.is_canonical() {
        return fail("instance is not in canonical form".into());
    }
    let mut fresh = derive_params_with(&cert.instance, cfg)?;
    fresh.c = Some(fresh.tower_base(&cert.chain[1].r));
    if fresh != cert.params {
        return fail("stored constants differ from a fresh derivation".into());
    }
    Ok((true, format!("n0 = {}, alpha = {}, lambda = {}", fresh.n0, fresh.alpha, fresh.lambda)))
}

fn check_growing_exponent(params: &WitnessParams) -> Outcome {
    let top = params.k() - 1;
    for pe in &params.primes {
        let d = pe.delta(top);
        if d.degree().is_some_and(|deg| deg >= 1) && d.leading().is_some_and(Signed::is_positive) {
            return Ok((true, format!("exponent of {} in the last term grows", pe.prime)));
        }
    }
    fail("no exponent difference of the last term is unbounded".into())
}

/// Link arithmetic: `r_next = 2 beta_kappa + r`, evenness and `r = r_0 mod beta`.
fn check_step(params: &WitnessParams, link: &ChainLink, next: &ChainLink) -> Outcome {
    let r0 = BigUint::from(2 * params.n0);
    let beta_kappa = params.beta_kappa(&link.known_primes);
    if beta_kappa != link.beta_kappa {
        return fail("stored step does not match the prime data".into());
    }
    if next.r != (&beta_kappa << 1) + &link.r {
        return fail("next index is not 2 * step + r".into());
    }
    for r in [&link.r, &next.r] {
        if r.bit(0) || r < &r0 {
            return fail(format!("index {r} is odd or below r_0"));
        }
        if (r - &r0) % &params.beta != BigUint::ZERO {
            return fail(format!("index {r} is not congruent to r_0 modulo beta"));
        }
    }
    Ok((true, String::new()))
}

/// `de_p^(i)(r_next) = de_p^(i)(r) mod m` for every prime, term and modulus.
fn check_congruences(params: &WitnessParams, link: &ChainLink, next: &ChainLink, moduli: &[BigUint]) -> Outcome {
    for m in moduli {
        for pe in &params.primes {
            for i in 0..params.k() {
                let d = pe.delta(i);
                if d.eval_mod(&link.r, m) != d.eval_mod(&next.r, m) {
                    return fail(format!("exponent of {} in term {i} differs modulo {m}", pe.prime));
                }
            }
        }
    }
    Ok((true, format!("{} moduli", moduli.len())))
}

/// Each known prime divides `sigma_r` to exactly the recorded power, and
/// divides the next index's value too.
fn check_membership(sigma: &SigmaForm, link: &ChainLink, next: Option<&ChainLink>) -> Outcome {
    if link.known_primes.is_empty() {
        return fail("no known prime".into());
    }
    let here = sigma.at(&link.r)?;
    let there = next.map(|l| sigma.at(&l.r)).transpose()?;
    for (q, &v) in &link.known_primes {
        if v == 0 {
            return fail(format!("{q} recorded with valuation 0"));
        }
        if !here.divisible(q, v)? || here.divisible(q, v + 1)? {
            return fail(format!("valuation of {q} is not {v}"));
        }
        if let Some(there) = &there {
            if !there.divisible(q, 1)? {
                return fail(format!("{q} does not divide the next value"));
            }
        }
    }
    Ok((true, format!("{} primes", link.known_primes.len())))
}

/// `q^alpha` does not divide `sigma_r` for base primes `q`, shown by the
/// first nonzero residue modulo `q^a` for `a = 1, 2, 4, ..., alpha`.
fn check_bounded_valuation(params: &WitnessParams, sigma: &SigmaForm, link: &ChainLink) -> (Vec<String>, Outcome) {
    let mut moduli = Vec::new();
    let outcome = (|| {
        let here = sigma.at(&link.r)?;
        for q in params.prime_list() {
            let mut a = 1;
            loop {
                if !here.divisible(q, a)? {
                    moduli.push(format!("{q}^{a}"));
                    break;
                }
                if a == params.alpha {
                    moduli.push(format!("{q}^{a}"));
                    return fail(format!("{q}^alpha divides the value"));
                }
                a = (2 * a).min(params.alpha);
            }
        }
        Ok((true, String::new()))
    })();
    (moduli, outcome)
}

fn check_valuation_transfer(params: &WitnessParams, sigma: &SigmaForm, link: &ChainLink, next: &ChainLink) -> Outcome {
    let here = sigma.at(&link.r)?;
    let there = sigma.at(&next.r)?;
    for (q, v) in outside_base(params, link) {
        let a = here.residue_prime_power(q, v + 1)?;
        let b = there.residue_prime_power(q, v + 1)?;
        if a != b {
            return fail(format!("residues modulo {q}^{} differ", v + 1));
        }
    }
    Ok((true, String::new()))
}

fn check_growth(params: &WitnessParams, sigma: &SigmaForm, link: &ChainLink, next: Option<&ChainLink>) -> Outcome {
    if let Some(next) = next {
        let mut decided = None;
        for bits in PRECISIONS {
            let here = sigma.magnitude(&link.r, bits)?;
            let there = sigma.magnitude(&next.r, bits)?;
            decided = there.compare(&here, bits)?;
            if decided.is_some() {
                break;
            }
        }
        match decided {
            Some(Ordering::Greater) => {}
            Some(_) => return fail("value does not grow".into()),
            None => return fail("growth not decided by the enclosures".into()),
        }
    }
    if link.kappa >= 1 {
        // sigma_r^2 < A^(r^ell)
        let power = BigInt::from(link.r.pow(params.ell as u32));
        let a = Rational::from_integer(BigInt::from(params.a.clone()));
        let mut below = false;
        for bits in PRECISIONS {
            let lhs = sigma.magnitude(&link.r, bits)?.log2(bits)?.scale(&BigInt::from(2));
            let rhs = LogBounds::of(&a, bits)?.scale(&power);
            if lhs.hi < rhs.lo {
                below = true;
                break;
            }
            if lhs.lo >= rhs.hi {
                break;
            }
        }
        if !below {
            return fail("square of the value is not below A^(r^ell)".into());
        }
    }
    let detail = match sigma.magnitude(&link.r, 64)? {
        Magnitude::Exact(v) => format!("|sigma| = {v}"),
        Magnitude::Log2(l) => {
            let (lo, hi) = (l.floor_lo().to_string(), l.ceil_hi().to_string());
            if hi.len() <= 40 {
                format!("log2 |sigma| in [{lo}, {hi}]")
            } else {
                format!("log2 |sigma| has {} digits", hi.len())
            }
        }
    };
    Ok((true, detail))
}

fn check_slog(params: &WitnessParams, link: &ChainLink, next: Option<&ChainLink>) -> Outcome {
    let Some(c) = &params.c else {
        return fail("tower base is not set".into());
    };
    let height = slog(&Rational::from_integer(BigInt::from(c.clone())), &link.r)?;
    if height as usize >= link.kappa {
        return fail(format!("slog of the index is {height}"));
    }
    if let Some(next) = next {
        // r_next < 2^bits(r_next) <= 2^(r^ell (bits(B) - 1)) <= B^(r^ell)
        let budget = link.r.pow(params.ell as u32) * (params.b.bits() - 1);
        if BigUint::from(next.r.bits()) > budget {
            return fail("next index is not below B^(r^ell)".into());
        }
    }
    Ok((true, format!("slog = {height}")))
}

/// Lower bounds on the number of distinct primes of `sigma_r` per link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkBound {
    pub kappa: usize,
    /// `kappa`, from the strictly growing prime sets; absent for partial links.
    pub certified: Option<u64>,
    /// Primes individually shown to divide `sigma_r`.
    pub known: u64,
}

pub fn omega_lower_bound(cert: &WitnessCertificate) -> Vec<LinkBound> {
    cert.chain
        .iter()
        .map(|l| LinkBound {
            kappa: l.kappa,
            certified: (!l.partial).then_some(l.kappa as u64),
            known: l.known_primes.len() as u64,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{normalize_even, SuperpowerSum};
    use crate::witness::build_certificate;

    fn cert(rows: &[&[i64]], kappa: usize) -> WitnessCertificate {
        let s = SuperpowerSum::from_rows(rows).unwrap();
        let inst = normalize_even(&s).normalized().unwrap();
        build_certificate(&inst, kappa, true, &WitnessConfig::default()).unwrap()
    }

    #[test]
    fn two_three_passes() {
        let c = cert(&[&[1, 2], &[1, 3]], 1);
        for check in &c.checks {
            assert!(check.passed, "{check:?}");
        }
        let names: Vec<&str> = c.checks.iter().map(|c| c.name.as_str()).collect();
        for n in ["congP", "congQ", "lemma1", "lemma2", "lemma3", "lemma4", "growth", "slog"] {
            assert!(names.contains(&n), "{n} missing");
        }
        let bounds = omega_lower_bound(&c);
        assert_eq!(bounds[0], LinkBound { kappa: 0, certified: Some(0), known: 1 });
        assert_eq!(bounds[1].certified, Some(1));
    }

    #[test]
    fn shifted_index_fails() {
        let mut c = cert(&[&[1, 2], &[1, 3]], 1);
        c.chain[1].r += 2u32;
        let checks = verify_chain(&c, &WitnessConfig::default()).unwrap();
        let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        assert!(failed.contains(&"congP"), "{failed:?}");
    }

    #[test]
    fn longer_partial_chain() {
        let c = cert(&[&[1, 2], &[1, 3]], 2);
        assert!(c.chain[2].partial);
        for check in &c.checks {
            assert!(check.passed, "{check:?}");
        }
        assert_eq!(omega_lower_bound(&c)[2].certified, None);
    }

    #[test]
    fn other_instances() {
        for rows in [&[&[1i64, 2][..], &[-1, 5]][..], &[&[7, 2], &[1, 3]], &[&[2, 2], &[-1, 3], &[1, 4]]] {
            let c = cert(rows, 1);
            for check in &c.checks {
                assert!(check.passed, "{rows:?} {check:?}");
            }
        }
    }
}
