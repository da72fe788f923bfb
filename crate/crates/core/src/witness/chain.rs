use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::bounds::SigmaAt;
use super::params::WitnessParams;
use super::{WitnessCertificate, WitnessConfig};
use crate::error::{Error, Result};
use crate::factor::{factor, sieve, Factorization};
use crate::sequence::NormalizedInstance;
use crate::serde_util::{decimal, decimal_map};

/// Valuations above this are not searched for by residues.
const MAX_RESIDUE_VALUATION: u64 = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLink {
    pub kappa: usize,
    #[serde(with = "decimal")]
    pub r: BigUint,
    /// Primes certified to divide `sigma_r`, with their valuations.
    #[serde(with = "decimal_map")]
    pub known_primes: BTreeMap<BigUint, u64>,
    /// Step to the next link: `r_next = 2 * beta_kappa + r`.
    #[serde(with = "decimal")]
    pub beta_kappa: BigUint,
    /// `known_primes` is the full prime set of `sigma_r`.
    pub primes_complete: bool,
    /// Some earlier step used an incomplete prime set, so the containment
    /// argument no longer covers this link.
    pub partial: bool,
}

/// Factors `sigma_(r_0)` and opens the chain.
pub fn start_chain(
    inst: &NormalizedInstance,
    params: WitnessParams,
    cfg: &WitnessConfig,
) -> Result<WitnessCertificate> {
    let r0 = 2 * params.n0;
    let sigma = params.sigma_form().eval_exact(r0)?;
    let known = match factor(&sigma, cfg.budget)? {
        Factorization::Complete(f) => f.factors().clone(),
        Factorization::Partial(p) => {
            return Err(Error::FactorizationIncomplete { cofactor: p.cofactor().to_string() })
        }
    };
    let link = ChainLink {
        kappa: 0,
        r: BigUint::from(r0),
        beta_kappa: params.beta_kappa(&known),
        known_primes: known,
        primes_complete: true,
        partial: false,
    };
    Ok(WitnessCertificate { instance: inst.clone(), params, chain: vec![link], checks: Vec::new() })
}

/// Exact valuation of `sigma_n` at `q`, doubling the residue precision.
pub(crate) fn residue_valuation(sigma: &SigmaAt<'_>, q: &BigUint) -> Result<u64> {
    let mut cap = 8;
    loop {
        let v = sigma.valuation(q, cap)?;
        if v < cap {
            return Ok(v);
        }
        if cap >= MAX_RESIDUE_VALUATION {
            return Err(Error::InvalidArgument(format!("valuation at {q} exceeds {cap}")));
        }
        cap *= 2;
    }
}

/// Appends link `kappa + 1`.
///
/// Primes of the previous link and of the base set are carried over with
/// valuations recomputed from residues; small primes up to the configured
/// bound are searched for as well. The result is never known to be complete.
pub fn extend_chain(
    mut cert: WitnessCertificate,
    allow_partial: bool,
    cfg: &WitnessConfig,
) -> Result<WitnessCertificate> {
    let last = cert.chain.last().expect("chain has a first link").clone();
    if !last.primes_complete && !allow_partial {
        return Err(Error::PartialChain(last.kappa));
    }
    let params = &cert.params;
    let r = (&last.beta_kappa << 1) + &last.r;
    let form = params.sigma_form();
    let sigma = form.at(&r)?;

    let mut known = BTreeMap::new();
    let carried = last.known_primes.keys().chain(params.prime_list());
    for q in carried {
        if known.contains_key(q) {
            continue;
        }
        let v = residue_valuation(&sigma, q)?;
        if v > 0 {
            known.insert(q.clone(), v);
        }
    }
    for q in sieve(cfg.discovery_bound.saturating_add(1)) {
        let q = BigUint::from(q);
        if known.contains_key(&q) || !sigma.divisible(&q, 1)? {
            continue;
        }
        let v = residue_valuation(&sigma, &q)?;
        known.insert(q, v);
    }

    let link = ChainLink {
        kappa: last.kappa + 1,
        beta_kappa: params.beta_kappa(&known),
        r,
        known_primes: known,
        primes_complete: false,
        partial: last.partial || !last.primes_complete,
    };
    if link.kappa == 1 {
        cert.params.c = Some(cert.params.tower_base(&link.r));
    }
    cert.chain.push(link);
    cert.checks.clear();
    Ok(cert)
}
