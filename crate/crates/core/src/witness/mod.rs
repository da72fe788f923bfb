//! Explicit witnesses for unbounded `omega`: even indices `r_0 < r_1 < ...`
//! whose reduced values `sigma_r` pick up at least one new prime per step,
//! while `r_kappa` stays below a power tower of height `kappa`.

mod bounds;
mod chain;
mod params;
mod verify;

pub use bounds::{LogBounds, Magnitude, SigmaAt, SigmaForm};
pub use chain::{extend_chain, start_chain, ChainLink};
pub use params::{derive_params, derive_params_with, PrimeExponents, WitnessParams};
pub use verify::{omega_lower_bound, verify_chain, CheckResult, LinkBound};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::classify::Parity;
use crate::error::{Error, Result};
use crate::factor::{Budget, FactoredInteger};
use crate::sequence::{normalize_even, NormalizedInstance, SuperpowerSum, DEFAULT_BIT_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WitnessConfig {
    /// Largest number of terms for which all subsums are analysed.
    pub max_k: usize,
    pub bit_cap: u64,
    /// Factoring budget for `sigma_(r_0)`.
    pub budget: Budget,
    /// New primes up to this bound are searched for at each extension.
    pub discovery_bound: u32,
    /// Longest exact scan used to tighten thresholds.
    pub scan_limit: u64,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig {
            max_k: 12,
            bit_cap: DEFAULT_BIT_CAP,
            budget: Budget::DEFAULT,
            discovery_bound: 1000,
            scan_limit: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub instance: NormalizedInstance,
    pub params: WitnessParams,
    pub chain: Vec<ChainLink>,
    #[serde(default)]
    pub checks: Vec<CheckResult>,
}

impl WitnessCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn all_passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }
}

/// `sigma_n mod m` for an instance with derived parameters.
pub fn eval_sigma_mod(params: &WitnessParams, n: &BigUint, m: &FactoredInteger) -> Result<BigUint> {
    params.sigma_form().residue(n, m)
}

/// Picks the parity class a witness chain can be built on: the even indices
/// when at least two merged terms survive there, otherwise the odd indices via
/// the transformed instance `t` with `t_(2n) = s_(2n-1)`.
pub fn witness_instance(s: &SuperpowerSum) -> Result<(Parity, NormalizedInstance)> {
    let usable = |sum: &SuperpowerSum| normalize_even(sum).normalized().filter(|inst| inst.k() >= 2);
    if let Some(inst) = usable(s) {
        return Ok((Parity::Even, inst));
    }
    usable(&s.odd_transform())
        .map(|inst| (Parity::Odd, inst))
        .ok_or(Error::DegenerateInstance)
}

/// Derives parameters, builds links `0..=kappa_max` and runs every check.
pub fn build_certificate(
    inst: &NormalizedInstance,
    kappa_max: usize,
    allow_partial: bool,
    cfg: &WitnessConfig,
) -> Result<WitnessCertificate> {
    let params = derive_params_with(inst, cfg)?;
    let mut cert = start_chain(inst, params, cfg)?;
    for _ in 0..kappa_max {
        cert = extend_chain(cert, allow_partial, cfg)?;
    }
    if cert.chain.len() >= 2 {
        cert.checks = verify_chain(&cert, cfg)?;
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_choice() {
        let s = SuperpowerSum::from_rows(&[&[1, 2], &[1, 3]]).unwrap();
        assert_eq!(witness_instance(&s).unwrap().0, Parity::Even);
        // 2^n - (-2)^n + 3^n - (-3)^n vanishes on even n and is 2(2^n + 3^n) on odd n
        let s = SuperpowerSum::from_rows(&[&[1, 2], &[-1, -2], &[1, 3], &[-1, -3]]).unwrap();
        let (parity, inst) = witness_instance(&s).unwrap();
        assert_eq!(parity, Parity::Odd);
        assert_eq!(inst.k(), 2);
        let s = SuperpowerSum::from_rows(&[&[6, 4]]).unwrap();
        assert_eq!(witness_instance(&s), Err(Error::DegenerateInstance));
    }
}
