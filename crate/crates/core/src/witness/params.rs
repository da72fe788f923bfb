use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::bounds::{ratio_threshold, SigmaForm};
use super::WitnessConfig;
use crate::error::{Error, Result};
use crate::numeric::{multiplicity, ExponentPolynomial};
use crate::sequence::NormalizedInstance;
use crate::serde_util::{decimal, decimal_opt, decimal_vec};

/// Exponent data of one prime of the power bases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeExponents {
    #[serde(with = "decimal")]
    pub prime: BigUint,
    /// `e_p^(i)` per term, summing `n^j * v_p(x_{i,j})` over `j >= 1`.
    pub polys: Vec<ExponentPolynomial>,
    /// Term whose exponent is eventually smallest; ties go to the lower index.
    pub i_min: usize,
    /// From here on every other exponent strictly exceeds the minimal one.
    pub threshold: u64,
}

impl PrimeExponents {
    /// `e_p^(i) - e_p^(i_min)`.
    pub fn delta(&self, i: usize) -> ExponentPolynomial {
        self.polys[i].sub(&self.polys[self.i_min])
    }
}

/// Constants of the prime-accumulating construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessParams {
    pub primes: Vec<PrimeExponents>,
    /// Term coefficients `x_{i,0}`.
    #[serde(with = "decimal_vec")]
    pub coefficients: Vec<BigInt>,
    pub ell: usize,
    /// All exponent differences are positive from this index on.
    pub n_p: u64,
    /// Every nonempty subsum of terms is nonzero from this index on.
    pub n_subsums: u64,
    #[serde(with = "decimal")]
    pub a: BigUint,
    pub n0: u64,
    pub lambda: u64,
    pub alpha: u64,
    #[serde(with = "decimal")]
    pub beta: BigUint,
    #[serde(with = "decimal")]
    pub b: BigUint,
    /// Tower base, fixed once the second chain link exists.
    #[serde(with = "decimal_opt")]
    pub c: Option<BigUint>,
}

impl WitnessParams {
    pub fn k(&self) -> usize {
        self.coefficients.len()
    }

    pub fn prime_list(&self) -> impl Iterator<Item = &BigUint> {
        self.primes.iter().map(|p| &p.prime)
    }

    pub fn is_base_prime(&self, q: &BigUint) -> bool {
        self.primes.iter().any(|p| &p.prime == q)
    }

    pub fn sigma_form(&self) -> SigmaForm {
        SigmaForm::new(self)
    }

    /// `pi_n = prod_p p^(e_p^(i_min)(n))`, exact.
    pub fn pi_exact(&self, n: u64) -> Result<BigUint> {
        let mut out = BigUint::one();
        for pe in &self.primes {
            let e = pe.polys[pe.i_min].eval_i64(n as i64);
            let e = e
                .to_u32()
                .ok_or_else(|| Error::InvalidArgument("exponent too large".into()))?;
            out *= pe.prime.pow(e);
        }
        Ok(out)
    }

    /// `beta * prod_q q^v (q - 1)` over the given primes outside the base set.
    pub fn beta_kappa<'a, I>(&self, known: I) -> BigUint
    where
        I: IntoIterator<Item = (&'a BigUint, &'a u64)>,
    {
        known
            .into_iter()
            .filter(|(q, _)| !self.is_base_prime(q))
            .fold(self.beta.clone(), |acc, (q, &v)| acc * q.pow(v as u32) * (q - 1u32))
    }

    /// `max(B^ell * ell, r_1^ell + 1)`.
    pub fn tower_base(&self, r1: &BigUint) -> BigUint {
        let ell = self.ell as u32;
        let from_b = self.b.pow(ell) * ell;
        let from_r = r1.pow(ell) + 1u32;
        from_b.max(from_r)
    }
}

/// Values `x_{i,0} * prod_j x_{i,j}^(n^j)` of each term, or `None` past the cap.
pub(crate) fn term_values(inst: &NormalizedInstance, n: u64, cap: u64) -> Option<Vec<BigInt>> {
    let mut out = Vec::with_capacity(inst.k());
    for i in 0..inst.k() {
        let mut bits = inst.coeff(i).bits();
        for (j, x) in inst.powers(i).iter().enumerate() {
            bits = bits.saturating_add(n.checked_pow(j as u32 + 1)?.saturating_mul(x.bits()));
        }
        if bits > cap {
            return None;
        }
        let mut v = inst.coeff(i).clone();
        for (j, x) in inst.powers(i).iter().enumerate() {
            v *= x.pow(n.pow(j as u32 + 1) as u32);
        }
        out.push(v);
    }
    Some(out)
}

/// True when every nonempty subset of the values has a nonzero sum.
fn all_subsums_nonzero(values: &[BigInt]) -> bool {
    let k = values.len();
    let mut sums = vec![BigInt::zero(); 1 << k];
    for mask in 1usize..(1 << k) {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = &sums[mask & (mask - 1)] + &values[low];
        if sums[mask].is_zero() {
            return false;
        }
    }
    true
}

fn eventual_minimum(polys: &[ExponentPolynomial]) -> usize {
    let mut best = 0;
    for (i, p) in polys.iter().enumerate().skip(1) {
        if p.cmp_eventual(&polys[best]).is_lt() {
            best = i;
        }
    }
    best
}

fn too_large(what: &str) -> Error {
    Error::InvalidArgument(format!("{what} does not fit a machine word"))
}

/// Ceiling of the `e`-th root.
fn ceil_root(x: &BigUint, e: u32) -> BigUint {
    let r = x.nth_root(e);
    if &r.pow(e) < x {
        r + 1u32
    } else {
        r
    }
}

pub fn derive_params(inst: &NormalizedInstance) -> Result<WitnessParams> {
    derive_params_with(inst, &WitnessConfig::default())
}

pub fn derive_params_with(inst: &NormalizedInstance, cfg: &WitnessConfig) -> Result<WitnessParams> {
    let k = inst.k();
    if k < 2 {
        return Err(Error::DegenerateInstance);
    }
    if k > cfg.max_k {
        return Err(Error::SubsetBlowup {
            subsets: (1u64 << k.min(63)) - 1,
            max_k: cfg.max_k,
        });
    }
    let ell = inst.ell;
    let top = k - 1;

    let mut primes = Vec::new();
    for p in inst.base_primes()? {
        let polys: Vec<ExponentPolynomial> = (0..k).map(|i| inst.exponent_polynomial(i, &p)).collect();
        let i_min = eventual_minimum(&polys);
        let mut threshold = 1u64;
        for poly in polys.iter() {
            let diff = poly.sub(&polys[i_min]);
            if !diff.is_zero() {
                let t = diff.threshold_at_least(&BigInt::one())?;
                threshold = threshold.max(t.to_u64().ok_or_else(|| too_large("exponent threshold"))?);
            }
        }
        primes.push(PrimeExponents { prime: p, polys, i_min, threshold });
    }
    let n_p = primes.iter().map(|p| p.threshold).max().unwrap_or(1);

    // Subsums: the largest term of any subset outweighs the rest once each
    // smaller term is below 1/(k-1) of it.
    let mut n_cert = 1u64;
    for m in 1..k {
        for i in 0..m {
            n_cert = n_cert.max(ratio_threshold(inst, i, m, (k - 1) as u64)?);
        }
    }
    let mut n_subsums = n_cert;
    if n_cert <= cfg.scan_limit {
        for n in (1..n_cert).rev() {
            match term_values(inst, n, cfg.bit_cap) {
                Some(values) if all_subsums_nonzero(&values) => n_subsums = n,
                _ => break,
            }
        }
    }

    let coefficients: Vec<BigInt> = (0..k).map(|i| inst.coeff(i).clone()).collect();
    let mut params = WitnessParams {
        primes,
        coefficients,
        ell,
        n_p,
        n_subsums,
        a: BigUint::zero(),
        n0: 0,
        lambda: 0,
        alpha: 0,
        beta: BigUint::zero(),
        b: BigUint::zero(),
        c: None,
    };

    // Monotonicity of |sigma_{2m}| is automatic once the smaller terms sum
    // to under a third of the top one and the top exponent differences are
    // nondecreasing with at least one strictly increasing.
    let mut rho = 1u64;
    for i in 0..top {
        rho = rho.max(ratio_threshold(inst, i, top, 3 * (k - 1) as u64)?);
    }
    let mut settle = rho.div_ceil(2);
    let mut strict: Option<u64> = None;
    for pe in &params.primes {
        let delta = pe.delta(top);
        // delta(2m) as a polynomial in m, and its forward difference
        let at_even = ExponentPolynomial::new(
            delta.coeffs().iter().enumerate().map(|(j, c)| c << j).collect(),
        );
        let step = at_even.shifted(1).sub(&at_even);
        let t0 = step.threshold_at_least(&BigInt::zero())?;
        settle = settle.max(t0.to_u64().ok_or_else(|| too_large("growth threshold"))?);
        if delta.degree().is_some_and(|d| d >= 1) && delta.leading().is_some_and(|c| c.is_positive()) {
            let t1 = step.threshold_at_least(&BigInt::one())?;
            let t1 = t1.to_u64().ok_or_else(|| too_large("growth threshold"))?;
            strict = Some(strict.map_or(t1, |s| s.min(t1)));
        }
    }
    let strict = strict.ok_or_else(|| {
        Error::InvalidArgument("no prime exponent of the dominant term grows".into())
    })?;
    settle = settle.max(strict);

    let start = n_p.max(n_subsums).max(1);
    let sigma = params.sigma_form();
    let mut n0 = start;
    if settle > start {
        if settle - start > cfg.scan_limit {
            return Err(Error::InvalidArgument(format!(
                "monotonicity scan from {start} to {settle} exceeds the scan limit"
            )));
        }
        for m in (start..settle).rev() {
            let lo = sigma.eval_exact(2 * m)?;
            let hi = sigma.eval_exact(2 * m + 2)?;
            if hi.magnitude() <= lo.magnitude() {
                n0 = m + 1;
                break;
            }
        }
    }
    params.n0 = n0;

    let r0 = 2 * n0;
    let sigma_r0 = sigma.eval_exact(r0)?;
    let max_val = params
        .primes
        .iter()
        .map(|pe| multiplicity(&pe.prime, sigma_r0.magnitude()))
        .max()
        .unwrap_or(0);
    let mut max_delta = BigInt::zero();
    for pe in &params.primes {
        for i in 0..k {
            max_delta = max_delta.max(pe.delta(i).eval_i64(r0 as i64));
        }
    }
    params.lambda = max_val + max_delta.to_u64().ok_or_else(|| too_large("lambda"))?;

    let max_coeff = params.coefficients.iter().map(|c| c.magnitude().clone()).max().expect("k >= 2");
    let lambda = u32::try_from(params.lambda).map_err(|_| too_large("lambda"))?;
    let alpha = params
        .prime_list()
        .fold(BigUint::from(k) * max_coeff, |acc, p| acc * p.pow(lambda));
    params.alpha = alpha.to_u64().ok_or_else(|| too_large("alpha"))?;

    let beta_bits: f64 = params
        .prime_list()
        .map(|p| (params.alpha - 1) as f64 * p.bits() as f64)
        .sum();
    if beta_bits > cfg.bit_cap as f64 {
        return Err(Error::BitCapExceeded { needed: beta_bits as u64, cap: cfg.bit_cap });
    }
    params.beta = params
        .prime_list()
        .fold(BigUint::one(), |acc, p| acc * p.pow((params.alpha - 1) as u32) * (p - 1u32));

    let dominant = inst
        .powers(top)
        .iter()
        .fold(inst.coeff(top).magnitude().clone(), |acc, x| acc * x.magnitude());
    params.a = &dominant * &dominant + 1u32;

    let e = r0.checked_pow(ell as u32).ok_or_else(|| too_large("r_0^ell"))?;
    let needed = e.saturating_mul(params.a.bits());
    if needed > cfg.bit_cap {
        return Err(Error::BitCapExceeded { needed, cap: cfg.bit_cap });
    }
    let e = u32::try_from(e).map_err(|_| too_large("r_0^ell"))?;
    let target = BigUint::from(r0) + (&params.beta << 1) * params.a.pow(e);
    params.b = ceil_root(&target, e).max(&params.a + 1u32);
    Ok(params)
}
