//! Runs the eight acceptance criteria and prints one PASS/FAIL line each.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use superpowers::classify::{
    classify, corollary_classify, cross_validate_degenerate, CorollaryVerdict, Parity, ParityClass, Verdict,
};
use superpowers::factor::{factor, omega_with_budget, Budget, OmegaValue};
use superpowers::numeric::{slog, tetrate, TowerValue};
use superpowers::residue::{eval_integer_sum_mod, eval_sum_mod, factored_modulus};
use superpowers::sequence::{normalize_even, SuperpowerSum, Term};
use superpowers::witness::{build_certificate, verify_chain, WitnessConfig};
use superpowers::zsigmondy::{is_exception, omega_divisor_bound_check, primitive_prime_divisors, ZsigmondyQuery};
use superpowers::Rational;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn nonzero(rng: &mut ChaCha8Rng, bound: i64) -> i64 {
    loop {
        let v = rng.random_range(-bound..=bound);
        if v != 0 {
            return v;
        }
    }
}

fn random_integer_sum(rng: &mut ChaCha8Rng, allow_zero_bases: bool) -> SuperpowerSum {
    let k = rng.random_range(1..=4);
    let ell = rng.random_range(1..=3);
    let terms = (0..k)
        .map(|_| {
            let bases: Vec<i64> = (0..ell)
                .map(|_| if allow_zero_bases { rng.random_range(-9..=9) } else { nonzero(rng, 9) })
                .collect();
            Term::from_i64(nonzero(rng, 9), &bases)
        })
        .collect();
    SuperpowerSum::new(ell, terms).unwrap()
}

fn mod_of(x: &BigInt, m: &BigUint) -> BigUint {
    let m = BigInt::from(m.clone());
    x.mod_floor(&m).to_biguint().unwrap()
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut compared = 0;
    for case in 0..200 {
        let s = random_integer_sum(&mut rng, true);
        let m = BigUint::from(rng.random_range(1u64..1_000_000));
        let fm = factored_modulus(&m).map_err(|e| e.to_string())?;
        let inst = normalize_even(&s).normalized();
        for _ in 0..4 {
            let n = rng.random_range(1u64..=30);
            let exact = s.eval(n).unwrap().to_integer().unwrap();
            let got = eval_integer_sum_mod(&s, &BigUint::from(n), &fm).unwrap();
            ensure(got == mod_of(&exact, &m), || format!("case {case}: s_{n} mod {m}"))?;
            if let Some(inst) = &inst {
                let exact = inst.eval(n).unwrap();
                let got = eval_sum_mod(inst, &BigUint::from(n), &fm).unwrap();
                ensure(got == mod_of(&exact, &m), || format!("case {case}: u_{n} mod {m}"))?;
            }
            compared += 1;
        }
    }
    Ok(format!("{compared} indices over 200 instances"))
}

fn parity_transform() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..100 {
        let k = rng.random_range(1..=4);
        let ell = rng.random_range(1..=3);
        let rational = |rng: &mut ChaCha8Rng| Rational::ratio(nonzero(rng, 9), rng.random_range(1..=4));
        let terms = (0..k)
            .map(|_| Term::new(rational(&mut rng), (0..ell).map(|_| rational(&mut rng)).collect()))
            .collect();
        let s = SuperpowerSum::new(ell, terms).unwrap();
        let t = s.odd_transform();
        for n in 1..=8u64 {
            ensure(s.eval(2 * n - 1).unwrap() == t.eval(2 * n).unwrap(), || format!("case {case}, n = {n}"))?;
        }
    }
    Ok("100 instances, n <= 8".into())
}

fn sum(ell: usize, rows: &[(&str, &[&str])]) -> SuperpowerSum {
    let terms = rows
        .iter()
        .map(|(c, b)| Term::new(c.parse().unwrap(), b.iter().map(|x| x.parse().unwrap()).collect()))
        .collect();
    SuperpowerSum::new(ell, terms).unwrap()
}

fn classifier_fixtures() -> Vec<(&'static str, SuperpowerSum, Verdict)> {
    use Verdict::{OmegaBounded as B, OmegaUnbounded as U};
    vec![
        ("6*4^n", sum(1, &[("6", &["4"])]), B),
        ("2^n", sum(1, &[("1", &["2"])]), B),
        ("-3*5^n", sum(1, &[("-3", &["5"])]), B),
        ("(1/2)(3/4)^n", sum(1, &[("1/2", &["3/4"])]), B),
        ("2*3^n*5^(n^2)", sum(2, &[("2", &["3", "5"])]), B),
        ("(-2)^n*3^(n^2)", sum(2, &[("1", &["-2", "3"])]), B),
        ("-(-7)^n", sum(1, &[("-1", &["-7"])]), B),
        ("2^n*3^(n^3)", sum(3, &[("1", &["2", "1", "3"])]), B),
        ("(2/3)^n*(3/2)^(n^2)", sum(2, &[("1", &["2/3", "3/2"])]), B),
        ("2^n+3^n-3^n", sum(1, &[("1", &["2"]), ("1", &["3"]), ("-1", &["3"])]), B),
        ("5*2^n-5*2^n+7^n", sum(1, &[("5", &["2"]), ("-5", &["2"]), ("1", &["7"])]), B),
        ("2^n+2^n", sum(1, &[("1", &["2"]), ("1", &["2"])]), B),
        ("3^n+3^n+5^n", sum(1, &[("1", &["3"]), ("1", &["3"]), ("1", &["5"])]), U),
        (
            "cancelling square term",
            sum(2, &[("1", &["2", "3"]), ("-1", &["2", "3"]), ("1", &["5", "1"])]),
            B,
        ),
        ("3*2^n+5*(-2)^n", sum(1, &[("3", &["2"]), ("5", &["-2"])]), B),
        ("2^n+(-2)^n", sum(1, &[("1", &["2"]), ("1", &["-2"])]), U),
        ("2^n-(-2)^n", sum(1, &[("1", &["2"]), ("-1", &["-2"])]), U),
        ("3^n+2*(-3)^n", sum(1, &[("1", &["3"]), ("2", &["-3"])]), B),
        ("5*7^n-5*(-7)^n+7^n", sum(1, &[("5", &["7"]), ("-5", &["-7"]), ("1", &["7"])]), B),
        ("2^n+(-3)^n", sum(1, &[("1", &["2"]), ("1", &["-3"])]), U),
        ("(-2)^n+(-3)^n", sum(1, &[("1", &["-2"]), ("1", &["-3"])]), U),
        ("2^n*3^(n^2)+(-2)^n*3^(n^2)", sum(2, &[("1", &["2", "3"]), ("1", &["-2", "3"])]), U),
        ("3*2^n*(-3)^(n^2)+2^n*3^(n^2)", sum(2, &[("3", &["2", "-3"]), ("1", &["2", "3"])]), B),
        ("2^n+3^n", sum(1, &[("1", &["2"]), ("1", &["3"])]), U),
        ("1+2^n", sum(1, &[("1", &["1"]), ("1", &["2"])]), U),
        ("2^(n^2)+3^n", sum(2, &[("1", &["1", "2"]), ("1", &["3", "1"])]), U),
        ("(1/2)^n+(1/3)^n", sum(1, &[("1", &["1/2"]), ("1", &["1/3"])]), U),
        ("7*2^n-3^n", sum(1, &[("7", &["2"]), ("-1", &["3"])]), U),
        ("2^n*3^(n^2)*5^(n^3)+1", sum(3, &[("1", &["2", "3", "5"]), ("1", &["1", "1", "1"])]), U),
        ("2^n+3^n+5^n", sum(1, &[("1", &["2"]), ("1", &["3"]), ("1", &["5"])]), U),
    ]
}

fn classifier_correctness() -> Outcome {
    let fixtures = classifier_fixtures();
    let mut validated = 0;
    for (name, s, expected) in &fixtures {
        let r = classify(s);
        ensure(r.verdict == *expected, || format!("{name}: got {:?}", r.verdict))?;
        for (parity, class) in [(Parity::Even, &r.even), (Parity::Odd, &r.odd)] {
            if let ParityClass::Degenerate { coefficients } = class {
                let v = cross_validate_degenerate(s, parity, coefficients, 50).map_err(|e| e.to_string())?;
                ensure(v.ok, || format!("{name}: {parity:?} product form fails at {:?}", v.counterexample))?;
                validated += 1;
            }
        }
    }
    Ok(format!("{} fixtures, {validated} product forms cross-validated", fixtures.len()))
}

fn embed(c: &[i64], x: &[i64]) -> SuperpowerSum {
    let rows: Vec<Vec<i64>> = c.iter().zip(x).map(|(&ci, &xi)| vec![ci, xi]).collect();
    let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
    SuperpowerSum::from_rows(&refs).unwrap()
}

fn omega_int(x: &BigInt) -> u64 {
    omega_with_budget(x, Budget::DEFAULT).unwrap().finite().unwrap()
}

fn corollary_reproduction() -> Outcome {
    let coeffs = [1i64, 2, 3];
    let bases: Vec<i64> = (-6..=6).filter(|&x| x != 0).collect();
    let mut cases: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
    for k in 1..=3usize {
        let mut idx = vec![0usize; k];
        loop {
            let x: Vec<i64> = idx.iter().map(|&i| bases[i]).collect();
            let mut cidx = vec![0usize; k];
            loop {
                cases.push((cidx.iter().map(|&i| coeffs[i]).collect(), x.clone()));
                if !bump(&mut cidx, coeffs.len()) {
                    break;
                }
            }
            if !bump(&mut idx, bases.len()) {
                break;
            }
        }
    }
    let bounded: Vec<(Vec<i64>, Vec<i64>)> = cases
        .par_iter()
        .map(|(c, x)| {
            let cr: Vec<Rational> = c.iter().map(|&v| Rational::from_i64(v)).collect();
            let xr: Vec<Rational> = x.iter().map(|&v| Rational::from_i64(v)).collect();
            let (verdict, _) = corollary_classify(&cr, &xr).map_err(|e| e.to_string())?;
            let equal = x.iter().all(|v| v.abs() == x[0].abs());
            let signed: i64 = c.iter().zip(x).map(|(ci, xi)| ci * xi.signum()).sum();
            let expect_bounded = equal && signed != 0;
            ensure((verdict == CorollaryVerdict::Bounded) == expect_bounded, || format!("c = {c:?}, x = {x:?}"))?;
            let full = classify(&embed(c, x)).verdict;
            ensure((full == Verdict::OmegaBounded) == expect_bounded, || format!("classify disagrees on {c:?}, {x:?}"))?;
            Ok(expect_bounded.then(|| (c.clone(), x.clone())))
        })
        .collect::<Result<Vec<_>, String>>()?
        .into_iter()
        .flatten()
        .collect();
    // s_n = |x|^n * (sum c_i or sum eps_i c_i), so omega is at most the sum of the parts
    bounded.par_iter().try_for_each(|(c, x)| {
        let s = embed(c, x);
        let a = BigInt::from(x[0].abs());
        let even: i64 = c.iter().sum();
        let odd: i64 = c.iter().zip(x).map(|(ci, xi)| ci * xi.signum()).sum();
        let cap = omega_int(&a) + omega_int(&BigInt::from(even)).max(omega_int(&BigInt::from(odd)));
        for n in 1..=40 {
            let v = s.eval(n).unwrap().to_integer().unwrap();
            let w = omega_int(&v);
            ensure(w <= cap, || format!("{c:?}, {x:?}: omega(s_{n}) = {w} > {cap}"))?;
        }
        Ok::<(), String>(())
    })?;
    let unbounded: [(&[i64], &[i64]); 10] = [
        (&[1, 1], &[2, 3]),
        (&[1, 1], &[2, 5]),
        (&[1, 2], &[3, 5]),
        (&[1, 1], &[-2, 3]),
        (&[3, 1], &[2, -5]),
        (&[1, 1], &[3, 7]),
        (&[1, 1, 1], &[2, 3, 5]),
        (&[2, 1], &[1, 6]),
        (&[1, 1], &[4, -6]),
        (&[1, 3, 1], &[-2, 3, 4]),
    ];
    for (c, x) in unbounded {
        let s = embed(c, x);
        let mut seen = BTreeSet::new();
        for n in 1..=60 {
            let v = s.eval(n).unwrap().to_integer().unwrap();
            let w = if v.is_zero() {
                Some(OmegaValue::Infinite)
            } else {
                factor(&v, Budget::DEFAULT).unwrap().complete().ok().map(|f| OmegaValue::Finite(f.omega()))
            };
            seen.extend(w.map(|w| w.to_string()));
            if seen.len() >= 3 {
                break;
            }
        }
        ensure(seen.len() >= 3, || format!("{c:?}, {x:?}: omega values {seen:?}"))?;
    }
    Ok(format!("{} grid cases, {} bounded", cases.len(), bounded.len()))
}

/// Advances a base-`radix` counter; false after the last value.
fn bump(idx: &mut [usize], radix: usize) -> bool {
    for d in idx.iter_mut() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

fn witness_chain() -> Outcome {
    let s = SuperpowerSum::from_rows(&[&[1, 2], &[1, 3]]).unwrap();
    let inst = normalize_even(&s).normalized().unwrap();
    let cfg = WitnessConfig::default();
    let cert = build_certificate(&inst, 1, false, &cfg).map_err(|e| e.to_string())?;
    let p = &cert.params;
    let primes: Vec<BigUint> = p.prime_list().cloned().collect();
    ensure(primes == [BigUint::from(2u32), BigUint::from(3u32)], || format!("P = {primes:?}"))?;
    ensure(p.n0 == 1, || format!("n0 = {}", p.n0))?;
    let sigma = p.sigma_form();
    for n in [2u64, 4, 6] {
        let value = sigma.eval_big(&BigUint::from(n)).unwrap();
        ensure(value == s.eval(n).unwrap().to_integer().unwrap(), || format!("sigma_{n} differs from s_{n}"))?;
    }
    let q0: Vec<&BigUint> = cert.chain[0].known_primes.keys().collect();
    ensure(q0 == [&BigUint::from(13u32)], || format!("Q_r0 = {q0:?}"))?;
    ensure(cert.chain.len() == 2, || "chain length".into())?;
    for name in ["congP", "congQ", "lemma2", "lemma3", "lemma4", "growth", "slog"] {
        ensure(cert.checks.iter().any(|c| c.name == name), || format!("missing check {name}"))?;
    }
    let failed: Vec<String> =
        cert.checks.iter().filter(|c| !c.passed).map(|c| format!("{}@{}", c.name, c.link)).collect();
    ensure(failed.is_empty(), || format!("failed: {failed:?}"))?;
    let r1 = &cert.chain[1].r;
    Ok(format!("{} checks pass, r_1 has {} digits", cert.checks.len(), r1.to_string().len()))
}

fn negative_controls() -> Outcome {
    let s = SuperpowerSum::from_rows(&[&[1, 2], &[1, 3]]).unwrap();
    let inst = normalize_even(&s).normalized().unwrap();
    let cfg = WitnessConfig::default();
    let mut cert = build_certificate(&inst, 1, false, &cfg).map_err(|e| e.to_string())?;
    cert.chain[1].r += 2u32;
    let checks = verify_chain(&cert, &cfg).map_err(|e| e.to_string())?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    ensure(!failed.is_empty(), || "perturbed r_1 passed every check".into())?;

    let forged: [(SuperpowerSum, Parity, [i64; 2]); 3] = [
        (s.clone(), Parity::Even, [1, 5]),
        (SuperpowerSum::from_rows(&[&[3, 2], &[5, -2]]).unwrap(), Parity::Even, [8, 3]),
        (SuperpowerSum::from_rows(&[&[3, 2], &[5, -2]]).unwrap(), Parity::Odd, [-2, 3]),
    ];
    for (sum, parity, coeffs) in forged {
        let coeffs: Vec<Rational> = coeffs.iter().map(|&c| Rational::from_i64(c)).collect();
        let v = cross_validate_degenerate(&sum, parity, &coeffs, 50).map_err(|e| e.to_string())?;
        ensure(!v.ok, || format!("forged {coeffs:?} accepted"))?;
    }
    Ok(format!("failed checks after perturbation: {}", failed.join(", ")))
}

fn zsigmondy_grid() -> Outcome {
    let pairs: Vec<(u64, u64)> =
        (2..=12u64).flat_map(|a| (1..a).map(move |b| (a, b))).filter(|(a, b)| a.gcd(b) == 1).collect();
    let rows = pairs
        .par_iter()
        .map(|&(a, b)| {
            for n in 2..=20 {
                let q = ZsigmondyQuery::new(a, b, n).map_err(|e| e.to_string())?;
                let ppd = primitive_prime_divisors(&q, Budget::DEFAULT).map_err(|e| e.to_string())?;
                ensure(ppd.is_empty() == is_exception(&q), || format!("({a}, {b}, {n}): {ppd:?}"))?;
            }
            let report = omega_divisor_bound_check(a, b, 20, Budget::DEFAULT).map_err(|e| e.to_string())?;
            ensure(report.holds(), || format!("divisor bound fails for ({a}, {b})"))?;
            Ok(report.rows.len())
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(format!("{} pairs, {} rows", pairs.len(), rows.iter().sum::<usize>()))
}

fn tower_le(c: &Rational, l: u64, n: &BigUint) -> bool {
    let cap = n.bits() + 2;
    match tetrate(c, l, cap).unwrap() {
        TowerValue::OverCap => false,
        v => v.le(&Rational::from(n.clone())).unwrap(),
    }
}

fn slog_suite() -> Outcome {
    let mut checked = 0;
    let million_digits = BigUint::from(10u32).pow(999_999);
    for base in [2u32, 3, 10] {
        let c = Rational::from_i64(base as i64);
        let mut probes = vec![BigUint::from(2u32), million_digits.clone(), &million_digits * 10u32 - 1u32];
        // every tower value below 10^6 digits, with its neighbours
        let mut t = BigUint::one();
        loop {
            t = BigUint::from(base).pow(u32::try_from(&t).unwrap());
            if t.bits() > million_digits.bits() + 4 {
                break;
            }
            probes.extend([&t - 1u32, t.clone(), &t + 1u32]);
            if t.bits() > 32 {
                break;
            }
        }
        for n in probes.iter().filter(|n| **n >= BigUint::from(2u32)) {
            let l = slog(&c, n).map_err(|e| e.to_string())?;
            ensure(tower_le(&c, l, n) && !tower_le(&c, l + 1, n), || {
                format!("C = {base}, n with {} bits: slog = {l}", n.bits())
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} boundary values"))
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 oracle equivalence", oracle_equivalence, Duration::from_secs(10)),
        ("2 parity transform", parity_transform, Duration::from_secs(5)),
        ("3 classifier fixtures", classifier_correctness, Duration::from_secs(10)),
        ("4 corollary grid", corollary_reproduction, Duration::from_secs(60)),
        ("5 witness chain 2^n+3^n", witness_chain, Duration::from_secs(30)),
        ("6 negative controls", negative_controls, Duration::from_secs(5)),
        ("7 zsigmondy grid", zsigmondy_grid, Duration::from_secs(120)),
        ("8 slog boundaries", slog_suite, Duration::from_secs(5)),
    ];
    let mut all = true;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (ok, note) = match outcome {
            Ok(note) if took <= limit => (true, note),
            Ok(note) => (false, format!("{note}; over the {}s limit", limit.as_secs())),
            Err(e) => (false, e),
        };
        all &= ok;
        println!("criterion {name}: {} ({:.2}s) {note}", if ok { "PASS" } else { "FAIL" }, took.as_secs_f64());
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
