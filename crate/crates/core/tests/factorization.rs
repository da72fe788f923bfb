use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use superpowers::factor::{factor, is_prime, sigma0, Budget, Factorization};

#[test]
fn reconstruction_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let inputs: Vec<i64> = (0..10_000).map(|_| rng.random_range(i64::MIN + 1..i64::MAX)).filter(|x| *x != 0).collect();
    inputs.par_iter().for_each(|&x| {
        let x = BigInt::from(x);
        let f = factor(&x, Budget::DEFAULT).unwrap();
        assert_eq!(f.reconstruct(), x);
        let f = f.complete().unwrap();
        assert!(f.primes().all(|p| is_prime(p).unwrap()));
    });
}

#[test]
fn results_do_not_depend_on_scheduling() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let inputs: Vec<BigInt> = (0..200)
        .map(|_| BigInt::from(rng.random::<u64>()) * BigInt::from(rng.random::<u64>() | 1))
        .collect();
    let budget = Budget::new(1 << 16);
    let run = |x: &BigInt| match factor(x, budget).unwrap() {
        Factorization::Complete(f) => (f.factors().clone(), BigUint::from(1u32)),
        Factorization::Partial(p) => (p.factors().clone(), p.cofactor().clone()),
    };
    let serial: Vec<_> = inputs.iter().map(run).collect();
    let parallel: Vec<_> = inputs.par_iter().map(run).collect();
    assert_eq!(serial, parallel);
}

#[test]
fn sigma0_is_multiplicative() {
    for a in 1u64..60 {
        for b in 1u64..60 {
            if a.gcd(&b) == 1 {
                let d = |x: u64| sigma0(&BigUint::from(x)).unwrap();
                assert_eq!(d(a * b), d(a) * d(b), "{a} * {b}");
            }
        }
    }
}
