use num_integer::Integer;
use rayon::prelude::*;
use superpowers::factor::Budget;
use superpowers::zsigmondy::{
    is_exception, mean_divisor_count, omega_divisor_bound_check, primitive_prime_divisors, ZsigmondyQuery,
};

#[test]
fn primitive_divisors_exist_off_the_exception_list() {
    let pairs: Vec<(u64, u64)> =
        (2..=12u64).flat_map(|a| (1..a).map(move |b| (a, b))).filter(|(a, b)| a.gcd(b) == 1).collect();
    pairs.par_iter().for_each(|&(a, b)| {
        for n in 2..=20 {
            let q = ZsigmondyQuery::new(a, b, n).unwrap();
            let ppd = primitive_prime_divisors(&q, Budget::DEFAULT).unwrap();
            assert_eq!(ppd.is_empty(), is_exception(&q), "({a}, {b}, {n})");
        }
        assert!(omega_divisor_bound_check(a, b, 20, Budget::DEFAULT).unwrap().holds(), "({a}, {b})");
    });
}

#[test]
fn common_factors_are_divided_out() {
    // 6^n - 4^n = 2^n (3^n - 2^n)
    for n in 2..=12 {
        let q = ZsigmondyQuery::new(6, 4, n).unwrap();
        let reduced = ZsigmondyQuery::new(3, 2, n).unwrap();
        assert_eq!(
            primitive_prime_divisors(&q, Budget::DEFAULT).unwrap(),
            primitive_prime_divisors(&reduced, Budget::DEFAULT).unwrap()
        );
    }
}

#[test]
fn mean_divisor_count_is_near_log() {
    let n = 100_000u64;
    let mean = mean_divisor_count(n);
    let target = (n as f64).ln() + 1.154;
    assert!((mean - target).abs() / target < 0.15, "{mean} vs {target}");
    let euler = 0.577_215_664_901_532_9_f64;
    assert!((mean - ((n as f64).ln() + 2.0 * euler - 1.0)).abs() < 0.01);
}
