use std::cmp::Ordering;

use num_bigint::BigInt;
use proptest::prelude::*;
use superpowers::factor::{omega_rational_with_budget, omega_with_budget, Budget};
use superpowers::sequence::{normalize_even, prec_compare, SuperpowerSum, Term};
use superpowers::Rational;

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=6).prop_filter_map("nonzero", |(n, d)| (n != 0).then(|| Rational::ratio(n, d)))
}

fn instance() -> impl Strategy<Value = SuperpowerSum> {
    (1usize..=2, 1usize..=4).prop_flat_map(|(ell, k)| {
        prop::collection::vec((rational(), prop::collection::vec(rational(), ell)), k).prop_map(move |rows| {
            let terms = rows.into_iter().map(|(c, b)| Term::new(c, b)).collect();
            SuperpowerSum::new(ell, terms).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_recovers_values(s in instance()) {
        if let Some(inst) = normalize_even(&s).normalized() {
            prop_assert!(inst.is_canonical());
            for n in (2..=20).step_by(2) {
                let u = Rational::from_integer(inst.eval(n).unwrap());
                prop_assert_eq!(&u * &inst.scale_at(n).unwrap(), s.eval(n).unwrap());
            }
        }
    }

    #[test]
    fn omega_slack_bounds_the_loss(s in instance()) {
        if let Some(inst) = normalize_even(&s).normalized() {
            for n in [2u64, 4, 6] {
                let sv = s.eval(n).unwrap();
                if sv.is_zero() {
                    continue;
                }
                // values whose factorization does not finish quickly are skipped
                let budget = Budget::new(1 << 12);
                let (Ok(ws), Ok(wu)) = (
                    omega_rational_with_budget(&sv, budget),
                    omega_with_budget(&inst.eval(n).unwrap(), budget),
                ) else { continue };
                let (ws, wu) = (ws.finite().unwrap(), wu.finite().unwrap());
                prop_assert!(ws + inst.omega_slack >= wu, "n = {n}: {ws} + {} < {wu}", inst.omega_slack);
            }
        }
    }

    #[test]
    fn normalization_is_a_fixed_point(s in instance()) {
        if let Some(inst) = normalize_even(&s).normalized() {
            let again = normalize_even(&inst.to_sum()).normalized().unwrap();
            prop_assert_eq!(&again.entries, &inst.entries);
        }
    }

    #[test]
    fn power_tuples_are_strictly_ordered(s in instance()) {
        if let Some(inst) = normalize_even(&s).normalized() {
            for i in 0..inst.k() {
                for j in 0..inst.k() {
                    let o = prec_compare(inst.powers(i), inst.powers(j)).unwrap();
                    prop_assert_eq!(o == Ordering::Equal, i == j);
                    prop_assert_eq!(o, i.cmp(&j));
                }
            }
        }
    }

    #[test]
    fn odd_transform_identity(s in instance()) {
        let t = s.odd_transform();
        for n in 1..=8u64 {
            prop_assert_eq!(s.eval(2 * n - 1).unwrap(), t.eval(2 * n).unwrap());
        }
    }

    #[test]
    fn json_round_trip(s in instance()) {
        prop_assert_eq!(SuperpowerSum::from_json(&s.to_json()).unwrap(), s);
    }
}

#[test]
fn zero_bases_vanish() {
    let s = SuperpowerSum::from_rows(&[&[5, 0], &[1, 2], &[1, 3]]).unwrap();
    let inst = normalize_even(&s).normalized().unwrap();
    assert_eq!(inst.k(), 2);
    assert_eq!(inst.eval(2).unwrap(), BigInt::from(13));
}

#[test]
fn bit_cap_is_enforced() {
    let s = SuperpowerSum::from_rows(&[&[1, 2, 3]]).unwrap();
    assert!(s.eval_with_cap(100, 1_000).is_err());
    assert!(s.eval_with_cap(10, 1_000).is_ok());
}
