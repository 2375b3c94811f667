//! Cross-module properties at integration scale: randomized inputs,
//! always judged against an independent route.

use std::sync::OnceLock;

use gapcert::arith::{is_sum_of_two_squares, primes_up_to, two_squares_witness};
use gapcert::elliptic::counter_by_name;
use gapcert::fixtures::FixtureSet;
use gapcert::qseries::{from_curve, QExpansion};
use proptest::prelude::*;

fn f24() -> &'static QExpansion {
    static F: OnceLock<QExpansion> = OnceLock::new();
    F.get_or_init(|| {
        let set = FixtureSet::builtin().unwrap();
        let fc = set.curve("24a3").unwrap();
        from_curve(
            &fc.curve,
            fc.conductor,
            3000,
            counter_by_name("auto").unwrap(),
        )
        .unwrap()
    })
}

proptest! {
    #[test]
    fn coefficients_multiply_on_coprime_indices(m in 2u64..55, n in 2u64..55) {
        prop_assume!(num_integer::gcd(m, n) == 1);
        let f = f24();
        prop_assert_eq!(
            f.coeff(m * n).unwrap(),
            &(f.coeff(m).unwrap() * f.coeff(n).unwrap())
        );
    }

    #[test]
    fn two_squares_flag_matches_witness_search(n in 1u64..100_000) {
        let flag = is_sum_of_two_squares(n).unwrap();
        let witness = two_squares_witness(n).unwrap();
        prop_assert_eq!(flag, witness.is_some());
        if let Some((a, b)) = witness {
            prop_assert_eq!(a * a + b * b, n);
        }
    }

    #[test]
    fn counters_agree_within_hasse_bound(idx in 0usize..430) {
        let p = primes_up_to(3000)[idx];
        prop_assume!(42 % p != 0);
        let set = FixtureSet::builtin().unwrap();
        let curve = &set.curve("e0").unwrap().curve;
        let legendre = curve.ap_good(p, counter_by_name("legendre").unwrap()).unwrap();
        let bsgs = curve.ap_good(p, counter_by_name("bsgs").unwrap()).unwrap();
        prop_assert_eq!(legendre, bsgs);
        prop_assert!((legendre as i128) * (legendre as i128) <= 4 * p as i128);
    }
}
