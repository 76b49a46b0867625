use abundancy::arith::{
    abundancy, aliquot, deficiency, factorize, gcd, is_perfect, is_prime, sigma, sigma_oracle,
    Natural, Ratio,
};
use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;

fn nat(v: u64) -> Natural {
    Natural::from(v)
}

fn int(v: &Natural) -> BigInt {
    BigInt::from(v.clone())
}

proptest! {
    #[test]
    fn sigma_multiplicative_on_coprimes(a in 1u64..5000, b in 1u64..5000) {
        let (a, b) = (nat(a), nat(b));
        let lhs = sigma(&(&a * &b)).unwrap();
        let rhs = sigma(&a).unwrap() * sigma(&b).unwrap();
        if gcd(&a, &b).is_one() {
            prop_assert_eq!(lhs, rhs);
        } else {
            prop_assert!(lhs < rhs);
        }
    }

    #[test]
    fn deficiency_product_identity(a in 1u64..3000, b in 1u64..3000) {
        let (a, b) = (nat(a), nat(b));
        prop_assume!(gcd(&a, &b).is_one());
        let d = |x: &Natural| deficiency(x).unwrap();
        let s = |x: &Natural| int(&aliquot(x).unwrap());
        prop_assert_eq!(d(&a) * d(&b) - d(&(&a * &b)), 2 * s(&a) * s(&b));
    }

    #[test]
    fn abundancy_is_sigma_over_x(x in 1u64..1_000_000) {
        let x = nat(x);
        let i = abundancy(&x).unwrap();
        prop_assert_eq!(i, Ratio::new(int(&sigma(&x).unwrap()), int(&x)));
    }

    #[test]
    fn factorization_round_trips(a in 1u64..u64::MAX, b in 1u64..1_000_000) {
        let x = nat(a) * nat(b);
        let f = factorize(&x).unwrap();
        prop_assert_eq!(f.value(), x);
        for (p, e) in f.factors() {
            prop_assert!(is_prime(p));
            prop_assert!(*e > 0);
        }
    }
}

#[test]
fn sigma_matches_oracle_up_to_1e5() {
    for x in 1..=100_000u64 {
        let x = nat(x);
        assert_eq!(sigma(&x).unwrap(), sigma_oracle(&x).unwrap(), "sigma({x})");
    }
}

#[test]
fn perfect_numbers_below_1e4() {
    let found: Vec<u64> = (1..10_000u64).filter(|&x| is_perfect(&nat(x)).unwrap()).collect();
    assert_eq!(found, vec![6, 28, 496, 8128]);
}
