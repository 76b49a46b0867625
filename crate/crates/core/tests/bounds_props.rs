use abundancy::arith::{abundancy, is_prime, Natural, Ratio};
use abundancy::bounds::*;
use abundancy::real::Real;
use num_traits::Signed;
use proptest::prelude::*;

fn nat(v: u64) -> Natural {
    Natural::from(v)
}

fn r(n: i64, d: i64) -> Ratio {
    Ratio::new(n.into(), d.into())
}

fn prime_1mod4() -> impl Strategy<Value = u64> {
    (1u64..200).prop_map(|i| 4 * i + 1).prop_filter("prime", |&q| is_prime(&nat(q)))
}

proptest! {
    #[test]
    fn g_strictly_decreases_inside_the_sandwich(q in prime_1mod4(), k in 1u32..30) {
        let q = nat(q);
        let (l, u) = (l_bound(&q), u_bound(&q));
        let g = g_of_k(&q, k);
        prop_assert!(l < g && g <= u);
        prop_assert!(g_of_k(&q, k + 1) < g);
        prop_assert!(f_prime_numerator(&q, k) > 0.into());
    }

    #[test]
    fn g_uses_the_true_abundancy(q in prime_1mod4(), k in 1u32..8) {
        let q = nat(q);
        let i = abundancy(&q.pow(k)).unwrap();
        prop_assert_eq!(g_of_k(&q, k), &i + r(2, 1) / &i);
    }

    #[test]
    fn l_rho_is_monotone_in_rho(
        q in prime_1mod4(),
        n in (1u64..2000).prop_map(|v| 2 * v + 1),
        a in 1i64..400,
        b in 1i64..400,
        d in 1i64..5,
    ) {
        let (q, n) = (nat(q), nat(n));
        let (lo, hi) = if a <= b { (r(a, d), r(b, d)) } else { (r(b, d), r(a, d)) };
        let x = l_rho(&q, &n, &lo);
        let y = l_rho(&q, &n, &hi);
        if x.admissible && y.admissible {
            prop_assert!(x.value <= y.value);
            prop_assert!(l_bound(&q) < x.value && y.value < u_bound(&q));
        }
    }

    #[test]
    fn solve_k_brackets_exactly(
        q in prime_1mod4(),
        n in (1u64..5000).prop_map(|v| 2 * v + 1),
        rho in 1i64..4000,
    ) {
        let (q, n) = (nat(q), nat(n));
        let ks = solve_k(&q, &n, &r(rho, 1)).unwrap();
        prop_assert!(ks.bracket_holds());
        // K < log_q(2n^2/rho) reduces to rho < 2n^2
        let below = r(rho, 1) < Ratio::from_integer((&n * &n * 2u32).into());
        prop_assert_eq!(ks.bound_holds, below);
        if below {
            prop_assert!(ks.k < ks.bound_rhs);
        }
        prop_assert_eq!(ks.floor_k(), ks.k_max);
    }
}

#[test]
fn exact_power_targets_floor_correctly() {
    // rho chosen so that 2n^2(q-1)/rho + 1 = q^j
    for (q, n) in [(5u64, 3u64), (13, 9), (17, 21)] {
        let (qn, nn) = (nat(q), nat(n));
        let two_n2_q1 = Ratio::from_integer((&nn * &nn * 2u32 * (q - 1)).into());
        for j in 1..6u32 {
            let pj = Ratio::from_integer(qn.pow(j).into());
            let rho = &two_n2_q1 / (pj - r(1, 1));
            let ks = solve_k(&qn, &nn, &rho).unwrap();
            assert_eq!(ks.k_max, j as i64 - 1);
            assert_eq!(ks.floor_k(), ks.k_max);
        }
    }
}

#[test]
fn g_approaches_l_from_above() {
    let five = nat(5);
    let gap = g_of_k(&five, 41) - l_bound(&five);
    assert!(gap.is_positive());
    assert!(gap < r(1, 10).pow(20));
}

#[test]
fn back_substitution_recovers_two_n2_over_rho() {
    for (q, n, rho) in [(5u64, 3u64, r(1, 1)), (5, 3003, r(3375, 1)), (13, 21, r(5, 2))] {
        let ks = solve_k(&nat(q), &nat(n), &rho).unwrap();
        let back = ks.back_substitute();
        let err = (back - Real::from_ratio(&ks.two_n2_over_rho())).abs();
        assert!(err.to_ratio() < r(1, 10).pow(40), "({q}, {n}, {rho})");
    }
}

#[test]
fn spoof_members_use_the_oracle_sigma() {
    let rep = spoof_check(&descartes_number(), &nat(DESCARTES_PSEUDO_PRIME)).unwrap();
    let oracle = abundancy::arith::sigma_oracle(&rep.n_squared).unwrap();
    assert_eq!(rep.sigma_n_squared, oracle);
    assert_eq!(rep.sigma_n_squared, nat(18_035_199));
    assert!(rep.pairwise_equal().iter().all(|&(_, _, eq)| eq));
}
