mod common;

use common::{q, random_game, random_game_json, rng, GameShape};
use csgbvi::rational::to_fraction;
use csgbvi::{bvi, deflate, find_mecs, parse_csg, parse_rational, pre, MatrixGame, Provenance, Rational, RunConfig, Valuation};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

const SMALL: GameShape = GameShape { max_states: 4, max_actions: 3, max_denominator: 8 };

fn matrix() -> impl Strategy<Value = Vec<Vec<Rational>>> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(m, n)| {
        prop::collection::vec(prop::collection::vec((-6i64..=6, 1i64..=6).prop_map(|(p, d)| q(p, d)), n), m)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lp_duality(z in matrix()) {
        let g = MatrixGame::new(z);
        let (row_value, x) = g.row_lp();
        let (col_value, y) = g.col_lp();
        prop_assert_eq!(&row_value, &col_value);
        prop_assert_eq!(g.row_guarantee(&x), row_value.clone());
        prop_assert_eq!(g.col_guarantee(&y), col_value);
        prop_assert_eq!(g.solve().value, row_value);
    }

    #[test]
    fn value_is_translation_equivariant(z in matrix(), shift in -5i64..=5) {
        let shifted: Vec<Vec<Rational>> = z.iter().map(|r| r.iter().map(|x| x + Rational::from_integer(shift.into())).collect()).collect();
        prop_assert_eq!(MatrixGame::new(shifted).value(), MatrixGame::new(z).value() + Rational::from_integer(shift.into()));
    }

    #[test]
    fn fraction_round_trip(p in -10_000i64..10_000, d in 1i64..10_000) {
        let r = q(p, d);
        prop_assert_eq!(parse_rational(&to_fraction(&r)).unwrap(), r);
    }

    #[test]
    fn decimal_literals_are_exact(int in 0u32..1000, frac in "[0-9]{1,12}") {
        let expected = Rational::from_integer(int.into())
            + Rational::new(frac.parse::<u64>().unwrap().into(), num_bigint::BigInt::from(10u8).pow(frac.len() as u32));
        prop_assert_eq!(parse_rational(&format!("{int}.{frac}")).unwrap(), expected);
    }

    #[test]
    fn model_json_round_trip(seed in any::<u64>()) {
        let g = parse_csg(&random_game_json(&mut rng(seed), SMALL)).unwrap();
        let again = parse_csg(&csgbvi::model::to_json(&g).to_string()).unwrap();
        prop_assert_eq!(again.names(), g.names());
        for s in 0..g.num_states() {
            prop_assert_eq!(again.actions_r(s), g.actions_r(s));
            prop_assert_eq!(again.actions_s(s), g.actions_s(s));
            for a in 0..g.actions_r(s).len() {
                for b in 0..g.actions_s(s).len() {
                    prop_assert_eq!(again.delta(s, a, b), g.delta(s, a, b));
                }
            }
        }
    }

    #[test]
    fn bellman_update_is_order_preserving(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_game(&mut r, SMALL);
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for s in 0..g.num_states() {
            let (a, b) = if s == g.target_sink() {
                (Rational::one(), Rational::one())
            } else if s == g.losing_sink() {
                (Rational::zero(), Rational::zero())
            } else {
                let a = q(r.gen_range(0..=8), 8);
                let b = &a + q(r.gen_range(0..=8), 8) * (Rational::one() - &a);
                (a, b)
            };
            lo.push(a);
            hi.push(b);
        }
        let p_lo = pre(&g, &Valuation::new(lo, Provenance::External));
        let p_hi = pre(&g, &Valuation::new(hi, Provenance::External));
        for s in 0..g.num_states() {
            prop_assert!(p_lo[s] <= p_hi[s]);
        }
    }

    #[test]
    fn deflation_lowers_valid_bounds_monotonically(seed in any::<u64>()) {
        let g = random_game(&mut rng(seed), SMALL);
        let mecs = find_mecs(&g, &g.inner_states());
        let mut u = Valuation::upper_init(&g, Provenance::ValidUpper);
        let mut previous = u.clone();
        for _ in 0..4 {
            u = pre(&g, &u);
            let before = u.clone();
            let mut events = Vec::new();
            for mec in &mecs {
                deflate(&g, &mut u, mec, &mut events).unwrap();
            }
            for s in 0..g.num_states() {
                prop_assert!(u[s] <= before[s]);
                prop_assert!(u[s] <= previous[s]);
            }
            for e in &events {
                prop_assert!(csgbvi::is_ec(&g, &e.bec));
                prop_assert!(e.best_exits.is_subset(&e.bec));
            }
            previous = u.clone();
        }
    }
}

#[test]
fn monotone_sandwich_on_random_five_state_games() {
    let shape = GameShape { max_states: 5, max_actions: 3, max_denominator: 8 };
    let mut r = rng(2024);
    for _ in 0..100 {
        let g = random_game(&mut r, shape);
        let cfg = RunConfig {
            max_iters: 40,
            arithmetic: csgbvi::Arithmetic::Float,
            ..RunConfig::default()
        };
        let res = bvi(&g, &cfg).unwrap();
        for w in res.trace.windows(2) {
            for s in 0..g.num_states() {
                assert!(w[0].lower[s] <= w[1].lower[s]);
                assert!(w[1].lower[s] <= w[1].upper[s]);
                assert!(w[1].upper[s] <= w[0].upper[s]);
            }
        }
    }
}
