use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use prbox::strategies::games::random_strategy;
use prbox::strategies::{max_weight, DepolElement};
use prbox::{BoxTable, Rational, Scalar, Var};

/// Rationals in `[0, 1/4]` with small denominators.
fn eps() -> impl Strategy<Value = Rational> {
    (1i64..=64).prop_flat_map(|d| (0..=d).prop_map(move |k| Rational::frac(k, 4 * d)))
}

fn iso(n: u32, e: &Rational) -> BoxTable {
    BoxTable::isotropic(n, &Scalar::from(e.clone())).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_text_round_trips(n in -10_000i64..10_000, d in 1i64..10_000) {
        let r = Rational::frac(n, d);
        prop_assert_eq!(r.to_string().parse::<Rational>().unwrap(), r);
    }

    #[test]
    fn tensor_of_isotropic_boxes_is_isotropic(e in eps()) {
        let one = iso(1, &e);
        prop_assert_eq!(one.tensor(&one), iso(2, &e));
    }

    #[test]
    fn mixed_noise_tensors_stay_nonsignalling(a in eps(), b in eps()) {
        let t = iso(1, &a).tensor(&iso(1, &b));
        prop_assert!(t.is_nonsignalling());
        prop_assert_eq!(t.mass(), &Scalar::one());
    }

    #[test]
    fn depolarization_preserves_round_losses(seed in any::<u64>(), alpha in 0u32..4, beta in 0u32..4, flip in 0u32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_strategy(2, &mut rng);
        let g = DepolElement::new(2, alpha, beta, flip);
        let t = g.apply_strategy(&s);
        for u in 0..4 {
            for v in 0..4 {
                let (_, _, u2, v2) = g.apply_coords(0, 0, u, v);
                prop_assert_eq!(t.rounds_lost(u2, v2), s.rounds_lost(u, v));
            }
        }
    }

    #[test]
    fn depolarization_fixes_isotropic_boxes(alpha in 0u32..4, beta in 0u32..4, flip in 0u32..4) {
        let b = BoxTable::isotropic(2, &Scalar::var(Var::Eps)).unwrap();
        prop_assert_eq!(DepolElement::new(2, alpha, beta, flip).apply_box(&b), b);
    }

    #[test]
    fn max_weight_is_the_largest_removable_weight(seed in any::<u64>(), e in eps()) {
        prop_assume!(e < Rational::frac(1, 4));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_strategy(2, &mut rng);
        let b = iso(2, &e);
        let det = BoxTable::deterministic(&s);
        let w = max_weight(&s, &b).unwrap().value;
        prop_assert!(b.subtract_component(&w, &det).is_ok());
        let more = &w + &Scalar::frac(1, 1_000_000);
        prop_assert!(b.subtract_component(&more, &det).is_err());
    }
}
