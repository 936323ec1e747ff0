use num_bigint::BigUint;
use proptest::prelude::*;

use ggslab::quotient::{acts_trivially_on_level, level_permutation, DEFAULT_MAX_POINTS};
use ggslab::word_problem::{equal, is_trivial, order, order_with_cap};
use ggslab::{Error, Generator, GgsGroup, Word};

fn gs3() -> GgsGroup {
    GgsGroup::gupta_sidki(3).unwrap()
}

fn word(p: u32, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((any::<bool>(), 1i64..7), 0..max_len).prop_map(move |raw| {
        Word::from_powers(
            p,
            raw.into_iter()
                .map(|(is_a, e)| (if is_a { Generator::A } else { Generator::B }, e)),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solver_agrees_with_deep_action(g in word(3, 12)) {
        let group = gs3();
        prop_assert_eq!(is_trivial(&group, &g), acts_trivially_on_level(&group, &g, 6));
    }

    #[test]
    fn relators_are_trivial(g in word(3, 6)) {
        let group = gs3();
        let n = order(&group, &g).unwrap();
        let n: i64 = n.try_into().unwrap();
        prop_assert!(is_trivial(&group, &g.pow(n)));
        prop_assert!(is_trivial(&group, &(&(&g * &g.pow(n)) * &g.inverse())));
    }

    #[test]
    fn order_divides_into_level_images(g in word(5, 8)) {
        let group = GgsGroup::new(5, &[1, 4, 0, 0]).unwrap();
        let n = order(&group, &g).unwrap();
        let image = level_permutation(&group, &g, 3, DEFAULT_MAX_POINTS).unwrap().perm.order();
        prop_assert_eq!(&n % &image, BigUint::from(0u32));
    }
}

#[test]
fn worked_examples() {
    let g = gs3();
    let w = |t: &str| g.parse_word(t).unwrap();
    assert!(is_trivial(&g, &w("b^3")));
    assert!(!is_trivial(&g, &w("a b")));
    assert!(!is_trivial(&g, &w("a^2 b^2 a b")));
    assert!(equal(&g, &w("a b"), &w("a b")));
    assert!(!equal(&g, &w("b a"), &w("a b")));
    assert!(equal(&g, &w("a^3"), &Word::identity(3)));
    assert_eq!(order(&g, &w("a")).unwrap(), BigUint::from(3u32));
    assert_eq!(order(&g, &w("b")).unwrap(), BigUint::from(3u32));
    assert_eq!(order(&g, &w("a b")).unwrap(), BigUint::from(9u32));
}

#[test]
fn infinite_order_is_reported() {
    let g = GgsGroup::new(3, &[1, 1]).unwrap();
    let ab = &g.a() * &g.b();
    assert!(matches!(
        order_with_cap(&g, &ab, 64),
        Err(Error::InfiniteOrder { .. }) | Err(Error::DepthCapExceeded { .. })
    ));
}
