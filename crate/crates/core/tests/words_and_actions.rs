use proptest::prelude::*;

use ggslab::quotient::{
    level_permutation, portrait_act, vertex_at, vertex_index, DEFAULT_MAX_POINTS,
};
use ggslab::{Generator, GgsGroup, Vertex, Word};

fn gs3() -> GgsGroup {
    GgsGroup::gupta_sidki(3).unwrap()
}

fn word(p: u32, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((any::<bool>(), -10i64..10), 0..max_len).prop_map(move |raw| {
        Word::from_powers(
            p,
            raw.into_iter()
                .map(|(is_a, e)| (if is_a { Generator::A } else { Generator::B }, e)),
        )
    })
}

fn vertex(p: u32, max_level: usize) -> impl Strategy<Value = Vertex> {
    prop::collection::vec(1..=p, 0..=max_level).prop_map(move |l| Vertex::new(p, l).unwrap())
}

proptest! {
    #[test]
    fn multiplication_is_associative(x in word(5, 8), y in word(5, 8), z in word(5, 8)) {
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
    }

    #[test]
    fn inverse_cancels(x in word(7, 10)) {
        prop_assert!((&x * &x.inverse()).is_identity());
        prop_assert!((&x.inverse() * &x).is_identity());
    }

    #[test]
    fn display_parses_back(x in word(5, 10)) {
        prop_assert_eq!(Word::parse(5, &x.to_string()).unwrap(), x);
    }

    #[test]
    fn syllable_count_brackets_b_length(x in word(3, 12)) {
        let (l, k) = (x.total_length(), x.b_length());
        if !x.is_identity() {
            prop_assert!(l + 1 >= (2 * k).max(1) && l <= 2 * k + 1);
        }
    }

    #[test]
    fn action_is_a_left_action(g in word(3, 6), h in word(3, 6), v in vertex(3, 4)) {
        let group = gs3();
        prop_assert_eq!(group.act(&(&g * &h), &v), group.act(&g, &group.act(&h, &v)));
    }

    #[test]
    fn sections_satisfy_the_cocycle_rule(g in word(3, 6), h in word(3, 6), v in vertex(3, 3)) {
        let group = gs3();
        let lhs = group.section(&(&g * &h), &v);
        let rhs = &group.section(&g, &group.act(&h, &v)) * &group.section(&h, &v);
        // Both sides are words; compare their actions two levels down.
        for x in 0..9 {
            let leaf = vertex_at(3, 2, x);
            prop_assert_eq!(
                portrait_act(&group, &lhs, leaf.letters()),
                portrait_act(&group, &rhs, leaf.letters())
            );
        }
    }

    #[test]
    fn act_matches_the_level_tables(g in word(5, 6), x in 0usize..125) {
        let group = GgsGroup::new(5, &[1, 4, 0, 0]).unwrap();
        let perm = level_permutation(&group, &g, 3, DEFAULT_MAX_POINTS).unwrap();
        let v = vertex_at(5, 3, x);
        prop_assert_eq!(vertex_index(&group.act(&g, &v)), perm.perm.image(x as u32) as usize);
    }

    #[test]
    fn sections_contract(g in word(7, 14)) {
        let group = GgsGroup::new(7, &[1, 6, 0, 0, 0, 0]).unwrap();
        let sections = group.first_level_sections(&g);
        let k = g.b_length();
        prop_assert!(sections.iter().map(Word::b_length).sum::<usize>() <= k);
        for s in &sections {
            prop_assert!(2 * s.total_length() <= g.total_length() + 1);
        }
    }
}

#[test]
fn worked_examples() {
    let g = gs3();
    let w = |t: &str| g.parse_word(t).unwrap();
    let v = |t: &str| g.parse_vertex(t).unwrap();
    assert_eq!(g.root_permutation(&w("a b")), 1);
    assert_eq!(g.root_permutation(&w("b a b a^2")), 0);
    assert_eq!(g.act(&w("a"), &v("1")), v("2"));
    assert_eq!(g.act(&w("b"), &v("3")), v("3"));
    assert_eq!(g.act(&w("b"), &v("31")), v("31"));
    assert_eq!(g.section(&w("b"), &v("1")), w("a"));
    assert_eq!(g.section(&w("b"), &v("3")), w("b"));
    assert!(g.section(&w("a^2"), &v("2")).is_identity());
    assert_eq!(w("b^3"), Word::identity(3));
    assert_eq!(w("a b^2 a^-1").to_string(), "a b^2 a^2");
}

#[test]
fn group_construction() {
    assert!(GgsGroup::new(3, &[0, 0]).is_err());
    assert!(GgsGroup::new(4, &[1, 1, 1]).is_err());
    let g: GgsGroup = "p=5; e=1,4,0,0".parse().unwrap();
    assert!(g.is_torsion());
    assert!(g.is_branch_indicator());
    let h: GgsGroup = "p=3; e=1,1".parse().unwrap();
    assert!(!h.is_torsion());
    assert!(!h.is_branch_indicator());
    assert!(!GgsGroup::new(5, &[2, 2, 2, 2])
        .unwrap()
        .is_branch_indicator());
}
