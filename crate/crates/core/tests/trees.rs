mod common;

use std::cmp::Ordering;

use num_bigint::BigUint;
use parity_trees::bounds::{f_recurrence, g_recurrence};
use parity_trees::tree::{
    embed, enumerate_trees, find_minimal_universal, is_universal, make_naive_tree, make_succinct_tree, OrderedTree,
};
use proptest::prelude::*;

fn trees_up_to(max_leaves: usize, h: usize) -> Vec<OrderedTree> {
    (1..=max_leaves).flat_map(|n| enumerate_trees(n, h, 100_000).unwrap()).collect()
}

#[test]
fn embed_agrees_with_exhaustive_search() {
    for h in 1..=2 {
        let all = trees_up_to(5, h);
        for small in &all {
            for large in &all {
                let fast = embed(small, large).unwrap();
                let slow = common::brute_embeds(&small.to_shape(), &large.to_shape());
                assert_eq!(fast.is_some(), slow, "{small:?} into {large:?}");
                if let Some(e) = fast {
                    let images: Vec<_> = small.leaves().map(|l| e.leaf_image(small, large, l)).collect();
                    assert!(images.windows(2).all(|w| w[0] < w[1]));
                }
            }
        }
    }
}

#[test]
fn min_leaf_geq_matches_scan() {
    let mut trees = vec![make_naive_tree(3, 2).unwrap(), make_succinct_tree(5, 3).unwrap(), make_naive_tree(2, 3).unwrap()];
    trees.extend(enumerate_trees(4, 3, 1000).unwrap());
    for t in &trees {
        let lm = t.level_map();
        let codes = t.leaf_codes();
        for target in &codes {
            for p in 0..=lm.d() {
                for strict in [false, true] {
                    let expected = codes
                        .iter()
                        .find(|c| {
                            let ord = t.compare_leaves_at(c, target, p, &lm).unwrap();
                            ord == Ordering::Greater || (!strict && ord == Ordering::Equal)
                        })
                        .cloned();
                    assert_eq!(t.min_leaf_geq_code(Some(target), p, strict).unwrap(), expected);
                }
            }
        }
    }
}

#[test]
fn truncation_coarsens_with_priority() {
    let t = make_succinct_tree(6, 3).unwrap();
    let lm = t.level_map();
    let codes = t.leaf_codes();
    for a in &codes {
        for b in &codes {
            let total = a.cmp(b);
            for p in 0..lm.d() {
                let here = t.compare_leaves_at(a, b, p, &lm).unwrap();
                let above = t.compare_leaves_at(a, b, p + 1, &lm).unwrap();
                if here == Ordering::Equal {
                    assert_eq!(above, Ordering::Equal);
                }
                assert!(here == Ordering::Equal || here == total);
            }
        }
    }
}

#[test]
fn constructions_have_the_predicted_sizes() {
    for n in 1..=64u64 {
        for h in 1..=6u32 {
            let t = make_succinct_tree(n as usize, h as usize).unwrap();
            assert_eq!(BigUint::from(t.leaf_count()), f_recurrence(n, h), "n={n} h={h}");
        }
    }
    for n in 1..=6usize {
        for h in 1..=4usize {
            assert_eq!(make_naive_tree(n, h).unwrap().leaf_count(), n.pow(h as u32));
        }
    }
}

#[test]
fn small_constructions_are_universal() {
    for n in 1..=4 {
        for h in 1..=2 {
            assert!(is_universal(&make_succinct_tree(n, h).unwrap(), n, h, 100_000).unwrap().universal);
            assert!(is_universal(&make_naive_tree(n, h).unwrap(), n, h, 100_000).unwrap().universal);
        }
    }
}

#[test]
fn minimal_sizes_sit_between_the_bounds() {
    for (n, h) in [(1, 3), (2, 2), (3, 2), (4, 2), (2, 3), (3, 3)] {
        let (size, witness) = find_minimal_universal(n, h, 1_000_000).unwrap();
        let size_big = BigUint::from(size);
        assert!(g_recurrence(n as u64, h as u32) <= size_big);
        assert!(size_big <= f_recurrence(n as u64, h as u32));
        assert_eq!(witness.leaf_count(), size);
        assert!(is_universal(&witness, n, h, 1_000_000).unwrap().universal);
    }
}

proptest! {
    #[test]
    fn dump_round_trips(n in 1usize..12, h in 1usize..4) {
        let t = make_succinct_tree(n, h).unwrap();
        prop_assert_eq!(OrderedTree::parse_dump(&t.dump()).unwrap(), t);
    }

    #[test]
    fn enumerated_dump_round_trips(n in 1usize..6, h in 1usize..4, pick in 0usize..1000) {
        let all: Vec<OrderedTree> = enumerate_trees(n, h, 10_000).unwrap().collect();
        let t = &all[pick % all.len()];
        prop_assert_eq!(&OrderedTree::parse_dump(&t.dump()).unwrap(), t);
    }
}
