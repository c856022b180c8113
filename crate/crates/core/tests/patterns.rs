mod support;

use std::collections::HashSet;

use kfree_core::{
    copy_count_upper_bound, count_copies, count_matchings, enumerate_copies, extensions_of_matching,
    relaxed_graph_bound, visit_matchings, Matching,
};
use num_bigint::BigUint;
use proptest::prelude::*;
use support::*;

#[test]
fn graph_counts_match_brute_force() {
    for g in graph_corpus(300, 11) {
        for r in 2..=3 {
            assert_eq!(
                count_copies(&g, r, None).unwrap(),
                brute_count(&g, r),
                "{}",
                g.to_text()
            );
        }
    }
}

#[test]
fn enumeration_has_no_duplicates_and_copies_are_present() {
    for g in graph_corpus(200, 12) {
        let copies = enumerate_copies(&g, 2, None).unwrap();
        let masks: HashSet<Vec<usize>> = copies.iter().map(|c| c.edge_ids(&g).unwrap()).collect();
        assert_eq!(masks.len(), copies.len());
        assert_eq!(copies.len() as u128, brute_count(&g, 2));
    }
}

#[test]
fn hypergraph_counts_match_brute_force() {
    let mut rng = rng(13);
    for i in 0..60 {
        let n = 6 + i % 3;
        let g = random_hypergraph(&mut rng, 3, n, 0.5 + 0.05 * (i % 10) as f64);
        assert_eq!(count_copies(&g, 2, None).unwrap(), brute_count(&g, 2));
    }
}

#[test]
fn anchored_counts_match_brute_force() {
    let mut rng = rng(14);
    for sizes in [vec![3, 4], vec![4, 5], vec![2, 3, 3], vec![3, 3, 3]] {
        for density in [0.5, 0.8, 1.0] {
            let (g, spec) = random_partite(&mut rng, &sizes, density);
            assert_eq!(
                count_copies(&g, 2, Some(&spec)).unwrap(),
                brute_count_anchored(&g, &spec, 2),
                "{sizes:?} {density}"
            );
        }
    }
}

#[test]
fn matching_counts_match_brute_force() {
    for g in graph_corpus(200, 15) {
        for r in 2..=3 {
            assert_eq!(count_matchings(&g, r), brute_matchings(&g, r));
        }
    }
}

/// copies <= sum over matchings of extensions <= 2^r * matchings <= 2^r C(m, r) <= 2 m^r
fn bound_chain(g: &kfree_core::Hypergraph, r: usize) {
    let copies = count_copies(g, r, None).unwrap();
    let cap = 1u128 << r;
    let mut extension_total = 0u128;
    let mut matchings = 0u128;
    let _ = visit_matchings(g, r, |ids| {
        let m = Matching::from_ids(g, ids).unwrap();
        let ext = extensions_of_matching(g, &m, r, None).unwrap().len() as u128;
        assert!(ext <= cap);
        extension_total += ext;
        matchings += 1;
        std::ops::ControlFlow::Continue(())
    });
    let m = g.m() as u64;
    assert!(copies <= extension_total);
    assert!(extension_total <= cap * matchings);
    assert!(BigUint::from(cap * matchings) <= copy_count_upper_bound(m, r as u64, 2));
    assert!(copy_count_upper_bound(m, r as u64, 2) <= relaxed_graph_bound(m, r as u64));
}

#[test]
fn bound_chain_on_corpus() {
    for g in graph_corpus(500, 16) {
        bound_chain(&g, 2);
    }
}

#[test]
fn every_copy_is_an_extension_of_each_transversal_matching() {
    for g in graph_corpus(150, 17) {
        for c in enumerate_copies(&g, 2, None).unwrap() {
            let matching = c.transversal_matching().unwrap();
            let m = Matching::new(&g, matching).unwrap();
            let ext = extensions_of_matching(&g, &m, 2, None).unwrap();
            let ids = c.edge_ids(&g).unwrap();
            assert!(ext.iter().any(|e| e.edge_ids(&g).unwrap() == ids));
        }
    }
}

#[test]
fn hypergraph_copy_bound_holds() {
    let mut rng = rng(18);
    for _ in 0..40 {
        let g = random_hypergraph(&mut rng, 3, 7, 0.7);
        let copies = count_copies(&g, 2, None).unwrap();
        assert!(BigUint::from(copies) <= copy_count_upper_bound(g.m() as u64, 2, 3));
    }
}

fn arb_graph() -> impl Strategy<Value = kfree_core::Hypergraph> {
    (4usize..=9)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec(any::<bool>(), n * (n - 1) / 2)))
        .prop_map(|(n, bits)| {
            let mut edges = Vec::new();
            let mut i = 0;
            for u in 0..n as u32 {
                for v in u + 1..n as u32 {
                    if bits[i] {
                        edges.push(vec![u, v]);
                    }
                    i += 1;
                }
            }
            kfree_core::Hypergraph::new(2, n, edges).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn prop_count_matches_brute(g in arb_graph()) {
        prop_assert_eq!(count_copies(&g, 2, None).unwrap(), brute_count(&g, 2));
    }

    #[test]
    fn prop_bound_chain(g in arb_graph(), r in 2usize..=3) {
        bound_chain(&g, r);
    }

    #[test]
    fn prop_counts_are_monotone_under_edge_removal(g in arb_graph(), drop in any::<prop::sample::Index>()) {
        prop_assume!(g.m() > 0);
        let id = drop.index(g.m());
        let smaller = kfree_core::Hypergraph::new(
            2,
            g.n(),
            g.edges().iter().enumerate().filter(|(i, _)| *i != id).map(|(_, e)| e.clone()),
        ).unwrap();
        prop_assert!(count_copies(&smaller, 2, None).unwrap() <= count_copies(&g, 2, None).unwrap());
    }
}
