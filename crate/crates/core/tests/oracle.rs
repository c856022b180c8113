mod support;

use kfree_core::{
    complete_bipartite, complete_multipartite, extract_free_subgraph, f_lower_report, is_free,
    max_free_subgraph, EdgeSubset, ExtractOptions, Hypergraph, PartitionSpec, PatternSpec, ReportOptions,
    Vertex,
};
use proptest::prelude::*;
use rand::Rng;
use support::*;

const BUDGET: u64 = 5_000_000;

/// Oriented `K_{r,s}` copies (r-side in `U`) as edge masks.
fn oriented_masks(g: &Hypergraph, spec: &PartitionSpec, r: usize, s: usize) -> Vec<u64> {
    let mut out = Vec::new();
    for a in subsets(spec.part(0), r) {
        for b in subsets(spec.part(1), s) {
            let ids: Option<Vec<usize>> = a
                .iter()
                .flat_map(|&u| b.iter().map(move |&w| g.find_edge(&[u, w])))
                .collect();
            if let Some(ids) = ids {
                out.push(ids.iter().fold(0u64, |m, &i| m | 1 << i));
            }
        }
    }
    out
}

/// Anchored `K^{(k)}_{r..r}` copies as edge masks.
fn anchored_masks(g: &Hypergraph, spec: &PartitionSpec, r: usize) -> Vec<u64> {
    let choices: Vec<Vec<Vec<Vertex>>> = spec.parts().iter().map(|p| subsets(p, r)).collect();
    let mut picks: Vec<Vec<&Vec<Vertex>>> = vec![Vec::new()];
    for c in &choices {
        picks = picks
            .iter()
            .flat_map(|p| c.iter().map(move |s| [p.as_slice(), &[s]].concat()))
            .collect();
    }
    let mut out = Vec::new();
    for pick in picks {
        let mut tuples: Vec<Vec<Vertex>> = vec![Vec::new()];
        for set in &pick {
            tuples = tuples
                .iter()
                .flat_map(|t| set.iter().map(move |&v| [t.as_slice(), &[v]].concat()))
                .collect();
        }
        let ids: Option<Vec<usize>> = tuples.iter().map(|t| g.find_edge(t)).collect();
        if let Some(ids) = ids {
            out.push(ids.iter().fold(0u64, |m, &i| m | 1 << i));
        }
    }
    out
}

fn check_witness(g: &Hypergraph, pattern: &PatternSpec, spec: Option<&PartitionSpec>) -> usize {
    let res = max_free_subgraph(g, pattern, spec, BUDGET).unwrap();
    assert!(res.proved_optimal);
    assert_eq!(res.witness.len(), res.optimum);
    assert!(is_free(g, Some(&res.witness), pattern, spec).unwrap().free);
    res.optimum
}

#[test]
fn unordered_krr_matches_exhaustive_search() {
    let pattern = PatternSpec::krr(2).unwrap();
    for g in graph_corpus(400, 31).into_iter().filter(|g| g.m() <= 16) {
        let opt = check_witness(&g, &pattern, None);
        assert_eq!(
            opt,
            brute_max_free(g.m(), &brute_copy_masks(&g, 2)),
            "{}",
            g.to_text()
        );
    }
}

#[test]
fn oriented_krs_matches_exhaustive_search() {
    let mut rng = rng(32);
    for (u, w, r, s) in [
        (3, 4, 2, 2),
        (2, 6, 2, 3),
        (3, 5, 2, 3),
        (4, 4, 2, 2),
        (3, 4, 3, 2),
    ] {
        for _ in 0..6 {
            let density = rng.random_range(0.5..=1.0);
            let (g, spec) = random_partite(&mut rng, &[u, w], density);
            if g.m() > 16 {
                continue;
            }
            let pattern = PatternSpec::krs_oriented(r.min(s), r.max(s)).unwrap();
            // the oriented pattern puts its smaller side in U
            let masks = oriented_masks(&g, &spec, r.min(s), r.max(s));
            assert_eq!(
                check_witness(&g, &pattern, Some(&spec)),
                brute_max_free(g.m(), &masks)
            );
        }
    }
}

#[test]
fn multipartite_matches_exhaustive_search() {
    let mut rng = rng(33);
    for sizes in [vec![2, 2, 3], vec![2, 2, 4], vec![2, 3, 2]] {
        for _ in 0..6 {
            let density = rng.random_range(0.6..=1.0);
            let (g, spec) = random_partite(&mut rng, &sizes, density);
            let pattern = PatternSpec::multipartite(2, 3).unwrap();
            let masks = anchored_masks(&g, &spec, 2);
            assert_eq!(
                check_witness(&g, &pattern, Some(&spec)),
                brute_max_free(g.m(), &masks)
            );
        }
    }
}

#[test]
fn known_zarankiewicz_values() {
    let pattern = PatternSpec::krs_oriented(2, 2).unwrap();
    for (u, w, z) in [(2, 2, 3), (3, 3, 6), (4, 4, 9), (3, 9, 12), (4, 5, 10)] {
        let (g, spec) = complete_bipartite(u, w);
        assert_eq!(check_witness(&g, &pattern, Some(&spec)), z, "z({u},{w};2,2)");
    }
}

#[test]
fn budget_exhaustion_is_reported() {
    let (g, spec) = complete_bipartite(4, 16);
    let res = max_free_subgraph(&g, &PatternSpec::krs_oriented(2, 2).unwrap(), Some(&spec), 1_000).unwrap();
    assert!(!res.proved_optimal);
    assert_eq!(res.witness.len(), res.optimum);
    assert!(
        is_free(
            &g,
            Some(&res.witness),
            &PatternSpec::krs_oriented(2, 2).unwrap(),
            Some(&spec)
        )
        .unwrap()
        .free
    );
}

#[test]
fn extraction_never_beats_the_oracle() {
    let pattern = PatternSpec::krr(2).unwrap();
    for g in graph_corpus(120, 34).into_iter().filter(|g| g.m() <= 16) {
        let opt = check_witness(&g, &pattern, None);
        for seed in 0..10 {
            let (_, rep) = extract_free_subgraph(&g, 2, seed, None, ExtractOptions::default()).unwrap();
            assert!(rep.final_size <= opt);
        }
    }
}

#[test]
fn report_sandwich() {
    let (g, spec) = complete_bipartite(3, 9);
    let pattern = PatternSpec::krs_oriented(2, 2).unwrap();
    let rep = f_lower_report(&g, &pattern, Some(&spec), ReportOptions::default()).unwrap();
    assert!(rep.oracle_certified);
    assert_eq!(rep.oracle_optimum, Some(12));
    assert!(rep.best_of_trials <= 12);
    assert!(rep.mean_of_trials <= rep.best_of_trials as f64);
}

#[test]
fn either_orientation_is_at_most_oriented() {
    let mut rng = rng(35);
    for _ in 0..10 {
        let (g, spec) = random_partite(&mut rng, &[3, 4], 0.8);
        let one = check_witness(&g, &PatternSpec::krs_oriented(2, 3).unwrap(), Some(&spec));
        let both = check_witness(&g, &PatternSpec::krs_either(2, 3).unwrap(), Some(&spec));
        assert!(both <= one);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn prop_oracle_is_monotone(bits in proptest::collection::vec(any::<bool>(), 12), extra in 0usize..12) {
        let (host, spec) = complete_bipartite(3, 4);
        let pattern = PatternSpec::krs_oriented(2, 2).unwrap();
        let base = EdgeSubset::from_ids(&host, (0..12).filter(|&i| bits[i] && i != extra)).unwrap();
        let mut grown = base.clone();
        grown.insert(extra);
        let (g0, _) = host.restrict(&base).unwrap();
        let (g1, _) = host.restrict(&grown).unwrap();
        let a = max_free_subgraph(&g0, &pattern, Some(&spec), BUDGET).unwrap().optimum;
        let b = max_free_subgraph(&g1, &pattern, Some(&spec), BUDGET).unwrap().optimum;
        prop_assert!(a <= b && b <= a + 1);
    }

    #[test]
    fn prop_oracle_matches_exhaustive(bits in proptest::collection::vec(any::<bool>(), 15)) {
        let all: Vec<Vec<Vertex>> = subsets(&[0, 1, 2, 3, 4, 5], 2);
        let g = Hypergraph::new(2, 6, all.into_iter().zip(bits).filter(|(_, b)| *b).map(|(e, _)| e)).unwrap();
        let opt = check_witness(&g, &PatternSpec::krr(2).unwrap(), None);
        prop_assert_eq!(opt, brute_max_free(g.m(), &brute_copy_masks(&g, 2)));
    }
}

#[test]
fn hypergraph_hosts_from_builders() {
    let (g, spec) = complete_multipartite(&[2, 2, 2]);
    assert_eq!(
        check_witness(&g, &PatternSpec::multipartite(2, 3).unwrap(), Some(&spec)),
        7
    );
}
