//! Independent brute-force oracles and a seeded corpus of small hosts.
//!
//! Nothing here calls the enumeration code under test: copies are found by
//! trying every choice of vertex sets against an adjacency lookup.

#![allow(dead_code)]

use std::collections::HashSet;

use kfree_core::{complete_multipartite, Hypergraph, PartitionSpec, Vertex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn subsets(items: &[Vertex], r: usize) -> Vec<Vec<Vertex>> {
    if r == 0 {
        return vec![Vec::new()];
    }
    if items.len() < r {
        return Vec::new();
    }
    let mut with_first: Vec<Vec<Vertex>> = subsets(&items[1..], r - 1)
        .into_iter()
        .map(|t| [&items[..1], t.as_slice()].concat())
        .collect();
    with_first.extend(subsets(&items[1..], r));
    with_first
}

fn edge_set(g: &Hypergraph) -> HashSet<Vec<Vertex>> {
    g.edges().iter().cloned().collect()
}

fn product(sets: &[&Vec<Vertex>]) -> Vec<Vec<Vertex>> {
    let mut acc = vec![Vec::new()];
    for set in sets {
        acc = acc
            .iter()
            .flat_map(|t| {
                set.iter().map(move |&v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    acc
}

fn all_transversals_present(edges: &HashSet<Vec<Vertex>>, parts: &[&Vec<Vertex>]) -> bool {
    product(parts).into_iter().all(|mut e| {
        e.sort_unstable();
        edges.contains(&e)
    })
}

fn disjoint(sets: &[&Vec<Vertex>]) -> bool {
    let mut seen = HashSet::new();
    sets.iter().all(|s| s.iter().all(|v| seen.insert(*v)))
}

/// Unordered copies of `K^{(k)}_{r,...,r}` as edge-id bitmasks (`m <= 64`),
/// found by trying every increasing `k`-tuple of `r`-subsets.
pub fn brute_copy_masks(g: &Hypergraph, r: usize) -> Vec<u64> {
    let edges = edge_set(g);
    let all: Vec<Vertex> = (0..g.n() as Vertex).collect();
    let subs = subsets(&all, r);
    let k = g.k();
    let mut out = Vec::new();
    let mut pick = Vec::with_capacity(k);
    fn go(
        g: &Hypergraph,
        subs: &[Vec<Vertex>],
        edges: &HashSet<Vec<Vertex>>,
        k: usize,
        start: usize,
        pick: &mut Vec<usize>,
        out: &mut Vec<u64>,
    ) {
        if pick.len() == k {
            let parts: Vec<&Vec<Vertex>> = pick.iter().map(|&i| &subs[i]).collect();
            if disjoint(&parts) && all_transversals_present(edges, &parts) {
                let mut mask = 0u64;
                for mut e in product(&parts) {
                    e.sort_unstable();
                    mask |= 1 << g.edge_id(&e).unwrap();
                }
                out.push(mask);
            }
            return;
        }
        for i in start..subs.len() {
            pick.push(i);
            go(g, subs, edges, k, i + 1, pick, out);
            pick.pop();
        }
    }
    go(g, &subs, &edges, k, 0, &mut pick, &mut out);
    out
}

/// Number of unordered copies; works for any `m`.
pub fn brute_count(g: &Hypergraph, r: usize) -> u128 {
    let edges = edge_set(g);
    let all: Vec<Vertex> = (0..g.n() as Vertex).collect();
    let subs = subsets(&all, r);
    let k = g.k();
    let mut total = 0u128;
    let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new())];
    while let Some((start, pick)) = stack.pop() {
        if pick.len() == k {
            let parts: Vec<&Vec<Vertex>> = pick.iter().map(|&i| &subs[i]).collect();
            if disjoint(&parts) && all_transversals_present(&edges, &parts) {
                total += 1;
            }
            continue;
        }
        for i in start..subs.len() {
            let mut next = pick.clone();
            next.push(i);
            stack.push((i + 1, next));
        }
    }
    total
}

/// Copies with part `i` inside `U_i`.
pub fn brute_count_anchored(g: &Hypergraph, spec: &PartitionSpec, r: usize) -> u128 {
    let edges = edge_set(g);
    let choices: Vec<Vec<Vec<Vertex>>> = spec.parts().iter().map(|p| subsets(p, r)).collect();
    let mut total = 0u128;
    let mut idx = vec![0usize; choices.len()];
    if choices.iter().any(Vec::is_empty) {
        return 0;
    }
    loop {
        let parts: Vec<&Vec<Vertex>> = idx.iter().enumerate().map(|(i, &j)| &choices[i][j]).collect();
        if all_transversals_present(&edges, &parts) {
            total += 1;
        }
        let mut i = 0;
        while i < idx.len() {
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == idx.len() {
            return total;
        }
    }
}

/// Whether some `r`-set of `U` and `s`-set of `W` span a complete bipartite graph.
pub fn brute_contains_oriented(g: &Hypergraph, spec: &PartitionSpec, r: usize, s: usize) -> bool {
    let edges = edge_set(g);
    let us = subsets(spec.part(0), r);
    let ws = subsets(spec.part(1), s);
    us.iter()
        .any(|a| ws.iter().any(|b| all_transversals_present(&edges, &[a, b])))
}

pub fn brute_matchings(g: &Hypergraph, r: usize) -> u128 {
    let ids: Vec<Vertex> = (0..g.m() as Vertex).collect();
    let mut total = 0;
    let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new())];
    while let Some((start, pick)) = stack.pop() {
        if pick.len() == r {
            let mut seen = HashSet::new();
            if pick.iter().all(|&i| g.edge(i).iter().all(|v| seen.insert(*v))) {
                total += 1;
            }
            continue;
        }
        for &i in &ids[start..] {
            let mut next = pick.clone();
            next.push(i as usize);
            stack.push((i as usize + 1, next));
        }
    }
    total
}

/// Largest edge mask containing none of `copies`, by trying all `2^m` masks.
pub fn brute_max_free(m: usize, copies: &[u64]) -> usize {
    assert!(m <= 24, "exhaustive search is limited to small hosts");
    (0u64..(1 << m))
        .filter(|mask| copies.iter().all(|c| mask & c != *c))
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

pub fn random_graph<R: Rng>(rng: &mut R, n: usize, density: f64) -> Hypergraph {
    let mut edges = Vec::new();
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            if rng.random_bool(density) {
                edges.push(vec![u, v]);
            }
        }
    }
    Hypergraph::new(2, n, edges).unwrap()
}

pub fn random_hypergraph<R: Rng>(rng: &mut R, k: usize, n: usize, density: f64) -> Hypergraph {
    let all: Vec<Vertex> = (0..n as Vertex).collect();
    let edges = subsets(&all, k).into_iter().filter(|_| rng.random_bool(density));
    Hypergraph::new(k, n, edges).unwrap()
}

/// Random subgraph of the complete multipartite host with the given part sizes.
pub fn random_partite<R: Rng>(rng: &mut R, sizes: &[usize], density: f64) -> (Hypergraph, PartitionSpec) {
    let (host, spec) = complete_multipartite(sizes);
    let edges: Vec<Vec<Vertex>> = host
        .edges()
        .iter()
        .filter(|_| rng.random_bool(density))
        .cloned()
        .collect();
    (Hypergraph::new(host.k(), host.n(), edges).unwrap(), spec)
}

/// 500+ graphs on at most 10 vertices across the density range.
pub fn graph_corpus(count: usize, seed: u64) -> Vec<Hypergraph> {
    let mut rng = rng(seed);
    (0..count)
        .map(|i| {
            let n = 2 + i % 9;
            let density = (i % 11) as f64 / 10.0;
            random_graph(&mut rng, n, density.min(1.0))
        })
        .collect()
}
