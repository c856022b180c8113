//! Shared fixtures for the criterion benches.

use kfree_core::{build_construction, Hypergraph, PartitionSpec};

pub struct Fixture {
    pub name: &'static str,
    pub host: Hypergraph,
    pub spec: PartitionSpec,
}

/// Complete construction hosts of increasing size.
pub fn constructions() -> Vec<Fixture> {
    [("k2_n3", 3, 2), ("k2_n4", 4, 2), ("k2_n6", 6, 2), ("k3_n2", 2, 3)]
        .into_iter()
        .map(|(name, n, k)| {
            let (host, spec, _) = build_construction(n, 2, k).expect("small construction");
            Fixture { name, host, spec }
        })
        .collect()
}
