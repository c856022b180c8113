//! k-uniform hypergraphs over dense integer vertices.
//!
//! Edges are stored sorted ascending and the edge list itself is kept in
//! lexicographic order, so an edge id is also its lexicographic rank.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use fixedbitset::FixedBitSet;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type Vertex = u32;

/// A canonical (sorted, duplicate-free) vertex set of size `k`.
pub type Edge = Vec<Vertex>;

#[derive(Clone, Debug)]
pub struct Hypergraph {
    k: usize,
    n: usize,
    edges: Vec<Edge>,
    index: HashMap<Edge, usize>,
}

impl PartialEq for Hypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.n == other.n && self.edges == other.edges
    }
}

impl Eq for Hypergraph {}

impl Hypergraph {
    /// Builds a `k`-uniform hypergraph on `0..n`. Edges are canonicalized and
    /// duplicates are merged.
    pub fn new<I>(k: usize, n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut list = Vec::new();
        for mut e in edges {
            e.sort_unstable();
            if e.len() != k {
                return Err(Error::InvalidEdge {
                    reason: format!("expected {k} vertices, found {}", e.len()),
                    edge: e,
                });
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidEdge {
                    edge: e,
                    reason: "repeated vertex".into(),
                });
            }
            if let Some(&v) = e.iter().find(|&&v| v as usize >= n) {
                return Err(Error::InvalidEdge {
                    reason: format!("vertex {v} outside 0..{n}"),
                    edge: e,
                });
            }
            list.push(e);
        }
        Ok(Self::from_canonical(k, n, list))
    }

    pub fn empty(k: usize, n: usize) -> Self {
        Self::from_canonical(k, n, Vec::new())
    }

    /// Edges must already be sorted and valid; the list is sorted and deduped here.
    pub(crate) fn from_canonical(k: usize, n: usize, mut edges: Vec<Edge>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let index = edges.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        Self { k, n, edges, index }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &[Vertex] {
        &self.edges[id]
    }

    /// Id of a canonical (sorted) edge.
    pub fn edge_id(&self, sorted: &[Vertex]) -> Option<usize> {
        self.index.get(sorted).copied()
    }

    /// Id of an edge given in any vertex order.
    pub fn find_edge(&self, vertices: &[Vertex]) -> Option<usize> {
        let mut e = vertices.to_vec();
        e.sort_unstable();
        self.edge_id(&e)
    }

    pub fn contains_edge(&self, vertices: &[Vertex]) -> bool {
        self.find_edge(vertices).is_some()
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.edges.iter().filter(|e| e.contains(&v)).count()
    }

    /// Stable identity of the edge set, used to tie [`EdgeSubset`]s to their host.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.k.hash(&mut h);
        self.n.hash(&mut h);
        self.edges.hash(&mut h);
        h.finish()
    }

    /// Adjacency rows for a graph (`k = 2`).
    pub fn adjacency(&self) -> Vec<FixedBitSet> {
        debug_assert_eq!(self.k, 2);
        let mut rows = vec![FixedBitSet::with_capacity(self.n); self.n];
        for e in &self.edges {
            rows[e[0] as usize].insert(e[1] as usize);
            rows[e[1] as usize].insert(e[0] as usize);
        }
        rows
    }

    /// The sub-hypergraph on the same vertex set with the member edges of `subset`,
    /// plus the host id of every edge of the result (indexed by the result's edge id).
    pub fn restrict(&self, subset: &EdgeSubset) -> Result<(Hypergraph, Vec<usize>)> {
        subset.check_host(self)?;
        let ids: Vec<usize> = subset.ids().collect();
        let edges = ids.iter().map(|&i| self.edges[i].clone()).collect();
        // host ids are ascending and host edges are sorted, so order is preserved
        Ok((Self::from_canonical(self.k, self.n, edges), ids))
    }

    /// Parses the text format: a header line `k n m` followed by `m` edge lines.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let fields = parse_numbers::<usize>(header, line_no)?;
        let [k, n, m] = fields[..] else {
            return Err(Error::Parse {
                line: line_no,
                msg: "header must be `k n m`".into(),
            });
        };
        let mut edges = Vec::with_capacity(m);
        for (line_no, line) in lines {
            let e = parse_numbers::<Vertex>(line, line_no)?;
            if e.len() != k {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected {k} vertices, found {}", e.len()),
                });
            }
            edges.push(e);
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        let g = Self::new(k, n, edges)?;
        if g.m() != m {
            return Err(Error::Parse {
                line: 1,
                msg: "duplicate edges".into(),
            });
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.k, self.n, self.m());
        for e in &self.edges {
            write_joined(&mut out, e);
        }
        out
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_numbers<T: std::str::FromStr>(line: &str, line_no: usize) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("not a non-negative integer: {tok:?}"),
            })
        })
        .collect()
}

fn write_joined(out: &mut String, vs: &[Vertex]) {
    for (i, v) in vs.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{v}");
    }
    out.push('\n');
}

/// Ordered disjoint parts `U_1..U_k` covering `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSpec {
    parts: Vec<Vec<Vertex>>,
    part_of: Vec<usize>,
}

impl PartitionSpec {
    pub fn new(n: usize, parts: Vec<Vec<Vertex>>) -> Result<Self> {
        let mut part_of = vec![usize::MAX; n];
        let mut sorted = Vec::with_capacity(parts.len());
        for (i, mut part) in parts.into_iter().enumerate() {
            part.sort_unstable();
            for &v in &part {
                let slot = part_of
                    .get_mut(v as usize)
                    .ok_or_else(|| Error::InvalidPartition(format!("vertex {v} outside 0..{n}")))?;
                if *slot != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "vertex {v} appears in more than one part"
                    )));
                }
                *slot = i;
            }
            sorted.push(part);
        }
        if let Some(v) = part_of.iter().position(|&p| p == usize::MAX) {
            return Err(Error::InvalidPartition(format!("vertex {v} is in no part")));
        }
        Ok(Self {
            parts: sorted,
            part_of,
        })
    }

    /// Consecutive parts of the given sizes: `U_1 = 0..s_1`, `U_2 = s_1..s_1+s_2`, ...
    pub fn consecutive(sizes: &[usize]) -> Self {
        let mut parts = Vec::with_capacity(sizes.len());
        let mut part_of = Vec::with_capacity(sizes.iter().sum());
        let mut next: Vertex = 0;
        for (i, &s) in sizes.iter().enumerate() {
            parts.push((next..next + s as Vertex).collect());
            part_of.extend(std::iter::repeat_n(i, s));
            next += s as Vertex;
        }
        Self { parts, part_of }
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn n(&self) -> usize {
        self.part_of.len()
    }

    pub fn parts(&self) -> &[Vec<Vertex>] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> &[Vertex] {
        &self.parts[i]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }

    pub fn part_of(&self, v: Vertex) -> usize {
        self.part_of[v as usize]
    }

    /// Checks that `g` lives on the same vertex set and that every edge
    /// meets every part exactly once.
    pub fn check_partite(&self, g: &Hypergraph) -> Result<()> {
        if g.n() != self.n() {
            return Err(Error::NotPartite(format!(
                "host has {} vertices, partition covers {}",
                g.n(),
                self.n()
            )));
        }
        if g.k() != self.k() {
            return Err(Error::NotPartite(format!(
                "host is {}-uniform but partition has {} parts",
                g.k(),
                self.k()
            )));
        }
        let mut seen = vec![false; self.k()];
        for e in g.edges() {
            seen.iter_mut().for_each(|s| *s = false);
            for &v in e {
                let p = self.part_of(v);
                if std::mem::replace(&mut seen[p], true) {
                    return Err(Error::NotPartite(format!(
                        "edge {e:?} meets part {} twice",
                        p + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Parses `k` lines of space-separated vertices.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let parts = content_lines(text)
            .map(|(no, l)| parse_numbers::<Vertex>(l, no))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, parts)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for part in &self.parts {
            write_joined(&mut out, part);
        }
        out
    }
}

/// A subset of a host's edges, stored as a bitset over host edge ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSubset {
    host: u64,
    members: FixedBitSet,
}

impl EdgeSubset {
    pub fn empty(host: &Hypergraph) -> Self {
        Self {
            host: host.fingerprint(),
            members: FixedBitSet::with_capacity(host.m()),
        }
    }

    pub fn full(host: &Hypergraph) -> Self {
        let mut s = Self::empty(host);
        s.members.insert_range(..);
        s
    }

    pub fn from_ids<I: IntoIterator<Item = usize>>(host: &Hypergraph, ids: I) -> Result<Self> {
        let mut s = Self::empty(host);
        for id in ids {
            if id >= host.m() {
                return Err(Error::ForeignSubset);
            }
            s.members.insert(id);
        }
        Ok(s)
    }

    /// Looks every edge up in the host; fails if one is missing.
    pub fn from_edges<I: IntoIterator<Item = Edge>>(host: &Hypergraph, edges: I) -> Result<Self> {
        let mut s = Self::empty(host);
        for e in edges {
            let id = host.find_edge(&e).ok_or_else(|| Error::InvalidEdge {
                edge: e.clone(),
                reason: "not an edge of the host".into(),
            })?;
            s.members.insert(id);
        }
        Ok(s)
    }

    pub fn belongs_to(&self, host: &Hypergraph) -> bool {
        self.host == host.fingerprint() && self.members.len() == host.m()
    }

    pub(crate) fn check_host(&self, host: &Hypergraph) -> Result<()> {
        if self.belongs_to(host) {
            Ok(())
        } else {
            Err(Error::ForeignSubset)
        }
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.members.contains(id)
    }

    pub fn insert(&mut self, id: usize) {
        self.members.insert(id);
    }

    pub fn remove(&mut self, id: usize) {
        self.members.set(id, false);
    }

    pub fn is_subset(&self, other: &EdgeSubset) -> bool {
        self.host == other.host && self.members.is_subset(&other.members)
    }

    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    pub fn edges<'a>(&'a self, host: &'a Hypergraph) -> impl Iterator<Item = &'a [Vertex]> + 'a {
        self.ids().map(move |i| host.edge(i))
    }
}

/// `K_{n_u, n_w}` with `U = 0..n_u` first and `W` second.
pub fn complete_bipartite(n_u: usize, n_w: usize) -> (Hypergraph, PartitionSpec) {
    complete_multipartite(&[n_u, n_w])
}

/// Complete `k`-partite `k`-graph: every transversal of the parts is an edge.
pub fn complete_multipartite(sizes: &[usize]) -> (Hypergraph, PartitionSpec) {
    assert!(!sizes.is_empty(), "at least one part is required");
    let spec = PartitionSpec::consecutive(sizes);
    let mut edges: Vec<Edge> = vec![Vec::with_capacity(sizes.len())];
    for part in spec.parts() {
        edges = edges
            .iter()
            .flat_map(|prefix| {
                part.iter().map(move |&v| {
                    let mut e = prefix.clone();
                    e.push(v);
                    e
                })
            })
            .collect();
    }
    // parts are consecutive ranges, so transversals are already sorted
    let g = Hypergraph::from_canonical(sizes.len(), spec.n(), edges);
    (g, spec)
}

/// The `(k-1)`-graph of sets completing `x` to an edge. Vertex ids are unchanged.
pub fn link(g: &Hypergraph, spec: &PartitionSpec, x: Vertex) -> Result<Hypergraph> {
    if g.k() < 2 {
        return Err(Error::Domain("link needs k >= 2".into()));
    }
    spec.check_partite(g)?;
    if (x as usize) >= spec.n() || spec.part_of(x) != spec.k() - 1 {
        return Err(Error::NotInLastPart(x));
    }
    let edges = g
        .edges()
        .iter()
        .filter(|e| e.contains(&x))
        .map(|e| e.iter().copied().filter(|&v| v != x).collect())
        .collect();
    Ok(Hypergraph::from_canonical(g.k() - 1, g.n(), edges))
}

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn sample_with<R: Rng>(g: &Hypergraph, p: f64, rng: &mut R) -> EdgeSubset {
    let mut s = EdgeSubset::empty(g);
    for id in 0..g.m() {
        if rng.random_bool(p) {
            s.insert(id);
        }
    }
    s
}

/// Keeps each edge independently with probability `p`. The same
/// `(g, p, seed)` always yields the same subset.
pub fn bernoulli_edge_sample(g: &Hypergraph, p: f64, seed: u64) -> Result<EdgeSubset> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(sample_with(g, p, &mut rng_from_seed(seed)))
}
