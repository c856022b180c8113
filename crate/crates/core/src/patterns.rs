//! Copies of `K_{r,r}` / `K^{(k)}_{r,...,r}` and `r`-edge matchings.
//!
//! Three enumeration routes share one visitor interface:
//!
//! * anchored: a partition is given and part `i` of every copy lies in `U_i`.
//!   Candidate last-part vertices are narrowed by AND-ing bitsets of vertices
//!   completing each partial transversal, so the leaf candidate set is exactly
//!   the set counted by `d(S)`.
//! * graphs without a partition: `r`-sets `A` are grown by intersecting
//!   adjacency rows; `B` ranges over `r`-subsets of the common neighbourhood
//!   above `min(A)`, so each unordered copy `{A, B}` is seen once.
//! * hypergraphs without a partition: parts are grown vertex by vertex and
//!   every partial transversal must lie inside some edge.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_traits::pow;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{Edge, Hypergraph, PartitionSpec, Vertex};
use crate::numeric::{binomial, binomial_u128, factorial};

/// One embedded copy: disjoint vertex sets with every transversal an edge.
///
/// Unanchored copies list their parts by increasing minimum vertex; anchored
/// copies list part `i` inside `U_i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PatternCopy {
    parts: Vec<Vec<Vertex>>,
}

impl PatternCopy {
    /// Keeps the part order, sorting inside each part.
    pub fn anchored(mut parts: Vec<Vec<Vertex>>) -> Self {
        parts.iter_mut().for_each(|p| p.sort_unstable());
        Self { parts }
    }

    /// Sorts inside each part and orders parts by their minimum.
    pub fn unordered(parts: Vec<Vec<Vertex>>) -> Self {
        let mut c = Self::anchored(parts);
        c.parts.sort_unstable();
        c
    }

    pub fn parts(&self) -> &[Vec<Vertex>] {
        &self.parts
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        let mut vs: Vec<Vertex> = self.parts.concat();
        vs.sort_unstable();
        vs
    }

    /// All transversal edges, each sorted.
    pub fn transversals(&self) -> Vec<Edge> {
        let refs: Vec<&[Vertex]> = self.parts.iter().map(Vec::as_slice).collect();
        let mut out = Vec::new();
        for_each_tuple(&refs, &mut Vec::new(), &mut |t| {
            let mut e = t.to_vec();
            e.sort_unstable();
            out.push(e);
        });
        out
    }

    /// Host edge ids of the transversals, sorted; `None` if one is missing.
    pub fn edge_ids(&self, g: &Hypergraph) -> Option<Vec<usize>> {
        let mut ids = self
            .transversals()
            .iter()
            .map(|e| g.edge_id(e))
            .collect::<Option<Vec<_>>>()?;
        ids.sort_unstable();
        Some(ids)
    }

    /// The matching pairing the `j`-th vertex of every part. Needs equal part sizes.
    pub fn transversal_matching(&self) -> Option<Vec<Edge>> {
        let r = self.parts.first()?.len();
        if self.parts.iter().any(|p| p.len() != r) {
            return None;
        }
        Some(
            (0..r)
                .map(|j| {
                    let mut e: Edge = self.parts.iter().map(|p| p[j]).collect();
                    e.sort_unstable();
                    e
                })
                .collect(),
        )
    }
}

/// `r` pairwise vertex-disjoint edges of a host.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    edges: Vec<Edge>,
}

impl Matching {
    pub fn new(g: &Hypergraph, edges: Vec<Edge>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut canon = Vec::with_capacity(edges.len());
        for mut e in edges {
            e.sort_unstable();
            if g.edge_id(&e).is_none() {
                return Err(Error::InvalidMatching(format!("{e:?} is not an edge")));
            }
            if !e.iter().all(|v| seen.insert(*v)) {
                return Err(Error::InvalidMatching(format!(
                    "{e:?} shares a vertex with another edge"
                )));
            }
            canon.push(e);
        }
        canon.sort_unstable();
        Ok(Self { edges: canon })
    }

    pub fn from_ids(g: &Hypergraph, ids: &[usize]) -> Result<Self> {
        Self::new(g, ids.iter().map(|&i| g.edge(i).to_vec()).collect())
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

fn for_each_tuple<F: FnMut(&[Vertex])>(parts: &[&[Vertex]], buf: &mut Vec<Vertex>, f: &mut F) {
    match parts.split_first() {
        None => f(buf),
        Some((head, rest)) => {
            for &v in head.iter() {
                buf.push(v);
                for_each_tuple(rest, buf, f);
                buf.pop();
            }
        }
    }
}

/// Calls `f` with every `r`-subset of `items` in lexicographic order.
pub(crate) fn for_each_subset<F>(items: &[Vertex], r: usize, f: &mut F) -> ControlFlow<()>
where
    F: FnMut(&[Vertex]) -> ControlFlow<()>,
{
    fn go<F>(items: &[Vertex], r: usize, start: usize, buf: &mut Vec<Vertex>, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[Vertex]) -> ControlFlow<()>,
    {
        if buf.len() == r {
            return f(buf);
        }
        let need = r - buf.len();
        for i in start..items.len() {
            if items.len() - i < need {
                break;
            }
            buf.push(items[i]);
            go(items, r, i + 1, buf, f)?;
            buf.pop();
        }
        ControlFlow::Continue(())
    }
    go(items, r, 0, &mut Vec::with_capacity(r), f)
}

/// Visits every copy exactly once, stopping early when `f` breaks.
///
/// With a partition, `g` must be partite with respect to it and copies are
/// anchored to the parts. Without one, copies are unordered collections of
/// parts anywhere in `g`.
pub fn visit_copies<F>(
    g: &Hypergraph,
    r: usize,
    spec: Option<&PartitionSpec>,
    mut f: F,
) -> Result<ControlFlow<()>>
where
    F: FnMut(&PatternCopy) -> ControlFlow<()>,
{
    if r == 0 {
        return Err(Error::Domain("pattern part size r must be >= 1".into()));
    }
    if let Some(spec) = spec {
        spec.check_partite(g)?;
    }
    if r * g.k() > g.n() || g.m() == 0 {
        return Ok(ControlFlow::Continue(()));
    }
    let flow = match spec {
        Some(spec) => Anchored::new(g, spec, r).visit(&mut f),
        None if g.k() == 2 => GraphPairs::new(g, r).visit(&mut f),
        None => Unanchored::new(g, r).visit(&mut f),
    };
    Ok(flow)
}

/// All copies, materialized in visiting order.
pub fn enumerate_copies(g: &Hypergraph, r: usize, spec: Option<&PartitionSpec>) -> Result<Vec<PatternCopy>> {
    let mut out = Vec::new();
    let _ = visit_copies(g, r, spec, |c| {
        out.push(c.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Number of copies, without materializing them.
pub fn count_copies(g: &Hypergraph, r: usize, spec: Option<&PartitionSpec>) -> Result<u128> {
    if r == 0 {
        return Err(Error::Domain("pattern part size r must be >= 1".into()));
    }
    if let Some(spec) = spec {
        spec.check_partite(g)?;
    }
    if r * g.k() > g.n() || g.m() == 0 {
        return Ok(0);
    }
    Ok(match spec {
        Some(spec) => Anchored::new(g, spec, r).count(),
        None if g.k() == 2 => GraphPairs::new(g, r).count(),
        None => {
            let mut total = 0u128;
            let _ = Unanchored::new(g, r).visit(&mut |_| {
                total += 1;
                ControlFlow::Continue(())
            });
            total
        }
    })
}

fn choose(n: usize, r: usize) -> u128 {
    binomial_u128(n as u64, r as u64).expect("copy count overflows u128")
}

struct Anchored<'a> {
    r: usize,
    parts: &'a [Vec<Vertex>],
    last: &'a [Vertex],
    /// `levels[j]` maps a partial transversal over parts `0..=j` to the
    /// last-part positions that complete it to some edge.
    levels: Vec<HashMap<Vec<Vertex>, FixedBitSet>>,
    initial: FixedBitSet,
}

impl<'a> Anchored<'a> {
    fn new(g: &Hypergraph, spec: &'a PartitionSpec, r: usize) -> Self {
        let k = spec.k();
        let last = spec.part(k - 1);
        let width = last.len();
        let pos: HashMap<Vertex, usize> = last.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut levels: Vec<HashMap<Vec<Vertex>, FixedBitSet>> = vec![HashMap::new(); k - 1];
        let mut initial = FixedBitSet::with_capacity(width);
        let mut ordered = vec![0; k];
        for e in g.edges() {
            for &v in e {
                ordered[spec.part_of(v)] = v;
            }
            let x = pos[&ordered[k - 1]];
            initial.insert(x);
            for (j, level) in levels.iter_mut().enumerate() {
                level
                    .entry(ordered[..=j].to_vec())
                    .or_insert_with(|| FixedBitSet::with_capacity(width))
                    .insert(x);
            }
        }
        Self {
            r,
            parts: spec.parts(),
            last,
            levels,
            initial,
        }
    }

    /// Walks every family `S` of `r`-sets in parts `0..k-1` that survives
    /// pruning, calling `leaf` with `S` and its completing last-part set.
    fn walk<L>(&self, leaf: &mut L) -> ControlFlow<()>
    where
        L: FnMut(&[Vec<Vertex>], &FixedBitSet) -> ControlFlow<()>,
    {
        let mut chosen = vec![Vec::with_capacity(self.r); self.parts.len() - 1];
        self.grow(0, 0, &mut chosen, &self.initial, leaf)
    }

    fn grow<L>(
        &self,
        j: usize,
        start: usize,
        chosen: &mut Vec<Vec<Vertex>>,
        cand: &FixedBitSet,
        leaf: &mut L,
    ) -> ControlFlow<()>
    where
        L: FnMut(&[Vec<Vertex>], &FixedBitSet) -> ControlFlow<()>,
    {
        if cand.count_ones(..) < self.r {
            return ControlFlow::Continue(());
        }
        if j == chosen.len() {
            return leaf(chosen, cand);
        }
        if chosen[j].len() == self.r {
            return self.grow(j + 1, 0, chosen, cand, leaf);
        }
        let part = &self.parts[j];
        let need = self.r - chosen[j].len();
        for i in start..part.len() {
            if part.len() - i < need {
                break;
            }
            let v = part[i];
            let mut next = cand.clone();
            let prefix: Vec<&[Vertex]> = chosen[..j].iter().map(Vec::as_slice).collect();
            let mut alive = true;
            for_each_tuple(&prefix, &mut Vec::with_capacity(j + 1), &mut |t| {
                if !alive {
                    return;
                }
                let mut key = t.to_vec();
                key.push(v);
                match self.levels[j].get(&key) {
                    Some(bits) => next.intersect_with(bits),
                    None => alive = false,
                }
            });
            if !alive {
                continue;
            }
            chosen[j].push(v);
            let flow = self.grow(j, i + 1, chosen, &next, leaf);
            chosen[j].pop();
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn count(&self) -> u128 {
        let mut total = 0u128;
        let _ = self.walk(&mut |_, cand| {
            total += choose(cand.count_ones(..), self.r);
            ControlFlow::Continue(())
        });
        total
    }

    fn visit<F>(&self, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&PatternCopy) -> ControlFlow<()>,
    {
        self.walk(&mut |chosen, cand| {
            let xs: Vec<Vertex> = cand.ones().map(|i| self.last[i]).collect();
            for_each_subset(&xs, self.r, &mut |tail| {
                let mut parts = chosen.to_vec();
                parts.push(tail.to_vec());
                f(&PatternCopy { parts })
            })
        })
    }
}

struct GraphPairs {
    r: usize,
    n: usize,
    rows: Vec<FixedBitSet>,
}

impl GraphPairs {
    fn new(g: &Hypergraph, r: usize) -> Self {
        Self {
            r,
            n: g.n(),
            rows: g.adjacency(),
        }
    }

    /// Calls `leaf(A, C)` for every `r`-set `A` where `C` is the common
    /// neighbourhood of `A` above `min(A)` and `|C| >= r`.
    fn walk<L>(&self, leaf: &mut L) -> ControlFlow<()>
    where
        L: FnMut(&[Vertex], &FixedBitSet) -> ControlFlow<()>,
    {
        let mut a = Vec::with_capacity(self.r);
        for v in 0..self.n {
            if self.rows[v].count_ones(..) < self.r {
                continue;
            }
            let mut cand = self.rows[v].clone();
            cand.remove_range(..v + 1);
            a.push(v as Vertex);
            self.grow(v + 1, &mut a, &cand, leaf)?;
            a.pop();
        }
        ControlFlow::Continue(())
    }

    fn grow<L>(&self, start: usize, a: &mut Vec<Vertex>, cand: &FixedBitSet, leaf: &mut L) -> ControlFlow<()>
    where
        L: FnMut(&[Vertex], &FixedBitSet) -> ControlFlow<()>,
    {
        if cand.count_ones(..) < self.r {
            return ControlFlow::Continue(());
        }
        if a.len() == self.r {
            return leaf(a, cand);
        }
        for v in start..self.n {
            let mut next = cand.clone();
            next.intersect_with(&self.rows[v]);
            a.push(v as Vertex);
            let flow = self.grow(v + 1, a, &next, leaf);
            a.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn count(&self) -> u128 {
        let mut total = 0u128;
        let _ = self.walk(&mut |_, cand| {
            total += choose(cand.count_ones(..), self.r);
            ControlFlow::Continue(())
        });
        total
    }

    fn visit<F>(&self, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&PatternCopy) -> ControlFlow<()>,
    {
        self.walk(&mut |a, cand| {
            let bs: Vec<Vertex> = cand.ones().map(|v| v as Vertex).collect();
            for_each_subset(&bs, self.r, &mut |b| {
                f(&PatternCopy {
                    parts: vec![a.to_vec(), b.to_vec()],
                })
            })
        })
    }
}

struct Unanchored {
    r: usize,
    k: usize,
    n: usize,
    /// `shadows[j]`: sorted `(j+1)`-subsets of edges.
    shadows: Vec<HashSet<Vec<Vertex>>>,
}

impl Unanchored {
    fn new(g: &Hypergraph, r: usize) -> Self {
        let k = g.k();
        let mut shadows = vec![HashSet::new(); k];
        for e in g.edges() {
            for mask in 1u32..(1 << k) {
                let sub: Vec<Vertex> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| e[i]).collect();
                shadows[sub.len() - 1].insert(sub);
            }
        }
        Self {
            r,
            k,
            n: g.n(),
            shadows,
        }
    }

    fn visit<F>(&self, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&PatternCopy) -> ControlFlow<()>,
    {
        let mut parts = vec![Vec::with_capacity(self.r); self.k];
        let mut used = FixedBitSet::with_capacity(self.n);
        self.grow(0, &mut parts, &mut used, f)
    }

    fn extends(&self, parts: &[Vec<Vertex>], j: usize, v: Vertex) -> bool {
        let prefix: Vec<&[Vertex]> = parts[..j].iter().map(Vec::as_slice).collect();
        let mut ok = true;
        for_each_tuple(&prefix, &mut Vec::with_capacity(j + 1), &mut |t| {
            if ok {
                let mut key = t.to_vec();
                key.push(v);
                key.sort_unstable();
                ok = self.shadows[j].contains(&key);
            }
        });
        ok
    }

    fn grow<F>(
        &self,
        j: usize,
        parts: &mut Vec<Vec<Vertex>>,
        used: &mut FixedBitSet,
        f: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&PatternCopy) -> ControlFlow<()>,
    {
        if j == self.k {
            return f(&PatternCopy { parts: parts.clone() });
        }
        if parts[j].len() == self.r {
            return self.grow(j + 1, parts, used, f);
        }
        let start = match (parts[j].last(), j) {
            (Some(&last), _) => last as usize + 1,
            (None, 0) => 0,
            (None, _) => parts[j - 1][0] as usize + 1,
        };
        for v in start..self.n {
            if used.contains(v) || !self.extends(parts, j, v as Vertex) {
                continue;
            }
            used.insert(v);
            parts[j].push(v as Vertex);
            let flow = self.grow(j, parts, used, f);
            parts[j].pop();
            used.set(v, false);
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Visits every set of `r` pairwise disjoint edges as ascending edge ids.
pub fn visit_matchings<F>(g: &Hypergraph, r: usize, mut f: F) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    fn go<F>(
        g: &Hypergraph,
        r: usize,
        start: usize,
        used: &mut FixedBitSet,
        buf: &mut Vec<usize>,
        f: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        if buf.len() == r {
            return f(buf);
        }
        for id in start..g.m() {
            if g.m() - id < r - buf.len() {
                break;
            }
            let e = g.edge(id);
            if e.iter().any(|&v| used.contains(v as usize)) {
                continue;
            }
            e.iter().for_each(|&v| used.insert(v as usize));
            buf.push(id);
            let flow = go(g, r, id + 1, used, buf, f);
            buf.pop();
            e.iter().for_each(|&v| used.set(v as usize, false));
            flow?;
        }
        ControlFlow::Continue(())
    }
    let mut used = FixedBitSet::with_capacity(g.n());
    go(g, r, 0, &mut used, &mut Vec::with_capacity(r), &mut f)
}

/// Number of unordered `r`-sets of pairwise disjoint edges.
pub fn count_matchings(g: &Hypergraph, r: usize) -> u128 {
    let mut total = 0u128;
    let _ = visit_matchings(g, r, |_| {
        total += 1;
        ControlFlow::Continue(())
    });
    total
}

fn permutations(items: &[Vertex]) -> Vec<Vec<Vertex>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Every copy whose edge set contains `matching`, i.e. whose parts are formed
/// by sending the vertices of each matching edge to distinct parts.
///
/// Anchored (with a partition) there is at most one such copy; otherwise at
/// most `(k!)^r`, and at most `2^r` for graphs.
pub fn extensions_of_matching(
    g: &Hypergraph,
    matching: &Matching,
    r: usize,
    spec: Option<&PartitionSpec>,
) -> Result<Vec<PatternCopy>> {
    if matching.len() != r {
        return Err(Error::InvalidMatching(format!(
            "expected {r} edges, found {}",
            matching.len()
        )));
    }
    if let Some(e) = matching.edges().iter().find(|e| g.edge_id(e).is_none()) {
        return Err(Error::InvalidMatching(format!(
            "{e:?} is not an edge of the host"
        )));
    }
    if r == 0 {
        return Ok(Vec::new());
    }
    let complete = |c: &PatternCopy| c.transversals().iter().all(|e| g.edge_id(e).is_some());

    if let Some(spec) = spec {
        spec.check_partite(g)?;
        let mut parts = vec![Vec::with_capacity(r); spec.k()];
        for e in matching.edges() {
            for &v in e {
                parts[spec.part_of(v)].push(v);
            }
        }
        let copy = PatternCopy::anchored(parts);
        return Ok(if complete(&copy) { vec![copy] } else { Vec::new() });
    }

    let orders: Vec<Vec<Vec<Vertex>>> = matching.edges().iter().map(|e| permutations(e)).collect();
    let mut found = BTreeSet::new();
    // the first edge's order only relabels parts, so it stays fixed
    let mut pick = vec![0usize; r];
    loop {
        let mut parts = vec![Vec::with_capacity(r); g.k()];
        for (j, &o) in pick.iter().enumerate() {
            for (i, &v) in orders[j][o].iter().enumerate() {
                parts[i].push(v);
            }
        }
        let copy = PatternCopy::unordered(parts);
        if !found.contains(&copy) && complete(&copy) {
            found.insert(copy);
        }
        // odometer over edges 1..r
        let mut j = 1;
        while j < r {
            pick[j] += 1;
            if pick[j] < orders[j].len() {
                break;
            }
            pick[j] = 0;
            j += 1;
        }
        if j >= r {
            break;
        }
    }
    Ok(found.into_iter().collect())
}

/// `(k!)^r * C(m, r)`, the number of matching/extension pairs bounding the copy count.
pub fn copy_count_upper_bound(m: u64, r: u64, k: u64) -> BigUint {
    pow(factorial(k), r as usize) * binomial(m, r)
}

/// `2 m^r`, the relaxed graph form of the bound.
pub fn relaxed_graph_bound(m: u64, r: u64) -> BigUint {
    BigUint::from(2u32) * pow(BigUint::from(m), r as usize)
}
