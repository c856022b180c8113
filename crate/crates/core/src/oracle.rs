//! Exact largest pattern-free subgraphs of small hosts.
//!
//! The largest free subgraph is the complement of a minimum set of edges
//! hitting every pattern copy of the host. [`max_free_subgraph`] finds that
//! set by branch and bound: pick an unhit copy with the fewest deletable edges,
//! branch on which of them is deleted (earlier choices stay kept in later
//! branches), and prune with a greedy packing of copies that share no
//! deletable edge.

use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{Edge, EdgeSubset, Hypergraph, PartitionSpec, Vertex};
use crate::patterns::{for_each_subset, visit_copies, PatternCopy};
use crate::probabilistic::{deletion_params, run_trials, EdgeChoice, ExtractOptions};

/// Which embedded pattern counts as a copy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    /// `K_{r,r}` anywhere in a graph, parts unordered.
    KrrUnordered,
    /// `K_{r,s}` in a bipartite host with the `r`-side inside `U`.
    KrsOriented,
    /// `K_{r,s}` in a bipartite host in either orientation.
    KrsEither,
    /// `K^{(k)}_{r,...,r}`; anchored to the parts when a partition is given.
    Multipartite { k: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PatternSpec {
    pub kind: PatternKind,
    pub r: usize,
    pub s: usize,
}

impl PatternSpec {
    pub fn krr(r: usize) -> Result<Self> {
        Self::checked(PatternKind::KrrUnordered, r, r)
    }

    pub fn krs_oriented(r: usize, s: usize) -> Result<Self> {
        Self::checked(PatternKind::KrsOriented, r, s)
    }

    pub fn krs_either(r: usize, s: usize) -> Result<Self> {
        Self::checked(PatternKind::KrsEither, r, s)
    }

    pub fn multipartite(r: usize, k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::Domain("uniformity must be >= 1".into()));
        }
        Self::checked(PatternKind::Multipartite { k }, r, r)
    }

    fn checked(kind: PatternKind, r: usize, s: usize) -> Result<Self> {
        let ok = match kind {
            PatternKind::KrsOriented | PatternKind::KrsEither => 2 <= r && r <= s,
            _ => r >= 1 && r == s,
        };
        if ok {
            Ok(Self { kind, r, s })
        } else {
            Err(Error::Domain(format!(
                "invalid pattern sizes r = {r}, s = {s} for {kind:?}"
            )))
        }
    }

    /// Uniformity of the pattern.
    pub fn k(&self) -> usize {
        match self.kind {
            PatternKind::Multipartite { k } => k,
            _ => 2,
        }
    }
}

fn require_bipartite<'a>(g: &Hypergraph, spec: Option<&'a PartitionSpec>) -> Result<&'a PartitionSpec> {
    let spec = spec.ok_or_else(|| Error::Domain("K_{r,s} patterns need a bipartition".into()))?;
    if g.k() != 2 || spec.k() != 2 {
        return Err(Error::NotPartite(
            "K_{r,s} patterns need a bipartite graph".into(),
        ));
    }
    spec.check_partite(g)?;
    Ok(spec)
}

/// Copies with an `r`-set inside part `small` and an `s`-set in the other part.
fn visit_oriented<F>(
    g: &Hypergraph,
    spec: &PartitionSpec,
    r: usize,
    s: usize,
    small: usize,
    f: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&PatternCopy) -> ControlFlow<()>,
{
    #[allow(clippy::too_many_arguments)]
    fn grow<F>(
        rows: &[FixedBitSet],
        side: &[Vertex],
        r: usize,
        s: usize,
        small: usize,
        start: usize,
        chosen: &mut Vec<Vertex>,
        cand: &FixedBitSet,
        f: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&PatternCopy) -> ControlFlow<()>,
    {
        if cand.count_ones(..) < s {
            return ControlFlow::Continue(());
        }
        if chosen.len() == r {
            let other: Vec<Vertex> = cand.ones().map(|v| v as Vertex).collect();
            return for_each_subset(&other, s, &mut |t| {
                let parts = if small == 0 {
                    vec![chosen.clone(), t.to_vec()]
                } else {
                    vec![t.to_vec(), chosen.clone()]
                };
                f(&PatternCopy::anchored(parts))
            });
        }
        for i in start..side.len() {
            let v = side[i];
            let mut next = cand.clone();
            next.intersect_with(&rows[v as usize]);
            chosen.push(v);
            let flow = grow(rows, side, r, s, small, i + 1, chosen, &next, f);
            chosen.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }
    let rows = g.adjacency();
    let mut all = FixedBitSet::with_capacity(g.n());
    all.insert_range(..);
    grow(
        &rows,
        spec.part(small),
        r,
        s,
        small,
        0,
        &mut Vec::with_capacity(r),
        &all,
        f,
    )
}

/// Visits every copy of `pattern` in `g`, stopping when `f` breaks.
pub fn visit_pattern_copies<F>(
    g: &Hypergraph,
    pattern: &PatternSpec,
    spec: Option<&PartitionSpec>,
    mut f: F,
) -> Result<ControlFlow<()>>
where
    F: FnMut(&PatternCopy) -> ControlFlow<()>,
{
    match pattern.kind {
        PatternKind::KrrUnordered => {
            if g.k() != 2 {
                return Err(Error::Domain("K_{r,r} patterns need a graph".into()));
            }
            visit_copies(g, pattern.r, None, f)
        }
        PatternKind::Multipartite { k } => {
            if g.k() != k {
                return Err(Error::Domain(format!(
                    "pattern is {k}-uniform but host is {}-uniform",
                    g.k()
                )));
            }
            visit_copies(g, pattern.r, spec, f)
        }
        PatternKind::KrsOriented => {
            let spec = require_bipartite(g, spec)?;
            Ok(visit_oriented(g, spec, pattern.r, pattern.s, 0, &mut f))
        }
        PatternKind::KrsEither => {
            let spec = require_bipartite(g, spec)?;
            if visit_oriented(g, spec, pattern.r, pattern.s, 0, &mut f).is_break() {
                return Ok(ControlFlow::Break(()));
            }
            if pattern.r == pattern.s {
                // both orientations describe the same copies
                return Ok(ControlFlow::Continue(()));
            }
            Ok(visit_oriented(g, spec, pattern.r, pattern.s, 1, &mut f))
        }
    }
}

pub fn pattern_copies(
    g: &Hypergraph,
    pattern: &PatternSpec,
    spec: Option<&PartitionSpec>,
) -> Result<Vec<PatternCopy>> {
    let mut out = Vec::new();
    let _ = visit_pattern_copies(g, pattern, spec, |c| {
        out.push(c.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreenessCheck {
    pub free: bool,
    pub witness: Option<PatternCopy>,
}

/// Whether `g` (or its sub-hypergraph `subset`) has no copy of `pattern`.
pub fn is_free(
    g: &Hypergraph,
    subset: Option<&EdgeSubset>,
    pattern: &PatternSpec,
    spec: Option<&PartitionSpec>,
) -> Result<FreenessCheck> {
    let restricted;
    let host = match subset {
        Some(s) => {
            restricted = g.restrict(s)?.0;
            &restricted
        }
        None => g,
    };
    let mut witness = None;
    let _ = visit_pattern_copies(host, pattern, spec, |c| {
        witness = Some(c.clone());
        ControlFlow::Break(())
    })?;
    Ok(FreenessCheck {
        free: witness.is_none(),
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub optimum: usize,
    pub m: usize,
    pub copies: usize,
    pub nodes_explored: u64,
    pub proved_optimal: bool,
    pub witness_edges: Vec<Edge>,
    #[serde(skip)]
    pub witness: EdgeSubset,
}

struct Search<'a> {
    copies: &'a [Vec<usize>],
    by_edge: Vec<Vec<usize>>,
    deleted: Vec<bool>,
    kept: Vec<bool>,
    hits: Vec<u32>,
    trail: Vec<usize>,
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Search<'_> {
    fn free_edges(&self, ci: usize) -> impl Iterator<Item = usize> + '_ {
        self.copies[ci].iter().copied().filter(|&e| !self.kept[e])
    }

    fn set_deleted(&mut self, e: usize, on: bool) {
        self.deleted[e] = on;
        for &ci in &self.by_edge[e] {
            if on {
                self.hits[ci] += 1;
            } else {
                self.hits[ci] -= 1;
            }
        }
        if on {
            self.trail.push(e);
        } else {
            self.trail.pop();
        }
    }

    /// Copies sharing no deletable edge each need their own deletion.
    fn packing_bound(&self, open: &[(usize, usize)]) -> usize {
        let mut used = vec![false; self.deleted.len()];
        let mut count = 0;
        for &(_, ci) in open {
            if self.free_edges(ci).all(|e| !used[e]) {
                self.free_edges(ci).for_each(|e| used[e] = true);
                count += 1;
            }
        }
        count
    }

    fn run(&mut self) {
        if self.nodes >= self.budget {
            self.exhausted = true;
            return;
        }
        self.nodes += 1;
        let mut open = Vec::new();
        for ci in 0..self.copies.len() {
            if self.hits[ci] == 0 {
                let free = self.free_edges(ci).count();
                if free == 0 {
                    return;
                }
                open.push((free, ci));
            }
        }
        if open.is_empty() {
            if self.trail.len() < self.best.len() {
                self.best = self.trail.clone();
            }
            return;
        }
        open.sort_unstable();
        if self.trail.len() + self.packing_bound(&open) >= self.best.len() {
            return;
        }
        let branch: Vec<usize> = self.free_edges(open[0].1).collect();
        for &e in &branch {
            self.set_deleted(e, true);
            self.run();
            self.set_deleted(e, false);
            self.kept[e] = true;
            if self.exhausted {
                break;
            }
        }
        for &e in &branch {
            self.kept[e] = false;
        }
    }
}

/// Greedy hitting set: repeatedly delete the edge in the most unhit copies.
fn greedy_hitting_set(copies: &[Vec<usize>], by_edge: &[Vec<usize>]) -> Vec<usize> {
    let mut hit = vec![false; copies.len()];
    let mut load: Vec<usize> = by_edge.iter().map(Vec::len).collect();
    let mut chosen = Vec::new();
    while let Some((e, &l)) = load
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
    {
        if l == 0 {
            break;
        }
        chosen.push(e);
        for &ci in &by_edge[e] {
            if !std::mem::replace(&mut hit[ci], true) {
                copies[ci].iter().for_each(|&f| load[f] -= 1);
            }
        }
    }
    chosen
}

/// Largest subgraph of `g` without a copy of `pattern`, exploring at most
/// `budget` search nodes. When the budget runs out the best subgraph found
/// is returned with `proved_optimal = false`.
pub fn max_free_subgraph(
    g: &Hypergraph,
    pattern: &PatternSpec,
    spec: Option<&PartitionSpec>,
    budget: u64,
) -> Result<OracleResult> {
    let mut copies = Vec::new();
    let _ = visit_pattern_copies(g, pattern, spec, |c| {
        copies.push(c.edge_ids(g).expect("copy edges lie in the host"));
        ControlFlow::Continue(())
    })?;
    copies.sort_unstable();
    copies.dedup();

    let mut by_edge = vec![Vec::new(); g.m()];
    for (ci, c) in copies.iter().enumerate() {
        for &e in c {
            by_edge[e].push(ci);
        }
    }
    let best = greedy_hitting_set(&copies, &by_edge);
    let mut search = Search {
        copies: &copies,
        by_edge,
        deleted: vec![false; g.m()],
        kept: vec![false; g.m()],
        hits: vec![0; copies.len()],
        trail: Vec::new(),
        best,
        nodes: 0,
        budget,
        exhausted: false,
    };
    if !copies.is_empty() {
        search.run();
    }
    let mut witness = EdgeSubset::full(g);
    search.best.iter().for_each(|&e| witness.remove(e));
    Ok(OracleResult {
        optimum: witness.len(),
        m: g.m(),
        copies: copies.len(),
        nodes_explored: search.nodes,
        proved_optimal: !search.exhausted,
        witness_edges: witness.edges(g).map(<[Vertex]>::to_vec).collect(),
        witness,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReportOptions {
    pub trials: usize,
    pub base_seed: u64,
    pub budget: u64,
    pub policy: EdgeChoice,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            trials: 100,
            base_seed: 0,
            budget: 1_000_000,
            policy: EdgeChoice::Lex,
        }
    }
}

/// Exact optimum next to the randomized extraction and the guaranteed size.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FLowerReport {
    pub m: usize,
    pub pattern: PatternSpec,
    pub guarantee: f64,
    pub oracle_optimum: Option<usize>,
    pub oracle_best_found: usize,
    pub oracle_certified: bool,
    pub best_of_trials: usize,
    pub mean_of_trials: f64,
}

/// Runs the oracle and `opts.trials` extractions of `K_{r,r}` copies (or the
/// hypergraph pattern). A `K_{r,r}`-free result is also `K_{r,s}`-free for
/// `s >= r`, so every trial is a valid lower bound for the oracle.
pub fn f_lower_report(
    g: &Hypergraph,
    pattern: &PatternSpec,
    spec: Option<&PartitionSpec>,
    opts: ReportOptions,
) -> Result<FLowerReport> {
    let oracle = max_free_subgraph(g, pattern, spec, opts.budget)?;
    let guarantee = match deletion_params(g.m() as u64, pattern.r as u64, pattern.k() as u64) {
        Ok(p) => p.guarantee,
        Err(Error::Degenerate(_)) => 0.0,
        Err(e) => return Err(e),
    };
    let extract_spec = match pattern.kind {
        PatternKind::KrrUnordered => None,
        _ => spec,
    };
    let (best, mean) = if g.m() == 0 || pattern.r < 2 {
        (0, 0.0)
    } else {
        let batch = run_trials(
            g,
            pattern.r,
            opts.trials.max(1),
            opts.base_seed,
            extract_spec,
            ExtractOptions {
                policy: opts.policy,
                p_override: None,
            },
        )?;
        (batch.summary.max_final_size, batch.summary.mean_final_size)
    };
    Ok(FLowerReport {
        m: g.m(),
        pattern: *pattern,
        guarantee,
        oracle_optimum: oracle.proved_optimal.then_some(oracle.optimum),
        oracle_best_found: oracle.optimum,
        oracle_certified: oracle.proved_optimal,
        best_of_trials: best,
        mean_of_trials: mean,
    })
}
