//! Tightness constructions and the counting certificates around them.

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{complete_multipartite, EdgeSubset, Hypergraph, PartitionSpec, Vertex};
use crate::numeric::{binomial, generalized_binomial, serialize_display};
use crate::probabilistic::q_exponent;

/// Upper limits on the size of a generated host.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CapacityBudget {
    pub max_vertices: u64,
    pub max_edges: u64,
}

impl Default for CapacityBudget {
    fn default() -> Self {
        Self {
            max_vertices: 1 << 20,
            max_edges: 1 << 20,
        }
    }
}

/// Integer shape of the complete `k`-partite construction with base `n`:
/// `|U_i| = n^(r^(i-1))`, so `m = n^q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstructionSpec {
    pub n: u64,
    pub r: u64,
    pub k: u64,
    pub q: u64,
    pub part_sizes: Vec<u64>,
    pub m: u64,
}

impl ConstructionSpec {
    pub fn new(n: u64, r: u64, k: u64) -> Result<Self> {
        if n < 1 || r < 2 || k < 2 {
            return Err(Error::Domain(format!(
                "construction needs n >= 1, r >= 2, k >= 2 (got n = {n}, r = {r}, k = {k})"
            )));
        }
        let overflow = || Error::Capacity(format!("construction n = {n}, r = {r}, k = {k} overflows u64"));
        let q = q_exponent(r, k).ok_or_else(overflow)?;
        let mut part_sizes = Vec::with_capacity(k as usize);
        let mut exp = 1u64;
        for i in 0..k {
            let e = u32::try_from(exp).map_err(|_| overflow())?;
            part_sizes.push(n.checked_pow(e).ok_or_else(overflow)?);
            if i + 1 < k {
                exp = exp.checked_mul(r).ok_or_else(overflow)?;
            }
        }
        let m = part_sizes
            .iter()
            .try_fold(1u64, |acc, &s| acc.checked_mul(s))
            .ok_or_else(overflow)?;
        let direct = n
            .checked_pow(u32::try_from(q).map_err(|_| overflow())?)
            .ok_or_else(overflow)?;
        debug_assert_eq!(m, direct, "exponents must sum to q");
        Ok(Self {
            n,
            r,
            k,
            q,
            part_sizes,
            m: direct,
        })
    }

    pub fn vertices(&self) -> u64 {
        self.part_sizes.iter().sum()
    }
}

pub fn build_construction(n: u64, r: u64, k: u64) -> Result<(Hypergraph, PartitionSpec, ConstructionSpec)> {
    build_construction_with_budget(n, r, k, CapacityBudget::default())
}

pub fn build_construction_with_budget(
    n: u64,
    r: u64,
    k: u64,
    budget: CapacityBudget,
) -> Result<(Hypergraph, PartitionSpec, ConstructionSpec)> {
    let cs = ConstructionSpec::new(n, r, k)?;
    if cs.vertices() > budget.max_vertices {
        return Err(Error::Capacity(format!(
            "{} vertices exceed the budget of {}",
            cs.vertices(),
            budget.max_vertices
        )));
    }
    if cs.m > budget.max_edges {
        return Err(Error::Capacity(format!(
            "{} edges exceed the budget of {}",
            cs.m, budget.max_edges
        )));
    }
    let sizes: Vec<usize> = cs.part_sizes.iter().map(|&s| s as usize).collect();
    let (g, spec) = complete_multipartite(&sizes);
    assert_eq!(g.m() as u64, cs.m);
    Ok((g, spec, cs))
}

/// Largest pattern-free size in the construction: `s m^(r/(r+1))` for
/// `K_{r,s}` in graphs, `r m^((q-1)/q)` for `k >= 3`.
pub fn theorem_upper_bound(m: u64, r: u64, s: u64, k: u64) -> Result<f64> {
    let mf = m as f64;
    match k {
        2 if 2 <= r && r <= s => Ok(s as f64 * mf.powf(r as f64 / (r as f64 + 1.0))),
        2 => Err(Error::Domain(format!("need 2 <= r <= s, got r = {r}, s = {s}"))),
        k if k >= 3 && r >= 2 => {
            let q = q_exponent(r, k).ok_or_else(|| Error::Domain("q overflows u64".into()))? as f64;
            Ok(r as f64 * mf.powf((q - 1.0) / q))
        }
        _ => Err(Error::Domain(format!(
            "need k >= 2 and r >= 2, got k = {k}, r = {r}"
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ProvesContainment,
    Inconclusive,
}

/// `lhs = sum_w C(deg(w), r)` against `rhs = s C(|U|, r)`; `lhs >= rhs`
/// forces an `r`-set of `U` with `s` common neighbours in `W`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateReport {
    #[serde(serialize_with = "serialize_display")]
    pub lhs: BigUint,
    #[serde(serialize_with = "serialize_display")]
    pub rhs: BigUint,
    pub edges: usize,
    pub w_size: usize,
    /// `e(G') / |W|`.
    #[serde(serialize_with = "serialize_display")]
    pub average_degree: Ratio<u64>,
    pub verdict: Verdict,
}

pub fn kst_certificate(
    host: &Hypergraph,
    gprime: &EdgeSubset,
    spec: &PartitionSpec,
    r: usize,
    s: usize,
) -> Result<CertificateReport> {
    if host.k() != 2 || spec.k() != 2 {
        return Err(Error::NotPartite("certificate needs a bipartite graph".into()));
    }
    spec.check_partite(host)?;
    gprime.check_host(host)?;
    if r < 1 || s < 1 {
        return Err(Error::Domain("r and s must be positive".into()));
    }
    let u = spec.part(0).len();
    if u < r {
        return Err(Error::Domain(format!("|U| = {u} is smaller than r = {r}")));
    }
    let mut deg = vec![0u64; host.n()];
    for e in gprime.edges(host) {
        let w = if spec.part_of(e[0]) == 1 { e[0] } else { e[1] };
        deg[w as usize] += 1;
    }
    let lhs: BigUint = spec
        .part(1)
        .iter()
        .map(|&w| binomial(deg[w as usize], r as u64))
        .sum();
    let rhs = BigUint::from(s) * binomial(u as u64, r as u64);
    let w_size = spec.part(1).len();
    let edges = gprime.len();
    let average_degree = if w_size == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(edges as u64, w_size as u64)
    };
    let verdict = if lhs >= rhs {
        Verdict::ProvesContainment
    } else {
        Verdict::Inconclusive
    };
    Ok(CertificateReport {
        lhs,
        rhs,
        edges,
        w_size,
        average_degree,
        verdict,
    })
}

/// `C(a, r) * prod_{i < k} C(|U_i|, r)` with `C(a, r)` the falling-factorial
/// binomial, exact. The last part size is not used.
pub fn proposition_lower_bound(a: &BigRational, part_sizes: &[u64], r: u64) -> Result<BigRational> {
    if part_sizes.is_empty() {
        return Err(Error::Domain("at least one part is required".into()));
    }
    if *a < BigRational::from_integer(r.into()) {
        return Err(Error::Domain(format!("density a = {a} is below r = {r}")));
    }
    let head = &part_sizes[..part_sizes.len() - 1];
    let prod: BigUint = head.iter().map(|&s| binomial(s, r)).product();
    Ok(generalized_binomial(a, r) * BigRational::from_integer(BigInt::from(prod)))
}

/// `a = m / prod_{i >= 2} |U_i|`.
pub fn edge_density_a(g: &Hypergraph, spec: &PartitionSpec) -> Result<BigRational> {
    spec.check_partite(g)?;
    if let Some(i) = spec.parts().iter().position(Vec::is_empty) {
        return Err(Error::Domain(format!("part U_{} is empty", i + 1)));
    }
    let denom: BigUint = spec.parts()[1..].iter().map(|p| BigUint::from(p.len())).product();
    Ok(BigRational::new(BigInt::from(g.m()), BigInt::from(denom)))
}

fn check_family(spec: &PartitionSpec, sets: &[Vec<Vertex>], r: usize) -> Result<()> {
    if sets.len() + 1 != spec.k() {
        return Err(Error::MalformedSets(format!(
            "expected {} sets, found {}",
            spec.k() - 1,
            sets.len()
        )));
    }
    for (i, set) in sets.iter().enumerate() {
        let mut sorted = set.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != r || set.len() != r {
            return Err(Error::MalformedSets(format!(
                "set {} must hold {r} distinct vertices",
                i + 1
            )));
        }
        if let Some(v) = set
            .iter()
            .find(|&&v| v as usize >= spec.n() || spec.part_of(v) != i)
        {
            return Err(Error::MalformedSets(format!("vertex {v} is not in U_{}", i + 1)));
        }
    }
    Ok(())
}

fn ds_unchecked(g: &Hypergraph, spec: &PartitionSpec, sets: &[Vec<Vertex>]) -> usize {
    let mut tuples: Vec<Vec<Vertex>> = vec![Vec::new()];
    for set in sets {
        tuples = tuples
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
    spec.part(spec.k() - 1)
        .iter()
        .filter(|&&x| {
            tuples.iter().all(|t| {
                let mut e = t.clone();
                e.push(x);
                g.contains_edge(&e)
            })
        })
        .count()
}

/// `d(S)`: last-part vertices `x` such that every transversal of `S`
/// together with `x` is an edge.
pub fn common_extension_count_ds(
    g: &Hypergraph,
    spec: &PartitionSpec,
    s_sets: &[Vec<Vertex>],
    r: usize,
) -> Result<usize> {
    spec.check_partite(g)?;
    check_family(spec, s_sets, r)?;
    Ok(ds_unchecked(g, spec, s_sets))
}

fn r_subsets(items: &[Vertex], r: usize) -> Vec<Vec<Vertex>> {
    if r == 0 {
        return vec![Vec::new()];
    }
    if items.len() < r {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &v) in items.iter().enumerate() {
        for mut tail in r_subsets(&items[i + 1..], r - 1) {
            tail.insert(0, v);
            out.push(tail);
        }
    }
    out
}

/// Visits every family `S` (one `r`-set per part except the last) with `d(S)`.
pub fn for_each_family<F>(g: &Hypergraph, spec: &PartitionSpec, r: usize, mut f: F) -> Result<()>
where
    F: FnMut(&[Vec<Vertex>], usize),
{
    spec.check_partite(g)?;
    let choices: Vec<Vec<Vec<Vertex>>> = spec.parts()[..spec.k() - 1]
        .iter()
        .map(|p| r_subsets(p, r))
        .collect();
    let mut pick = vec![0usize; choices.len()];
    if choices.iter().any(Vec::is_empty) {
        return Ok(());
    }
    loop {
        let family: Vec<Vec<Vertex>> = pick
            .iter()
            .enumerate()
            .map(|(i, &j)| choices[i][j].clone())
            .collect();
        f(&family, ds_unchecked(g, spec, &family));
        let mut i = 0;
        while i < pick.len() {
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
        if i == pick.len() {
            return Ok(());
        }
    }
}

/// `sum_S C(d(S), r)`, computed family by family.
pub fn sum_binomial_ds(g: &Hypergraph, spec: &PartitionSpec, r: usize) -> Result<BigUint> {
    let mut total = BigUint::zero();
    for_each_family(g, spec, r, |_, d| total += binomial(d as u64, r as u64))?;
    Ok(total)
}

/// `sum_S d(S)`.
pub fn sum_ds(g: &Hypergraph, spec: &PartitionSpec, r: usize) -> Result<BigUint> {
    let mut total = BigUint::zero();
    for_each_family(g, spec, r, |_, d| total += d)?;
    Ok(total)
}

/// Rounds a non-negative rational bound up to the least integer count meeting it.
pub fn ceil_to_count(x: &BigRational) -> BigUint {
    x.ceil().to_integer().to_biguint().unwrap_or_default()
}
