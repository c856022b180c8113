//! Sample-then-delete extraction of pattern-free subgraphs.
//!
//! Every edge is kept independently with probability `p = m^(-1/q) / 2`,
//! every pattern copy of the sample is listed once, and the list is swept
//! deleting one edge from each copy that is still fully present. A final
//! recount confirms the result is pattern-free.

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{rng_from_seed, sample_with, EdgeSubset, Hypergraph, PartitionSpec};
use crate::numeric::{factorial, ge_with_tolerance, ln_binomial};
use crate::patterns::{count_copies, visit_copies};
use num_traits::ToPrimitive;

/// Identifies the pseudorandom generator behind every sample: ChaCha8 keyed
/// through `rand`'s `seed_from_u64`.
pub const GENERATOR_ID: &str = "chacha8/seed_from_u64";

/// Relative slack used when comparing real-valued sizes with the guarantee.
pub const GUARANTEE_TOLERANCE: f64 = 1e-9;

/// `1 + r + ... + r^(k-1)`, or `None` on overflow.
pub fn q_exponent(r: u64, k: u64) -> Option<u64> {
    let mut q = 0u64;
    let mut term = 1u64;
    for i in 0..k {
        q = q.checked_add(term)?;
        if i + 1 < k {
            term = term.checked_mul(r)?;
        }
    }
    Some(q)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeletionParams {
    pub m: u64,
    pub r: u64,
    pub k: u64,
    pub q: u64,
    pub p: f64,
    pub guarantee: f64,
}

impl DeletionParams {
    /// Below `m = 2^q` the sample is expected to hold fewer than one edge per
    /// unit of bound and trial statistics carry no information.
    pub fn bound_vacuous(&self) -> bool {
        self.q < 64 && self.m < (1u64 << self.q)
    }
}

pub fn deletion_params(m: u64, r: u64, k: u64) -> Result<DeletionParams> {
    if m == 0 {
        return Err(Error::Degenerate(
            "no edges; the largest free subgraph is empty".into(),
        ));
    }
    if r < 2 || k < 2 {
        return Err(Error::Domain(format!(
            "need r >= 2 and k >= 2, got r = {r}, k = {k}"
        )));
    }
    let q = q_exponent(r, k).ok_or_else(|| Error::Domain("q overflows u64".into()))?;
    let mf = m as f64;
    let qf = q as f64;
    Ok(DeletionParams {
        m,
        r,
        k,
        q,
        p: 0.5 * mf.powf(-1.0 / qf),
        guarantee: 0.25 * mf.powf((qf - 1.0) / qf),
    })
}

/// How to pick the edge removed from a copy that is still intact.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeChoice {
    /// Lexicographically smallest edge of the copy.
    #[default]
    Lex,
    /// Uniform edge of the copy, drawn from the trial's generator.
    Random,
    /// Edge lying in the most still-intact copies; ties to the smallest.
    Greedy,
}

impl fmt::Display for EdgeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeChoice::Lex => "lex",
            EdgeChoice::Random => "random",
            EdgeChoice::Greedy => "greedy",
        })
    }
}

impl FromStr for EdgeChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lex" => Ok(EdgeChoice::Lex),
            "random" => Ok(EdgeChoice::Random),
            "greedy" => Ok(EdgeChoice::Greedy),
            other => Err(Error::Domain(format!("unknown edge-choice policy {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ExtractOptions {
    pub policy: EdgeChoice,
    /// Replaces the computed sampling probability.
    pub p_override: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeletionRunReport {
    pub seed: u64,
    pub p: f64,
    pub edges_sampled: usize,
    pub copies_found: usize,
    pub edges_deleted: usize,
    pub final_size: usize,
    pub free_verified: bool,
    pub generator: &'static str,
}

/// One run of sample-then-delete on `g`. With a partition, copies are
/// anchored to its parts.
pub fn extract_free_subgraph(
    g: &Hypergraph,
    r: usize,
    seed: u64,
    spec: Option<&PartitionSpec>,
    opts: ExtractOptions,
) -> Result<(EdgeSubset, DeletionRunReport)> {
    if r < 2 {
        return Err(Error::Domain(format!("pattern part size must be >= 2, got {r}")));
    }
    let p = match opts.p_override {
        Some(p) if !(0.0..=1.0).contains(&p) => return Err(Error::InvalidProbability(p)),
        Some(p) => p,
        None if g.m() == 0 => 0.0,
        None => deletion_params(g.m() as u64, r as u64, g.k() as u64)?.p,
    };

    let mut rng = rng_from_seed(seed);
    let sample = sample_with(g, p, &mut rng);
    let (sub, host_ids) = g.restrict(&sample)?;

    let mut copies: Vec<Vec<usize>> = Vec::new();
    let _ = visit_copies(&sub, r, spec, |c| {
        let local = c.edge_ids(&sub).expect("enumerated copy lies in the sample");
        copies.push(local.into_iter().map(|i| host_ids[i]).collect());
        ControlFlow::Continue(())
    })?;

    let mut kept = sample.clone();
    let mut deleted = 0;
    match opts.policy {
        EdgeChoice::Lex | EdgeChoice::Random => {
            for copy in &copies {
                if copy.iter().all(|&e| kept.contains(e)) {
                    // ids are sorted and ids follow lexicographic edge order
                    let victim = match opts.policy {
                        EdgeChoice::Lex => copy[0],
                        _ => copy[rng.random_range(0..copy.len())],
                    };
                    kept.remove(victim);
                    deleted += 1;
                }
            }
        }
        EdgeChoice::Greedy => deleted = greedy_sweep(&copies, &mut kept),
    }

    let (result, _) = g.restrict(&kept)?;
    let free = count_copies(&result, r, spec)? == 0;
    let report = DeletionRunReport {
        seed,
        p,
        edges_sampled: sample.len(),
        copies_found: copies.len(),
        edges_deleted: deleted,
        final_size: kept.len(),
        free_verified: free,
        generator: GENERATOR_ID,
    };
    Ok((kept, report))
}

fn greedy_sweep(copies: &[Vec<usize>], kept: &mut EdgeSubset) -> usize {
    let mut containing: HashMap<usize, Vec<usize>> = HashMap::new();
    for (ci, copy) in copies.iter().enumerate() {
        for &e in copy {
            containing.entry(e).or_default().push(ci);
        }
    }
    let mut load: HashMap<usize, usize> = containing.iter().map(|(&e, cs)| (e, cs.len())).collect();
    let mut intact = vec![true; copies.len()];
    let mut deleted = 0;
    for ci in 0..copies.len() {
        if !intact[ci] {
            continue;
        }
        let victim = *copies[ci]
            .iter()
            .max_by(|a, b| load[a].cmp(&load[b]).then(b.cmp(a)))
            .expect("copies are non-empty");
        kept.remove(victim);
        deleted += 1;
        for &cj in &containing[&victim] {
            if std::mem::replace(&mut intact[cj], false) {
                for e in &copies[cj] {
                    *load.get_mut(e).unwrap() -= 1;
                }
            }
        }
    }
    deleted
}

/// Seed of trial `i`: SplitMix64 applied to `base + i * 0x9E3779B97F4A7C15`.
pub fn derive_trial_seed(base_seed: u64, trial: u64) -> u64 {
    let mut z = base_seed.wrapping_add(trial.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    #[serde(flatten)]
    pub report: DeletionRunReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub base_seed: u64,
    pub generator: &'static str,
    pub policy: EdgeChoice,
    pub m: usize,
    pub r: usize,
    pub k: usize,
    pub p: f64,
    pub guarantee: f64,
    pub bound_vacuous: bool,
    pub mean_final_size: f64,
    /// Sample standard deviation (`n - 1` denominator); zero for one trial.
    pub std_final_size: f64,
    pub min_final_size: usize,
    pub max_final_size: usize,
    pub mean_copies_found: f64,
    pub fraction_meeting_guarantee: f64,
    /// Real mean against the real-valued guarantee.
    pub mean_meets_guarantee: bool,
    /// Best trial against the guarantee rounded up.
    pub max_meets_guarantee: bool,
    pub all_free: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialBatch {
    pub summary: TrialSummary,
    pub trials: Vec<TrialRecord>,
}

/// Runs `num_trials` independent extractions in parallel. Trial `i` uses
/// [`derive_trial_seed`]`(base_seed, i)`; records and all floating-point
/// reductions follow trial order, so output does not depend on scheduling.
pub fn run_trials(
    g: &Hypergraph,
    r: usize,
    num_trials: usize,
    base_seed: u64,
    spec: Option<&PartitionSpec>,
    opts: ExtractOptions,
) -> Result<TrialBatch> {
    if num_trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    let trials = (0..num_trials)
        .into_par_iter()
        .map(|i| {
            let seed = derive_trial_seed(base_seed, i as u64);
            extract_free_subgraph(g, r, seed, spec, opts).map(|(_, report)| TrialRecord { trial: i, report })
        })
        .collect::<Result<Vec<_>>>()?;

    let (guarantee, vacuous) = match deletion_params(g.m() as u64, r as u64, g.k() as u64) {
        Ok(params) => (params.guarantee, params.bound_vacuous()),
        Err(Error::Degenerate(_)) => (0.0, true),
        Err(e) => return Err(e),
    };
    let n = num_trials as f64;
    let sizes: Vec<f64> = trials.iter().map(|t| t.report.final_size as f64).collect();
    let mean = sizes.iter().sum::<f64>() / n;
    let var = if num_trials > 1 {
        sizes.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let min = trials.iter().map(|t| t.report.final_size).min().unwrap_or(0);
    let max = trials.iter().map(|t| t.report.final_size).max().unwrap_or(0);
    let meeting = sizes
        .iter()
        .filter(|&&s| ge_with_tolerance(s, guarantee, GUARANTEE_TOLERANCE))
        .count();
    let summary = TrialSummary {
        trials: num_trials,
        base_seed,
        generator: GENERATOR_ID,
        policy: opts.policy,
        m: g.m(),
        r,
        k: g.k(),
        p: trials[0].report.p,
        guarantee,
        bound_vacuous: vacuous,
        mean_final_size: mean,
        std_final_size: var.sqrt(),
        min_final_size: min,
        max_final_size: max,
        mean_copies_found: trials.iter().map(|t| t.report.copies_found as f64).sum::<f64>() / n,
        fraction_meeting_guarantee: meeting as f64 / n,
        mean_meets_guarantee: ge_with_tolerance(mean, guarantee, GUARANTEE_TOLERANCE),
        max_meets_guarantee: max as f64 >= (guarantee * (1.0 - GUARANTEE_TOLERANCE)).ceil(),
        all_free: trials.iter().all(|t| t.report.free_verified),
    };
    Ok(TrialBatch { summary, trials })
}

/// The expected size of the extracted subgraph, bounded below by
/// `pm - (k!)^r p^(r^k) C(m, r)` at the default `p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectationBound {
    pub p: f64,
    pub pm: f64,
    pub subtracted: f64,
    pub value: f64,
    /// Graph case only: `2 p^(r^2) m^r` and the matching `pm - 2 p^(r^2) m^r`.
    pub relaxed_subtracted: Option<f64>,
    pub relaxed_value: Option<f64>,
    pub guarantee: f64,
}

impl ExpectationBound {
    /// `value >= guarantee` (and the relaxed value too, when present) up to
    /// [`GUARANTEE_TOLERANCE`].
    pub fn holds(&self) -> bool {
        ge_with_tolerance(self.value, self.guarantee, GUARANTEE_TOLERANCE)
            && self
                .relaxed_value
                .is_none_or(|v| ge_with_tolerance(v, self.guarantee, GUARANTEE_TOLERANCE))
    }
}

pub fn expectation_lower_bound(m: u64, r: u64, k: u64) -> Result<ExpectationBound> {
    let params = deletion_params(m, r, k)?;
    let p = params.p;
    let mf = m as f64;
    let pm = p * mf;
    let ln_kfact = factorial(k).to_f64().expect("k! fits in f64").ln();
    let copies_exp = (r as f64).powf(k as f64);
    // log space keeps p^(r^k) C(m, r) finite for large r^k
    let ln_sub = r as f64 * ln_kfact + copies_exp * p.ln() + ln_binomial(mf, r);
    let subtracted = ln_sub.exp();
    let (relaxed_subtracted, relaxed_value) = if k == 2 {
        let ln_rel = 2f64.ln() + (r * r) as f64 * p.ln() + r as f64 * mf.ln();
        let rel = ln_rel.exp();
        (Some(rel), Some(pm - rel))
    } else {
        (None, None)
    };
    Ok(ExpectationBound {
        p,
        pm,
        subtracted,
        value: pm - subtracted,
        relaxed_subtracted,
        relaxed_value,
        guarantee: params.guarantee,
    })
}
