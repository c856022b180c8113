//! Hypergraph toolkit for largest `K_{r,s}`-free subgraphs.
//!
//! The crate is organised around a single immutable [`Hypergraph`] type:
//!
//! * [`hypergraph`] holds the representation, complete multipartite
//!   builders, links and seeded Bernoulli edge sampling.
//! * [`patterns`] enumerates and counts copies of `K_{r,r}` and
//!   `K^{(k)}_{r,...,r}`, counts matchings and evaluates the copy-count bounds.
//! * [`probabilistic`] runs the sample-then-delete extraction and batches of
//!   seeded trials.
//! * [`extremal`] builds the complete multipartite tightness constructions,
//!   the Kővári–Sós–Turán certificate and the inductive copy-count bound.
//! * [`oracle`] computes the exact largest pattern-free subgraph of small
//!   hosts by branch and bound.

pub mod error;
pub mod extremal;
pub mod hypergraph;
pub mod numeric;
pub mod oracle;
pub mod patterns;
pub mod probabilistic;

pub use error::{Error, Result};
pub use extremal::{
    build_construction, build_construction_with_budget, common_extension_count_ds, edge_density_a,
    kst_certificate, proposition_lower_bound, sum_binomial_ds, theorem_upper_bound, CapacityBudget,
    CertificateReport, ConstructionSpec, Verdict,
};
pub use hypergraph::{
    bernoulli_edge_sample, complete_bipartite, complete_multipartite, link, Edge, EdgeSubset, Hypergraph,
    PartitionSpec, Vertex,
};
pub use oracle::{
    f_lower_report, is_free, max_free_subgraph, pattern_copies, FLowerReport, FreenessCheck, OracleResult,
    PatternKind, PatternSpec, ReportOptions,
};
pub use patterns::{
    copy_count_upper_bound, count_copies, count_matchings, enumerate_copies, extensions_of_matching,
    relaxed_graph_bound, visit_copies, visit_matchings, Matching, PatternCopy,
};
pub use probabilistic::{
    deletion_params, derive_trial_seed, expectation_lower_bound, extract_free_subgraph, run_trials,
    DeletionParams, DeletionRunReport, EdgeChoice, ExpectationBound, ExtractOptions, TrialBatch, TrialRecord,
    TrialSummary, GENERATOR_ID,
};
