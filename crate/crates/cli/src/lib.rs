//! `kfree`: reproducible experiments on `K_{r,s}`-free subgraphs.
//!
//! [`run`] parses arguments, executes one subcommand and returns the process
//! exit code: 0 success, 1 usage, 2 I/O or parse, 3 capacity, 4 a copy-count
//! bound that should always hold was violated.

mod commands;
pub mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kfree_core::EdgeChoice;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;
pub const EXIT_BOUND: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "kfree",
    version,
    about = "Experiments on K_{r,s}-free subgraphs of graphs and hypergraphs"
)]
pub struct Cli {
    /// Worker threads for parallel trials (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the complete k-partite host with parts n, n^r, n^(r^2), ...
    Construct(ConstructArgs),
    /// Count pattern copies and r-matchings and check the copy-count bound chain.
    Count(CountArgs),
    /// Run seeded sample-then-delete trials.
    ///
    /// CSV columns: trial, seed, generator, p, edges_sampled, copies_found,
    /// edges_deleted, final_size, free_verified. Rows are in trial order.
    Extract(ExtractArgs),
    /// Exact maximum pattern-free subgraph by branch and bound.
    Oracle(OracleArgs),
    /// Degree-sum certificate for a subgraph of a bipartite host.
    Certify(CertifyArgs),
    /// Guarantee, oracle value and upper bound across constructions n = n-min..n-max.
    ///
    /// CSV columns: n, m, q, guarantee, expectation_bound, best_of_trials,
    /// mean_of_trials, oracle_value, oracle_best_found, oracle_certified, upper_bound.
    Bounds(BoundsArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Orientation {
    /// The r-side lies in the first part.
    #[default]
    Proof,
    /// Either side may lie in the first part.
    Either,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Policy {
    #[default]
    Lex,
    Random,
    Greedy,
}

impl From<Policy> for EdgeChoice {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Lex => EdgeChoice::Lex,
            Policy::Random => EdgeChoice::Random,
            Policy::Greedy => EdgeChoice::Greedy,
        }
    }
}

/// Host source: a file, or a generated construction.
#[derive(Debug, Args)]
struct Source {
    /// Host hypergraph in the `k n m` text format.
    #[arg(long, conflicts_with = "construct")]
    input: Option<PathBuf>,
    /// Partition file (one part per line) for --input.
    #[arg(long, requires = "input")]
    partition: Option<PathBuf>,
    /// Use the complete construction given by --n, --k and --r.
    #[arg(long)]
    construct: bool,
    /// Construction base.
    #[arg(long, requires = "construct")]
    n: Option<u64>,
    /// Construction uniformity (default 2).
    #[arg(long, requires = "construct")]
    k: Option<u64>,
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConstructArgs {
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 2)]
    k: u64,
    #[arg(long, default_value_t = 2)]
    r: u64,
    /// Host file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Partition file (defaults to <out>.part when --out is given).
    #[arg(long)]
    partition_out: Option<PathBuf>,
    #[arg(long, default_value_t = 1 << 20)]
    max_vertices: u64,
    #[arg(long, default_value_t = 1 << 20)]
    max_edges: u64,
}

#[derive(Debug, Args)]
struct CountArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t)]
    policy: Policy,
    /// Sampling probability (default: the guarantee-optimal p).
    #[arg(long)]
    p: Option<f64>,
    /// `csv` writes trial rows, `json` writes summary and trials together.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary file for CSV output (stderr when omitted).
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PatternArgs {
    #[arg(long, default_value_t = 2)]
    r: usize,
    /// Second side of K_{r,s} (defaults to r).
    #[arg(long)]
    s: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    orientation: Orientation,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    pattern: PatternArgs,
    /// Maximum number of search nodes.
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    /// Include the witness edge list.
    #[arg(long)]
    witness: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[command(flatten)]
    source: Source,
    /// Subgraph edges in the host text format (the whole host when omitted).
    #[arg(long)]
    subgraph: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long)]
    s: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(long, default_value_t = 2)]
    k: u64,
    #[command(flatten)]
    pattern: PatternArgs,
    #[arg(long, default_value_t = 1)]
    n_min: u64,
    #[arg(long, default_value_t = 3)]
    n_max: u64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t)]
    policy: Policy,
    #[arg(long, default_value_t = 200_000)]
    budget: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| commands::dispatch(cli.command, stdout, stderr)),
            Err(e) => Err(commands::Failure::usage(e.to_string())),
        },
        None => commands::dispatch(cli.command, stdout, stderr),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
