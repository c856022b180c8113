use std::fs;
use std::io::Write;
use std::ops::ControlFlow;
use std::path::Path;

use kfree_core::{
    build_construction_with_budget, copy_count_upper_bound, count_copies, count_matchings,
    expectation_lower_bound, extensions_of_matching, f_lower_report, kst_certificate, max_free_subgraph,
    relaxed_graph_bound, run_trials, theorem_upper_bound, visit_matchings, CapacityBudget, EdgeSubset, Error,
    ExtractOptions, Hypergraph, Matching, PartitionSpec, PatternSpec, ReportOptions,
};
use num_bigint::BigUint;
use serde_json::Value;

use crate::render::{float, int, Report, Table, SCHEMA};
use crate::{
    BoundsArgs, CertifyArgs, Command, ConstructArgs, CountArgs, ExtractArgs, Format, OracleArgs, Orientation,
    Output, PatternArgs, Source, EXIT_BOUND, EXIT_CAPACITY, EXIT_IO, EXIT_OK, EXIT_USAGE,
};

pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Capacity(_) => EXIT_CAPACITY,
            Error::Io(_)
            | Error::Parse { .. }
            | Error::InvalidEdge { .. }
            | Error::InvalidPartition(_)
            | Error::NotPartite(_)
            | Error::NotInLastPart(_)
            | Error::ForeignSubset => EXIT_IO,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<i32, Failure>;

pub fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Construct(a) => construct(a, stdout, stderr),
        Command::Count(a) => count(a, stdout),
        Command::Extract(a) => extract(a, stdout, stderr),
        Command::Oracle(a) => oracle(a, stdout),
        Command::Certify(a) => certify(a, stdout),
        Command::Bounds(a) => bounds(a, stdout),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::io(path, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::io(Path::new("<stdout>"), e)),
    }
}

fn emit_report(report: &Report, output: &Output, stdout: &mut dyn Write) -> Result<(), Failure> {
    let text = match output.format {
        Format::Text => report.to_text(),
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    emit(&text, output.out.as_deref(), stdout)
}

struct Host {
    g: Hypergraph,
    spec: Option<PartitionSpec>,
}

fn load(source: &Source, r: u64) -> Result<Host, Failure> {
    match (&source.input, source.construct) {
        (Some(path), false) => {
            let g = Hypergraph::parse(&read(path)?)?;
            let spec = match &source.partition {
                Some(p) => {
                    let spec = PartitionSpec::parse(&read(p)?, g.n())?;
                    spec.check_partite(&g)?;
                    Some(spec)
                }
                None => None,
            };
            Ok(Host { g, spec })
        }
        (None, true) => {
            let n = source.n.ok_or_else(|| Failure::usage("--construct needs --n"))?;
            let k = source.k.unwrap_or(2);
            let (g, spec, _) = build_construction_with_budget(n, r, k, CapacityBudget::default())?;
            Ok(Host { g, spec: Some(spec) })
        }
        _ => Err(Failure::usage("give exactly one of --input or --construct")),
    }
}

fn construct(a: ConstructArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Outcome {
    let budget = CapacityBudget {
        max_vertices: a.max_vertices,
        max_edges: a.max_edges,
    };
    let (g, spec, c) = build_construction_with_budget(a.n, a.r, a.k, budget)?;
    let sizes: Vec<String> = c.part_sizes.iter().map(u64::to_string).collect();
    let summary = format!("m: {}\nq: {}\npart_sizes: {}\n", c.m, c.q, sizes.join(" "));
    match &a.out {
        Some(path) => {
            emit(&g.to_text(), Some(path), stdout)?;
            let part_path = a.partition_out.clone().unwrap_or_else(|| {
                let mut p = path.clone().into_os_string();
                p.push(".part");
                p.into()
            });
            emit(&spec.to_text(), Some(&part_path), stdout)?;
            emit(&summary, None, stdout)?;
        }
        None => {
            emit(&g.to_text(), None, stdout)?;
            if let Some(p) = &a.partition_out {
                emit(&spec.to_text(), Some(p), stdout)?;
            }
            let _ = stderr.write_all(summary.as_bytes());
        }
    }
    Ok(EXIT_OK)
}

fn count(a: CountArgs, stdout: &mut dyn Write) -> Outcome {
    let host = load(&a.source, a.r as u64)?;
    let (g, r) = (&host.g, a.r);
    if r < 1 {
        return Err(Failure::usage("--r must be at least 1"));
    }
    let m = g.m() as u64;
    let copies = count_copies(g, r, None)?;
    let matchings = count_matchings(g, r);
    let cap = kfree_core::numeric::factorial(g.k() as u64).pow(r as u32);

    let mut extension_total = BigUint::ZERO;
    let mut max_extensions = 0usize;
    let mut failure = None;
    let _ = visit_matchings(g, r, |ids| {
        let found = Matching::from_ids(g, ids).and_then(|mm| extensions_of_matching(g, &mm, r, None));
        match found {
            Ok(ext) => {
                max_extensions = max_extensions.max(ext.len());
                extension_total += ext.len();
                ControlFlow::Continue(())
            }
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        }
    });
    if let Some(e) = failure {
        return Err(e.into());
    }
    let matchings_bound = &cap * BigUint::from(matchings);
    let binom_bound = copy_count_upper_bound(m, r as u64, g.k() as u64);
    let relaxed = (g.k() == 2).then(|| relaxed_graph_bound(m, r as u64));

    let copies_big = BigUint::from(copies);
    let mut holds = copies_big <= extension_total
        && BigUint::from(max_extensions) <= cap
        && extension_total <= matchings_bound
        && matchings_bound <= binom_bound;
    if let Some(rel) = &relaxed {
        holds &= m < r as u64 || binom_bound <= *rel;
    }

    let mut rep = Report::new("count");
    rep.set("k", g.k()).set("n", g.n()).set("m", m).set("r", r);
    rep.set("copies", int(copies));
    if let Some(spec) = &host.spec {
        rep.set("anchored_copies", int(count_copies(g, r, Some(spec))?));
    }
    rep.set("matchings", int(matchings))
        .set("extension_total", int(&extension_total))
        .set("max_extensions", max_extensions)
        .set("extension_cap", int(&cap))
        .set("matching_bound", int(&matchings_bound))
        .set("binomial_bound", int(&binom_bound))
        .set("relaxed_bound", relaxed.map_or(Value::Null, int))
        .set("chain", if holds { "PASS" } else { "FAIL" });
    emit_report(&rep, &a.output, stdout)?;
    Ok(if holds { EXIT_OK } else { EXIT_BOUND })
}

const TRIAL_COLUMNS: [&str; 9] = [
    "trial",
    "seed",
    "generator",
    "p",
    "edges_sampled",
    "copies_found",
    "edges_deleted",
    "final_size",
    "free_verified",
];

fn extract(a: ExtractArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Outcome {
    if a.trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    let host = load(&a.source, a.r as u64)?;
    let opts = ExtractOptions {
        policy: a.policy.into(),
        p_override: a.p,
    };
    let batch = run_trials(&host.g, a.r, a.trials, a.seed, None, opts)?;
    let table = Table {
        columns: TRIAL_COLUMNS.to_vec(),
        rows: batch
            .trials
            .iter()
            .map(|t| {
                let r = &t.report;
                vec![
                    int(t.trial),
                    int(r.seed),
                    r.generator.into(),
                    float(r.p),
                    int(r.edges_sampled),
                    int(r.copies_found),
                    int(r.edges_deleted),
                    int(r.final_size),
                    r.free_verified.into(),
                ]
            })
            .collect(),
    };
    let mut summary = Report::new("extract");
    summary.extend(&batch.summary);
    let expectation = if host.g.m() > 0 && a.r >= 2 && a.p.is_none() {
        expectation_lower_bound(host.g.m() as u64, a.r as u64, host.g.k() as u64)
            .ok()
            .map(|b| float(b.value))
    } else {
        None
    };
    summary.set("expectation_bound", expectation.unwrap_or(Value::Null));

    match a.format {
        Format::Json => {
            let mut s = summary.to_json();
            s.truncate(s.trim_end().len());
            let mut value: Value = serde_json::from_str(&s).expect("own json");
            value["trials"] = table.to_json_rows();
            let mut text = serde_json::to_string_pretty(&value).expect("json");
            text.push('\n');
            emit(&text, a.out.as_deref(), stdout)?;
        }
        Format::Csv | Format::Text => {
            emit(&table.to_csv(), a.out.as_deref(), stdout)?;
            match &a.summary {
                Some(path) => emit(&summary.to_json(), Some(path), stdout)?,
                None => {
                    let _ = stderr.write_all(summary.to_json().as_bytes());
                }
            }
        }
    }
    Ok(EXIT_OK)
}

fn pattern_for(p: &PatternArgs, k: usize, anchored: bool) -> Result<PatternSpec, Failure> {
    let s = p.s.unwrap_or(p.r);
    if k >= 3 {
        if s != p.r {
            return Err(Failure::usage(
                "hypergraph patterns have equal part sizes; drop --s",
            ));
        }
        return Ok(PatternSpec::multipartite(p.r, k)?);
    }
    if !anchored {
        if s != p.r {
            return Err(Failure::usage(
                "K_{r,s} with r != s needs a bipartite host with --partition",
            ));
        }
        return Ok(PatternSpec::krr(p.r)?);
    }
    Ok(match p.orientation {
        Orientation::Proof => PatternSpec::krs_oriented(p.r, s)?,
        Orientation::Either => PatternSpec::krs_either(p.r.min(s), p.r.max(s))?,
    })
}

fn oracle(a: OracleArgs, stdout: &mut dyn Write) -> Outcome {
    let host = load(&a.source, a.pattern.r as u64)?;
    let pattern = pattern_for(&a.pattern, host.g.k(), host.spec.is_some())?;
    let res = max_free_subgraph(&host.g, &pattern, host.spec.as_ref(), a.budget)?;
    let mut rep = Report::new("oracle");
    rep.extend(&pattern);
    rep.set("optimum", res.optimum)
        .set("m", res.m)
        .set("copies", res.copies)
        .set("nodes_explored", res.nodes_explored)
        .set("proved_optimal", res.proved_optimal);
    if a.witness {
        rep.set(
            "witness_edges",
            serde_json::to_value(&res.witness_edges).expect("edges"),
        );
    }
    emit_report(&rep, &a.output, stdout)?;
    Ok(EXIT_OK)
}

fn certify(a: CertifyArgs, stdout: &mut dyn Write) -> Outcome {
    let host = load(&a.source, a.r as u64)?;
    let spec = host
        .spec
        .as_ref()
        .ok_or_else(|| Failure::usage("certify needs a partition (--partition or --construct)"))?;
    let sub = match &a.subgraph {
        Some(path) => {
            let sg = Hypergraph::parse(&read(path)?)?;
            EdgeSubset::from_edges(&host.g, sg.edges().iter().cloned())?
        }
        None => EdgeSubset::full(&host.g),
    };
    let s = a.s.unwrap_or(a.r);
    let cert = kst_certificate(&host.g, &sub, spec, a.r, s)?;
    let mut rep = Report::new("certify");
    rep.set("r", a.r).set("s", s);
    rep.extend(&cert);
    emit_report(&rep, &a.output, stdout)?;
    Ok(EXIT_OK)
}

const BOUNDS_COLUMNS: [&str; 11] = [
    "n",
    "m",
    "q",
    "guarantee",
    "expectation_bound",
    "best_of_trials",
    "mean_of_trials",
    "oracle_value",
    "oracle_best_found",
    "oracle_certified",
    "upper_bound",
];

fn bounds(a: BoundsArgs, stdout: &mut dyn Write) -> Outcome {
    if a.n_min < 1 || a.n_min > a.n_max {
        return Err(Failure::usage("need 1 <= --n-min <= --n-max"));
    }
    if a.trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    let r = a.pattern.r;
    let s = a.pattern.s.unwrap_or(r);
    let mut table = Table {
        columns: BOUNDS_COLUMNS.to_vec(),
        rows: Vec::new(),
    };
    for n in a.n_min..=a.n_max {
        let (g, spec, c) = build_construction_with_budget(n, r as u64, a.k, CapacityBudget::default())?;
        let pattern = pattern_for(&a.pattern, g.k(), true)?;
        let opts = ReportOptions {
            trials: a.trials,
            base_seed: a.seed,
            budget: a.budget,
            policy: a.policy.into(),
        };
        let rep = f_lower_report(&g, &pattern, Some(&spec), opts)?;
        let expectation = expectation_lower_bound(c.m, r as u64, a.k)?;
        let upper = theorem_upper_bound(c.m, r as u64, s as u64, a.k)?;
        table.rows.push(vec![
            int(n),
            int(c.m),
            int(c.q),
            float(rep.guarantee),
            float(expectation.value),
            int(rep.best_of_trials),
            float(rep.mean_of_trials),
            rep.oracle_optimum.map_or(Value::Null, int),
            int(rep.oracle_best_found),
            rep.oracle_certified.into(),
            float(upper),
        ]);
    }
    let text = match a.format {
        Format::Json => {
            let value = serde_json::json!({
                "schema": SCHEMA,
                "command": "bounds",
                "k": a.k,
                "r": r,
                "s": s,
                "rows": table.to_json_rows(),
            });
            let mut t = serde_json::to_string_pretty(&value).expect("json");
            t.push('\n');
            t
        }
        Format::Csv | Format::Text => table.to_csv(),
    };
    emit(&text, a.out.as_deref(), stdout)?;
    Ok(EXIT_OK)
}
