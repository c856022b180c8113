use std::fs;
use std::path::Path;

use kfree_cli::{run, EXIT_IO, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn kfree(args: &[&str]) -> Out {
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let code = run(
        std::iter::once("kfree").chain(args.iter().copied()),
        &mut stdout,
        &mut stderr,
    );
    Out {
        code,
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
}

const K33: &str = "2 6 9\n0 3\n0 4\n0 5\n1 3\n1 4\n1 5\n2 3\n2 4\n2 5\n";
const K24: &str = "2 6 8\n0 2\n0 3\n0 4\n0 5\n1 2\n1 3\n1 4\n1 5\n";

#[test]
fn construct_headers() {
    let dir = tempfile::tempdir().unwrap();
    let host = dir.path().join("c.hg");
    let o = kfree(&[
        "construct",
        "--k",
        "2",
        "--r",
        "2",
        "--n",
        "3",
        "--out",
        host.to_str().unwrap(),
    ]);
    assert_eq!(o.code, EXIT_OK);
    assert!(fs::read_to_string(&host).unwrap().starts_with("2 12 27\n"));
    assert_eq!(
        fs::read_to_string(dir.path().join("c.hg.part"))
            .unwrap()
            .lines()
            .count(),
        2
    );
    assert_eq!(field(&o.stdout, "q"), "3");
    assert_eq!(field(&o.stdout, "part_sizes"), "3 9");

    let o = kfree(&["construct", "--k", "3", "--r", "2", "--n", "2"]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.starts_with("3 22 128\n"));

    assert_eq!(kfree(&["construct", "--n", "0"]).code, EXIT_USAGE);
    assert_eq!(
        kfree(&["construct", "--n", "3", "--max-edges", "10"]).code,
        kfree_cli::EXIT_CAPACITY
    );
}

#[test]
fn construct_is_byte_stable() {
    let a = kfree(&["construct", "--k", "3", "--n", "2"]);
    let b = kfree(&["construct", "--k", "3", "--n", "2"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn count_examples() {
    let dir = tempfile::tempdir().unwrap();
    let k33 = write(dir.path(), "k33.hg", K33);
    let o = kfree(&["count", "--input", &k33]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(field(&o.stdout, "copies"), "9");
    assert_eq!(field(&o.stdout, "binomial_bound"), "144");
    assert_eq!(field(&o.stdout, "relaxed_bound"), "162");
    assert_eq!(field(&o.stdout, "chain"), "PASS");

    let k24 = write(dir.path(), "k24.hg", K24);
    assert_eq!(field(&kfree(&["count", "--input", &k24]).stdout, "copies"), "6");

    let empty = write(dir.path(), "e.hg", "2 4 0\n");
    let o = kfree(&["count", "--input", &empty]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(field(&o.stdout, "copies"), "0");
    assert_eq!(field(&o.stdout, "chain"), "PASS");
}

#[test]
fn count_json_is_versioned() {
    let o = kfree(&["count", "--construct", "--n", "2", "--format", "json"]);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["schema"], "v1");
    assert_eq!(v["command"], "count");
    assert_eq!(v["copies"], 6);
    assert_eq!(v["anchored_copies"], 6);
}

#[test]
fn extract_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, threads) in [(&a, "1"), (&b, "4")] {
        let o = kfree(&[
            "--threads",
            threads,
            "extract",
            "--construct",
            "--n",
            "3",
            "--trials",
            "50",
            "--seed",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    }
    let a = fs::read(&a).unwrap();
    assert_eq!(a, fs::read(&b).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with(
        "trial,seed,generator,p,edges_sampled,copies_found,edges_deleted,final_size,free_verified\n"
    ));
    assert_eq!(text.lines().count(), 51);

    let one = kfree(&[
        "extract",
        "--construct",
        "--n",
        "3",
        "--trials",
        "1",
        "--seed",
        "7",
    ]);
    let two = kfree(&[
        "extract",
        "--construct",
        "--n",
        "3",
        "--trials",
        "1",
        "--seed",
        "7",
    ]);
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn extract_summary_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("s.json");
    let o = kfree(&[
        "extract",
        "--construct",
        "--n",
        "3",
        "--trials",
        "200",
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(o.code, EXIT_OK);
    let v: Value = serde_json::from_str(&fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(v["schema"], "v1");
    assert_eq!(v["guarantee"], 2.25);
    assert_eq!(v["all_free"], true);
    assert!(v["mean_final_size"].as_f64().unwrap() >= 2.25);

    let o = kfree(&[
        "extract",
        "--construct",
        "--n",
        "2",
        "--trials",
        "3",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["trials"].as_array().unwrap().len(), 3);
    assert_eq!(v["trials"][0]["trial"], 0);
}

#[test]
fn extract_on_empty_host() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "e.hg", "2 4 0\n");
    let o = kfree(&["extract", "--input", &empty, "--trials", "1"]);
    assert_eq!(o.code, EXIT_OK);
    let rows: Vec<&str> = o.stdout.lines().collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].ends_with(",0,0,0,0,true"), "{}", rows[1]);
}

#[test]
fn oracle_and_certify_examples() {
    let dir = tempfile::tempdir().unwrap();
    let k24 = write(dir.path(), "k24.hg", K24);
    let part = write(dir.path(), "k24.part", "0 1\n2 3 4 5\n");
    let o = kfree(&["oracle", "--input", &k24, "--partition", &part]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(field(&o.stdout, "optimum"), "5");
    assert_eq!(field(&o.stdout, "proved_optimal"), "true");

    let o = kfree(&["certify", "--input", &k24, "--partition", &part]);
    assert_eq!(field(&o.stdout, "verdict"), "proves-containment");
    assert_eq!(field(&o.stdout, "lhs"), "4");
    assert_eq!(field(&o.stdout, "rhs"), "2");

    let sub = write(dir.path(), "sub.hg", "2 6 5\n0 2\n0 3\n0 4\n0 5\n1 2\n");
    let o = kfree(&[
        "certify",
        "--input",
        &k24,
        "--partition",
        &part,
        "--subgraph",
        &sub,
    ]);
    assert_eq!(field(&o.stdout, "lhs"), "1");
    assert_eq!(field(&o.stdout, "verdict"), "inconclusive");

    let k33 = write(dir.path(), "k33.hg", K33);
    assert_eq!(field(&kfree(&["oracle", "--input", &k33]).stdout, "optimum"), "6");
}

#[test]
fn oracle_budget_exhaustion_still_succeeds() {
    let o = kfree(&["oracle", "--construct", "--n", "4", "--budget", "100"]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(field(&o.stdout, "proved_optimal"), "false");
}

#[test]
fn oracle_orientation_flag() {
    let dir = tempfile::tempdir().unwrap();
    let k24 = write(dir.path(), "k24.hg", K24);
    let part = write(dir.path(), "k24.part", "0 1\n2 3 4 5\n");
    let proof = kfree(&[
        "oracle",
        "--input",
        &k24,
        "--partition",
        &part,
        "--r",
        "2",
        "--s",
        "3",
    ]);
    let either = kfree(&[
        "oracle",
        "--input",
        &k24,
        "--partition",
        &part,
        "--r",
        "2",
        "--s",
        "3",
        "--orientation",
        "either",
    ]);
    let a: usize = field(&proof.stdout, "optimum").parse().unwrap();
    let b: usize = field(&either.stdout, "optimum").parse().unwrap();
    assert!(b <= a);
    assert_eq!(
        kfree(&["oracle", "--input", &k24, "--r", "2", "--s", "3"]).code,
        EXIT_USAGE
    );
}

#[test]
fn bounds_columns_are_monotone() {
    let o = kfree(&["bounds", "--r", "2", "--n-max", "3"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let mut rdr = csv::Reader::from_reader(o.stdout.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    let col = |i: usize| -> Vec<f64> { rows.iter().map(|r| r[i].parse().unwrap()).collect() };
    for i in [1, 3, 7, 10] {
        let c = col(i);
        assert!(c.windows(2).all(|w| w[0] <= w[1]), "column {i}: {c:?}");
    }
    let oracle = col(7);
    let upper = col(10);
    assert!(oracle.iter().zip(&upper).all(|(o, u)| o <= u));
    assert_eq!(oracle, vec![1.0, 5.0, 12.0]);
}

#[test]
fn usage_and_io_errors() {
    assert_eq!(kfree(&[]).code, EXIT_USAGE);
    assert_eq!(kfree(&["count"]).code, EXIT_USAGE);
    assert_eq!(kfree(&["count", "--input", "/nonexistent/x.hg"]).code, EXIT_IO);
    assert_eq!(
        kfree(&["extract", "--construct", "--n", "2", "--trials", "0"]).code,
        EXIT_USAGE
    );
    assert_eq!(
        kfree(&["extract", "--construct", "--n", "2", "--policy", "best"]).code,
        EXIT_USAGE
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.hg", "2 3 1\n0 x\n");
    let o = kfree(&["count", "--input", &bad]);
    assert_eq!(o.code, EXIT_IO);
    assert!(o.stderr.contains("line 2"));
    assert_eq!(kfree(&["--help"]).code, EXIT_OK);
    assert!(kfree(&["extract", "--help"]).stdout.contains("free_verified"));
}
