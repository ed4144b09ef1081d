use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockgraph")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn build_and_query() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("t.txt");
    let graph = dir.path().join("t.bgf");
    fs::write(&text, "abracadabra").unwrap();
    let (t, g) = (text.to_str().unwrap(), graph.to_str().unwrap());

    let o = run(&["build", t, "--arity", "2", "--leaf-len", "2", "--track", "abr", "--out", g]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("n=11"));

    assert_eq!(stdout(&run(&["extract", g, "4", "5"])), "acada\n");
    assert_eq!(stdout(&run(&["rank", g, "a", "11"])), "5\n");
    assert_eq!(stdout(&run(&["select", g, "a", "4"])), "8\n");
    assert_eq!(stdout(&run(&["verify", g, t])), "ok\n");
    assert!(stdout(&run(&["stats", g])).contains("total_bytes="));

    assert_eq!(run(&["rank", g, "c", "3"]).status.code(), Some(2));
    assert_eq!(run(&["select", g, "a", "99"]).status.code(), Some(2));
    assert_eq!(run(&["lca", g, "1", "2"]).status.code(), Some(2));
    fs::write(&text, "abracadabrx").unwrap();
    assert_eq!(run(&["verify", g, t]).status.code(), Some(2));
}

#[test]
fn parentheses_queries() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("bp.txt");
    let graph = dir.path().join("bp.bgf");
    fs::write(&text, "((())(()))").unwrap();
    let (t, g) = (text.to_str().unwrap(), graph.to_str().unwrap());
    assert_eq!(run(&["build", t, "--excess", "--out", g]).status.code(), Some(0));
    assert_eq!(stdout(&run(&["lca", g, "3", "7"])), "1\n");
    assert_eq!(stdout(&run(&["rmq-excess", g, "2", "6"])), "5\n");
}

#[test]
fn usage_and_format_errors() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["rank", "x.bgf", "a"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.bgf");
    fs::write(&bad, b"not a graph").unwrap();
    assert_eq!(run(&["stats", bad.to_str().unwrap()]).status.code(), Some(2));
    let t = dir.path().join("t");
    fs::write(&t, "abc").unwrap();
    let o = run(&["build", t.to_str().unwrap(), "--arity", "1", "--out", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gen_and_bench_are_deterministic() {
    assert_eq!(stdout(&run(&["gen", "fibonacci", "--n", "13"])), "abaababaabaab");
    assert_eq!(stdout(&run(&["gen", "power", "--base", "ab", "--k", "3"])), "ababab");
    let a = run(&["gen", "random", "--sigma", "4", "--n", "64", "--seed", "9"]);
    assert_eq!(a.stdout, run(&["gen", "random", "--sigma", "4", "--n", "64", "--seed", "9"]).stdout);
    assert_eq!(run(&["gen", "random", "--sigma", "0"]).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("fib");
    let o = run(&["gen", "fibonacci", "--n", "5000", "--out", t.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let args = ["bench", t.to_str().unwrap(), "--queries", "300", "--no-timing", "--tradeoff"];
    let first = stdout(&run(&args));
    assert_eq!(first, stdout(&run(&args)));
    assert!(first.contains("graph_bytes=") && !first.contains("_qps"));
    assert_eq!(first.lines().filter(|l| l.starts_with(|c: char| c.is_ascii_digit())).count(), 4);
    let csv = stdout(&run(&["bench", t.to_str().unwrap(), "--queries", "100", "--csv"]));
    assert!(csv.starts_with("n,arity,"));
}
