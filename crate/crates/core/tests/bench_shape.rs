use blockgraph::bench::{arity_tradeoff, bench, PlainText, Workload};
use blockgraph::{build, corpus, stats, BuildConfig};

#[test]
fn repetitive_input_is_smaller_than_plain() {
    let t = corpus::random(4, 4096, 11).unwrap();
    let text = corpus::power(&t, 16).unwrap();
    let g = build(&text, &BuildConfig::default()).unwrap();
    let report = bench(&g, &PlainText::new(&text), &Workload { queries: 2000, seed: 1 });
    assert_eq!(report.graph_bytes, stats(&g).total_bytes);
    assert!(report.graph_bytes < report.baseline_bytes, "{} >= {}", report.graph_bytes, report.baseline_bytes);
    let access = &report.ops[0];
    assert_eq!(access.op, "access");
    assert!(access.baseline_qps > access.graph_qps);
}

#[test]
fn arity_tradeoff_is_monotone() {
    let text = corpus::power(&corpus::fibonacci(4096).unwrap(), 16).unwrap();
    let rows = arity_tradeoff(&text, &BuildConfig::default(), &[2, 4, 8, 16]).unwrap();
    for w in rows.windows(2) {
        assert!(w[0].levels >= w[1].levels, "{rows:?}");
        assert!(w[0].bytes <= w[1].bytes, "{rows:?}");
    }
}
