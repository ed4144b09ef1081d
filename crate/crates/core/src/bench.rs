//! Seeded query workloads against the block graph and a plain-array baseline.

use std::hint::black_box;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::builder::build;
use crate::error::Result;
use crate::format::stats;
use crate::graph::{BlockGraph, BuildConfig};

/// The uncompressed text: direct indexing, scan rank, scan select.
#[derive(Debug, Clone)]
pub struct PlainText {
    text: Vec<u8>,
}

impl PlainText {
    pub fn new(text: &[u8]) -> Self {
        PlainText { text: text.to_vec() }
    }

    pub fn size_bytes(&self) -> usize {
        self.text.len()
    }

    pub fn access(&self, i: usize) -> u8 {
        self.text[i - 1]
    }

    pub fn rank(&self, a: u8, i: usize) -> u64 {
        self.text[..i].iter().filter(|&&c| c == a).count() as u64
    }

    pub fn select(&self, a: u8, j: u64) -> Option<usize> {
        self.text
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == a)
            .nth((j as usize).checked_sub(1)?)
            .map(|(p, _)| p + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Workload {
    pub queries: usize,
    pub seed: u64,
}

impl Default for Workload {
    fn default() -> Self {
        Workload { queries: 10_000, seed: 7 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpThroughput {
    pub op: &'static str,
    pub graph_qps: f64,
    pub baseline_qps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub n: usize,
    pub arity: usize,
    pub levels: usize,
    pub z: usize,
    pub graph_bytes: usize,
    pub baseline_bytes: usize,
    pub build_attempts: u32,
    pub build_ms: Option<f64>,
    pub ops: Vec<OpThroughput>,
}

fn qps(count: usize, elapsed: Duration) -> f64 {
    count as f64 / elapsed.as_secs_f64().max(1e-9)
}

fn timed<F: FnMut()>(mut f: F) -> Duration {
    let t = Instant::now();
    f();
    t.elapsed()
}

/// Runs access, and rank/select on the first tracked symbol if any.
pub fn bench(graph: &BlockGraph, baseline: &PlainText, workload: &Workload) -> BenchReport {
    let n = graph.len();
    let mut rng = ChaCha8Rng::seed_from_u64(workload.seed);
    let positions: Vec<usize> = (0..workload.queries).map(|_| rng.gen_range(1..=n)).collect();
    let mut ops = Vec::new();

    let g = timed(|| {
        for &p in &positions {
            black_box(graph.access(p).ok());
        }
    });
    let b = timed(|| {
        for &p in &positions {
            black_box(baseline.access(p));
        }
    });
    ops.push(OpThroughput { op: "access", graph_qps: qps(positions.len(), g), baseline_qps: qps(positions.len(), b) });

    if let Some(&a) = graph.params().tracked.first() {
        let g = timed(|| {
            for &p in &positions {
                black_box(graph.rank(a, p).ok());
            }
        });
        let b = timed(|| {
            for &p in &positions {
                black_box(baseline.rank(a, p));
            }
        });
        ops.push(OpThroughput { op: "rank", graph_qps: qps(positions.len(), g), baseline_qps: qps(positions.len(), b) });

        let total = graph.rank(a, n).unwrap_or(0);
        if total > 0 {
            let js: Vec<u64> = (0..workload.queries).map(|_| rng.gen_range(1..=total)).collect();
            let g = timed(|| {
                for &j in &js {
                    black_box(graph.select(a, j).ok());
                }
            });
            let b = timed(|| {
                for &j in &js {
                    black_box(baseline.select(a, j));
                }
            });
            ops.push(OpThroughput { op: "select", graph_qps: qps(js.len(), g), baseline_qps: qps(js.len(), b) });
        }
    }

    let s = stats(graph);
    BenchReport {
        n,
        arity: graph.params().arity,
        levels: graph.level_count(),
        z: graph.z(),
        graph_bytes: s.total_bytes,
        baseline_bytes: baseline.size_bytes(),
        build_attempts: graph.build_attempts(),
        build_ms: None,
        ops,
    }
}

/// Builds, times the build and benches.
pub fn build_and_bench(text: &[u8], config: &BuildConfig, workload: &Workload) -> Result<BenchReport> {
    let t = Instant::now();
    let graph = build(text, config)?;
    let build_ms = t.elapsed().as_secs_f64() * 1e3;
    let mut report = bench(&graph, &PlainText::new(text), workload);
    report.build_ms = Some(build_ms);
    Ok(report)
}

impl BenchReport {
    /// Line-delimited `key=value`. Timing keys are `build_ms` and `*_qps`.
    pub fn to_key_value(&self) -> String {
        let mut out = format!(
            "n={}\narity={}\nlevels={}\nz={}\ngraph_bytes={}\nbaseline_bytes={}\nbuild_attempts={}\n",
            self.n, self.arity, self.levels, self.z, self.graph_bytes, self.baseline_bytes, self.build_attempts
        );
        if let Some(ms) = self.build_ms {
            out += &format!("build_ms={ms:.3}\n");
        }
        for op in &self.ops {
            out += &format!("{}_graph_qps={:.0}\n{}_baseline_qps={:.0}\n", op.op, op.graph_qps, op.op, op.baseline_qps);
        }
        out
    }

    pub const CSV_HEADER: &'static str = "n,arity,levels,z,graph_bytes,baseline_bytes,build_attempts,op,graph_qps,baseline_qps";

    pub fn to_csv_rows(&self) -> String {
        self.ops
            .iter()
            .map(|op| {
                format!(
                    "{},{},{},{},{},{},{},{},{:.0},{:.0}\n",
                    self.n,
                    self.arity,
                    self.levels,
                    self.z,
                    self.graph_bytes,
                    self.baseline_bytes,
                    self.build_attempts,
                    op.op,
                    op.graph_qps,
                    op.baseline_qps
                )
            })
            .collect()
    }
}

/// One row of the arity trade-off table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradeoffRow {
    pub arity: usize,
    pub levels: usize,
    pub blocks: usize,
    pub bytes: usize,
}

pub fn arity_tradeoff(text: &[u8], base: &BuildConfig, arities: &[usize]) -> Result<Vec<TradeoffRow>> {
    arities
        .iter()
        .map(|&arity| {
            let g = build(text, &BuildConfig { arity, ..base.clone() })?;
            let s = stats(&g);
            Ok(TradeoffRow { arity, levels: s.levels, blocks: s.total_blocks(), bytes: s.total_bytes })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn plain_baseline() {
        let p = PlainText::new(b"abracadabra");
        assert_eq!(p.access(5), b'c');
        assert_eq!(p.rank(b'a', 11), 5);
        assert_eq!(p.select(b'a', 4), Some(8));
        assert_eq!(p.select(b'a', 6), None);
        assert_eq!(p.select(b'a', 0), None);
    }

    #[test]
    fn report_sizes_follow_stats() {
        let text = corpus::fibonacci(3000).unwrap();
        let g = build(&text, &BuildConfig::default()).unwrap();
        let r = bench(&g, &PlainText::new(&text), &Workload { queries: 200, seed: 1 });
        assert_eq!(r.graph_bytes, stats(&g).total_bytes);
        assert_eq!(r.graph_bytes, crate::format::serialize(&g).len());
        assert_eq!(r.ops.len(), 3);
        assert!(r.to_key_value().contains("levels="));
        assert_eq!(r.to_csv_rows().lines().count(), 3);
    }
}
